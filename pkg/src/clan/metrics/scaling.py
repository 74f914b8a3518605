"""Extrapolating run time across agent counts.

Compute time is modelled as ``a/n + b`` (population-level parallelism
divided over ``n`` agents) and communication time as ``c + d*n`` (traffic
that grows with the number of agents). Their sum has a minimum at
``sqrt(a/d)`` and exceeds the single-agent time once ``n > a/d``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class ScalingError(ValueError):
    pass


@dataclass(frozen=True)
class ScalingModel:
    a: float
    b: float
    c: float
    d: float
    compute_rms: float
    comm_rms: float
    scales: tuple[int, ...]
    stagnation_n: int
    worse_than_serial_n: int | None
    beyond_observed_range: bool

    def compute(self, n: float) -> float:
        return self.a / n + self.b

    def comm(self, n: float) -> float:
        return self.c + self.d * n

    def total(self, n: float) -> float:
        return self.compute(n) + self.comm(n)

    def to_dict(self) -> dict:
        return {
            "a": self.a, "b": self.b, "c": self.c, "d": self.d,
            "compute_rms": self.compute_rms, "comm_rms": self.comm_rms,
            "scales": list(self.scales),
            "stagnation_n": self.stagnation_n,
            "worse_than_serial_n": self.worse_than_serial_n,
            "beyond_observed_range": self.beyond_observed_range,
        }


def _lstsq(design: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise ScalingError("degenerate fit: singular design matrix")
    resid = y - design @ coef
    return coef, float(np.sqrt(np.mean(resid**2)))


def fit_scaling(scales, compute_times, comm_times) -> ScalingModel:
    n = np.asarray(scales, dtype=float)
    tc = np.asarray(compute_times, dtype=float)
    tm = np.asarray(comm_times, dtype=float)
    if not (n.shape == tc.shape == tm.shape) or n.ndim != 1:
        raise ScalingError("scales and timings must be equal-length sequences")
    if len(set(n.tolist())) < 3:
        raise ScalingError("need at least 3 distinct scales")
    if np.any(n <= 0):
        raise ScalingError("scales must be positive")
    (a, b), compute_rms = _lstsq(np.column_stack([1.0 / n, np.ones_like(n)]), tc)
    (c, d), comm_rms = _lstsq(np.column_stack([np.ones_like(n), n]), tm)
    a, b, c, d = float(a), float(b), float(c), float(d)

    n_max = int(n.max())
    model = ScalingModel(a, b, c, d, compute_rms, comm_rms, tuple(int(v) for v in n), 0, None, False)
    if a > 0 and d > 0:
        best = math.sqrt(a / d)
        candidates = {max(1, math.floor(best)), max(1, math.ceil(best))}
        stagnation = min(candidates, key=lambda k: (model.total(k), k))
        beyond = stagnation > n_max
        worse = math.floor(a / d) + 1
    else:
        # total keeps falling (or never falls): no interior minimum to report
        stagnation, beyond = n_max, True
        worse = None if d <= 0 else 2
    return ScalingModel(a, b, c, d, compute_rms, comm_rms, model.scales, stagnation, worse, beyond)
