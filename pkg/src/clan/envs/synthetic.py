"""A tunable cost workload standing in for large-observation tasks.

Observations after the first are uniform(-1, 1) vectors drawn from the
episode stream; the reward each step is the negative squared distance between
the network's outputs and a fixed target vector. ``flop_scale`` repeats the
forward pass that many times per step, inflating inference cost without
changing any result.
"""

from __future__ import annotations

import numpy as np

from clan.envs.base import EnvError, EnvSpec

_TARGET_TAG = 0x5417


def synthetic_workload(
    obs_dim: int = 128,
    hidden_hint: int = 0,
    steps: int = 200,
    flop_scale: int = 1,
    *,
    action_dim: int = 4,
    target_seed: int = 0,
    solved_threshold: float = 0.0,
) -> EnvSpec:
    if min(obs_dim, steps, flop_scale, action_dim) < 1 or hidden_hint < 0:
        raise EnvError("synthetic workload parameters must be >= 1")
    return EnvSpec(
        "synthetic",
        obs_dim,
        "continuous",
        action_dim,
        max_steps=steps,
        solved_threshold=solved_threshold,
        episodes=1,
        hidden_hint=hidden_hint,
        flop_scale=flop_scale,
        params={"target_seed": target_seed},
    )


def target_vector(spec: EnvSpec) -> np.ndarray:
    r = np.random.default_rng([int(spec.params.get("target_seed", 0)), _TARGET_TAG])
    return r.uniform(0.1, 0.9, size=spec.action_n)


def score(outputs, target: np.ndarray) -> float:
    total = 0.0
    for y, t in zip(outputs, target):
        d = y - t
        total += d * d
    return -total


class SyntheticEnv:
    def __init__(self, spec: EnvSpec):
        self.spec = spec
        self.target = target_vector(spec)
        self.rng = None
        self.t = 0
        self.terminated = False

    def reset(self, rng: np.random.Generator) -> list[float]:
        self.rng = rng
        self.t = 0
        return [0.0] * self.spec.observation_dim

    def step(self, action):
        if self.rng is None:
            raise EnvError("step() before reset()")
        if len(action) != self.spec.action_n:
            raise EnvError(f"expected {self.spec.action_n} action values, got {len(action)}")
        reward = score(action, self.target)
        self.t += 1
        done = self.t >= self.spec.max_steps
        if done:
            self.rng = None
            return [0.0] * self.spec.observation_dim, reward, True
        return [float(v) for v in self.rng.uniform(-1.0, 1.0, size=self.spec.observation_dim)], reward, False


def observation_matrix(spec: EnvSpec, rng: np.random.Generator, steps: int) -> np.ndarray:
    """Every observation an episode of ``steps`` steps will see, drawn in the
    same order as stepping SyntheticEnv would draw them."""
    obs = np.zeros((steps, spec.observation_dim))
    for t in range(1, steps):
        obs[t] = rng.uniform(-1.0, 1.0, size=spec.observation_dim)
    return obs
