"""Keyed random streams.

Every stochastic decision draws from a generator derived from the master seed
plus a purpose tag and coordinates (clan, generation, child index, ...). The
stream a child sees therefore does not depend on which process breeds it or in
what order children are produced.
"""

from __future__ import annotations

import numpy as np

INIT = 1
SELECT = 2
BREED = 3
EVAL = 4

_MASK = (1 << 64) - 1


def stream(seed: int, *key: int) -> np.random.Generator:
    entropy = [seed & _MASK, *(k & _MASK for k in key)]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))
