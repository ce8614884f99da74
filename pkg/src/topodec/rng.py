"""Counter-style random streams.

Every stream is keyed by ``(master seed, domain, index...)`` so the numbers a
trial block sees do not depend on how many blocks ran before it or in which
order they ran.
"""
from __future__ import annotations

import numpy as np

# domain tags keep independent uses of the same master seed apart
INIT = 1
TRAIN = 2
EVAL = 3
SAMPLE = 4
ORACLE = 5


def stream(seed: int, *key: int) -> np.random.Generator:
    if seed < 0 or any(k < 0 for k in key):
        raise ValueError("seed and stream keys must be non-negative")
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, key)])))
