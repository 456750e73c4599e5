"""Deterministic seed derivation.

Every stochastic step draws its generator from ``(master_seed, stream, *indices)``
through :class:`numpy.random.SeedSequence`, so any single draw can be
reproduced without replaying the ones before it.
"""

from __future__ import annotations

import numpy as np

PARTITION_STREAM = 0
NULL_STREAM = 1
SYNTH_STREAM = 2


def derive_seed(master_seed: int, *key: int) -> int:
    if master_seed < 0:
        raise ValueError("master seed must be non-negative")
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, np.uint64)[0])


def rng_for(master_seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, *key))
