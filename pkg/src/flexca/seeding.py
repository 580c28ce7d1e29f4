"""Deterministic seeding helpers.

All randomness in the simulator flows from explicit integer seeds, either
through numpy generators (traffic, link qualities) or through the stateless
integer mixer below (per-UE PDCCH candidate randomization), so that every
run is reproducible bit-for-bit.
"""

import numpy as np

_MASK64 = (1 << 64) - 1


def mix64(*parts: int) -> int:
    """Stateless splitmix-style hash of a tuple of integers."""
    h = 0x9E3779B97F4A7C15
    for p in parts:
        h ^= p & _MASK64
        h = (h * 0xBF58476D1CE4E5B9) & _MASK64
        h ^= h >> 27
        h = (h * 0x94D049BB133111EB) & _MASK64
        h ^= h >> 31
    return h


def generator(seed: int, *key: int) -> np.random.Generator:
    """Independent numpy generator for (seed, key...) streams."""
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence([seed & _MASK64, *[k & _MASK64 for k in key]])))
