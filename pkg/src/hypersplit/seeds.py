"""Deterministic 64-bit stream-key derivation.

Every random stream in the package (edge sampling, each test-design
iteration, per-trial seeds, Monte Carlo chunks) gets its own PCG64
generator seeded by a key mixed from the master seed and integer
coordinates via splitmix64.  Same inputs, same key, same stream --
regardless of evaluation order or worker count.

Key recipe: start from the master seed, then for each coordinate c
(domain tag first) update ``key = splitmix64(key ^ splitmix64(c))``.
"""

from enum import IntEnum

import numpy as np

_M64 = (1 << 64) - 1


class Domain(IntEnum):
    """Purpose tags keeping unrelated streams out of each other's keyspace."""

    MODEL = 1
    DESIGN = 2
    TRIAL = 3
    BOUNDS = 4


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _M64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return z ^ (z >> 31)


def derive_key(master_seed: int, *coords: int) -> int:
    """Mix a master seed and non-negative integer coordinates into one key."""
    key = master_seed & _M64
    for c in coords:
        key = splitmix64(key ^ splitmix64(int(c) & _M64))
    return key


def generator(key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(key))


def stream(master_seed: int, *coords: int) -> np.random.Generator:
    """Generator for the stream identified by (master_seed, *coords)."""
    return generator(derive_key(master_seed, *coords))
