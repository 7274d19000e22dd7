"""Counter-based random streams.

Every stochastic quantity is drawn from a Philox generator keyed by a user
seed plus an integer path, so results are independent of evaluation order
and identical across platforms, processes, and worker counts.
"""
from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def mix64(*parts: int) -> int:
    """Hash a tuple of integers into one 64-bit word (splitmix64 finalizer)."""
    acc = 0x9E3779B97F4A7C15
    for part in parts:
        acc = (acc + (int(part) & _MASK64)) & _MASK64
        acc = ((acc ^ (acc >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        acc = ((acc ^ (acc >> 27)) * 0x94D049BB133111EB) & _MASK64
        acc ^= acc >> 31
    return acc & _MASK64


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for (seed, path); same inputs give same draws."""
    key = np.array([int(seed) & _MASK64, mix64(*path)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
