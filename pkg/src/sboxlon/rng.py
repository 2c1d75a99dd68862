"""Deterministic, platform-independent randomness.

Nothing in this package touches a process-global or platform-default RNG.
All randomness derives from SplitMix64, a counter-based 64-bit generator:
output k of the stream seeded with s is the pure function
``mix64(s + (k + 1) * GAMMA)``.  This keeps every sampled quantity
bit-reproducible across platforms and lets parallel workers draw from
disjoint, order-independent substreams.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3


def mix64(z: int) -> int:
    """SplitMix64 finalizer on a 64-bit integer."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def splitmix64(seed: int, index: int) -> int:
    """Output ``index`` (0-based) of the SplitMix64 stream seeded with ``seed``."""
    return mix64((seed + (index + 1) * GAMMA) & _MASK64)


def splitmix64_array(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """Vectorized ``splitmix64(seed, offset..offset+count-1)`` as uint64."""
    idx = np.arange(offset + 1, offset + count + 1, dtype=np.uint64)
    z = (np.uint64(seed & _MASK64) + idx * np.uint64(GAMMA)).astype(np.uint64)
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, count: int, offset: int = 0) -> np.ndarray:
    """``count`` doubles in [0, 1) from the SplitMix64 stream (53-bit mantissa)."""
    return (splitmix64_array(seed, count, offset) >> np.uint64(11)) * 2.0**-53


def derive_seed(seed: int, label: str) -> int:
    """Derive an independent substream seed for a named purpose.

    The label is folded with FNV-1a so distinct purposes (path sampling,
    bootstrap replicates, ...) never share a stream.
    """
    h = _FNV_OFFSET
    for b in label.encode("utf-8"):
        h = ((h ^ b) * _FNV_PRIME) & _MASK64
    return mix64((seed & _MASK64) ^ h)


class SplitMix64Stream:
    """Sequential view of a SplitMix64 stream with an explicit cursor."""

    def __init__(self, seed: int, index: int = 0):
        self.seed = seed & _MASK64
        self.index = index

    def next_u64(self) -> int:
        value = splitmix64(self.seed, self.index)
        self.index += 1
        return value

    def next_below(self, bound: int) -> int:
        """Unbiased draw from [0, bound) via power-of-two rejection."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        mask = (1 << (bound - 1).bit_length()) - 1 if bound > 1 else 0
        while True:
            r = self.next_u64() & mask
            if r < bound:
                return r


def shuffled_range(length: int, seed: int) -> list[int]:
    """Fisher-Yates shuffle of ``range(length)`` driven by SplitMix64."""
    items = list(range(length))
    stream = SplitMix64Stream(seed)
    for i in range(length - 1, 0, -1):
        j = stream.next_below(i + 1)
        items[i], items[j] = items[j], items[i]
    return items


def sample_without_replacement(population: int, k: int, seed: int) -> list[int]:
    """First ``k`` entries of a seeded shuffle of ``range(population)``."""
    if k > population:
        raise ValueError("cannot sample more items than the population holds")
    return shuffled_range(population, seed)[:k]
