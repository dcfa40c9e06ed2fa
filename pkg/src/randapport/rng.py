"""Seed handling: stable 64-bit stream keys and SplitMix64 draws.

A stream key is ``mix64(mix64(seed) ^ digest(labels))`` where ``digest`` is the
first 8 bytes of BLAKE2b over the labels. With no labels the key is
``mix64(seed)``. The k-th draw (k = 0, 1, ...) of a stream is
``mix64(key + (k + 1) * GOLDEN)``, i.e. plain SplitMix64 seeded with the key,
so any draw can be computed directly from its index.
"""

import hashlib
import math
from fractions import Fraction

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _C1) & MASK64
    z = ((z ^ (z >> 27)) * _C2) & MASK64
    return z ^ (z >> 31)


def label_digest(*labels) -> int:
    h = hashlib.blake2b(digest_size=8)
    for label in labels:
        h.update(repr(label).encode("utf-8"))
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "little")


def check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def stream_key(seed: int, *labels) -> int:
    key = mix64(check_seed(seed))
    if labels:
        key = mix64(key ^ label_digest(*labels))
    return key


def stream_keys(seeds, *labels) -> np.ndarray:
    """Vectorised :func:`stream_key` over an array of seeds."""
    z = np.asarray(seeds, dtype=np.uint64)
    z = _mix64_array(z)
    if labels:
        z = _mix64_array(z ^ np.uint64(label_digest(*labels)))
    return z


def _mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.copy()
    z ^= z >> np.uint64(30)
    z *= np.uint64(_C1)
    z ^= z >> np.uint64(27)
    z *= np.uint64(_C2)
    z ^= z >> np.uint64(31)
    return z


def draw(key: int, index: int) -> int:
    return mix64(key + (index + 1) * GOLDEN)


class Stream:
    """Sequential reader over a SplitMix64 stream."""

    def __init__(self, key: int):
        self.key = key
        self.index = 0

    def next_u64(self) -> int:
        value = draw(self.key, self.index)
        self.index += 1
        return value

    def uniform_fraction(self) -> Fraction:
        """Uniform rational in [0, 1) with 64 fractional bits."""
        return Fraction(self.next_u64(), 1 << 64)

    def uniform_open(self) -> float:
        """Uniform float in (0, 1), never exactly 0 or 1."""
        return ((self.next_u64() >> 11) + 0.5) * 2.0**-53

    def exponential(self) -> float:
        return -math.log1p(-self.uniform_open())

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) by rejection, unbiased."""
        if n <= 0:
            raise ValueError("n must be positive")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def permutation(self, n: int) -> list[int]:
        items = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items
