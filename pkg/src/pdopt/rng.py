"""Portable deterministic random numbers.

The generator is xoshiro256** (Blackman and Vigna) seeded by expanding a 64-bit
seed with splitmix64. Derived streams are fixed so that a port in any language
reproduces the same problem instances:

* ``uniform()``  = ``(next_u64() >> 11) * 2**-53``, in ``[0, 1)``
* ``normal()``   = Box-Muller on two uniforms ``u1, u2``:
  ``sqrt(-2 ln(1 - u1)) * cos(2 pi u2)``; one normal per pair, no caching
* ``integer(n)`` = ``next_u64() % n`` (bias is negligible at desk sizes)
"""

from __future__ import annotations

import math

import numpy as np

MASK = (1 << 64) - 1


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK


def splitmix64(state: int):
    """Yield successive splitmix64 outputs starting from ``state``."""
    while True:
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        yield z ^ (z >> 31)


class Xoshiro256:
    def __init__(self, seed: int = 0):
        if seed < 0:
            raise ValueError("seed must be an unsigned integer")
        mix = splitmix64(seed & MASK)
        self.s = [next(mix) for _ in range(4)]

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & MASK, 7) * 9) & MASK
        t = (s[1] << 17) & MASK
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        return low + (high - low) * ((self.next_u64() >> 11) * 2.0**-53)

    def normal(self) -> float:
        u1 = self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(1.0 - u1)) * math.cos(2.0 * math.pi * u2)

    def integer(self, n: int) -> int:
        if n < 1:
            raise ValueError("integer range must be positive")
        return self.next_u64() % n

    def normal_array(self, *shape: int) -> np.ndarray:
        count = math.prod(shape)
        return np.array([self.normal() for _ in range(count)]).reshape(shape)

    def uniform_array(self, *shape: int, low: float = 0.0, high: float = 1.0) -> np.ndarray:
        count = math.prod(shape)
        return np.array([self.uniform(low, high) for _ in range(count)]).reshape(shape)

    def permutation(self, n: int) -> list[int]:
        items = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.integer(i + 1)
            items[i], items[j] = items[j], items[i]
        return items
