"""Deterministic low-discrepancy configuration source.

Configurations come from a Halton sequence (one prime base per dimension)
shifted by a seeded pseudo-random offset with wrap-around, so the same
(dims, seed) pair reproduces the identical infinite sequence while
different seeds decorrelate the point sets.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1
# SplitMix64 update constants, pinned so offsets are reproducible across
# platforms and languages.
_SM_GAMMA = 0x9E3779B97F4A7C15
_SM_MIX1 = 0xBF58476D1CE4E5B9
_SM_MIX2 = 0x94D049BB133111EB


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + _SM_GAMMA) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * _SM_MIX1) & _MASK64
    z = ((z ^ (z >> 27)) * _SM_MIX2) & _MASK64
    z ^= z >> 31
    return state, z


def first_primes(count: int) -> list[int]:
    """Return the first `count` primes (2, 3, 5, ...)."""
    primes: list[int] = []
    candidate = 2
    while len(primes) < count:
        if all(candidate % p for p in primes):
            primes.append(candidate)
        candidate += 1
    return primes


def radical_inverse(index: int, base: int) -> float:
    """Digit-reversal of `index` in the given base, as a fraction in [0, 1).

    index must be >= 1 and base >= 2; index 0 would map to 0 in every base.
    """
    if index < 1:
        raise ValueError(f"index must be >= 1, got {index}")
    if base < 2:
        raise ValueError(f"base must be >= 2, got {base}")
    result = 0.0
    frac = 1.0 / base
    i = index
    while i > 0:
        i, digit = divmod(i, base)
        result += digit * frac
        frac /= base
    return result


class HaltonSource:
    """Infinite sequence of distinct configurations in the unit cube.

    Pure after construction: `config_at` depends only on (dims, seed, index)
    and is safe to call from any number of threads.
    """

    def __init__(self, dims: int, seed: int = 0):
        if dims < 1:
            raise ValueError(f"dims must be >= 1, got {dims}")
        self.dims = dims
        self.seed = seed
        self.bases = first_primes(dims)
        state = seed & _MASK64
        offs = []
        for _ in range(dims):
            state, z = _splitmix64(state)
            offs.append(z / 2.0 ** 64)
        self.offset = np.array(offs)

    def config_at(self, index: int) -> np.ndarray:
        """Configuration for 1-based sequence index; stateless and deterministic."""
        if index < 1:
            raise ValueError(f"index must be >= 1, got {index}")
        out = np.empty(self.dims)
        for d, base in enumerate(self.bases):
            out[d] = (radical_inverse(index, base) + self.offset[d]) % 1.0
        return out

    def prefix(self, count: int) -> np.ndarray:
        """First `count` configurations as a (count, dims) array."""
        out = np.empty((count, self.dims))
        for i in range(count):
            for d, base in enumerate(self.bases):
                out[i, d] = (radical_inverse(i + 1, base) + self.offset[d]) % 1.0
        return out

    def __repr__(self) -> str:
        return f"HaltonSource(dims={self.dims}, seed={self.seed})"
