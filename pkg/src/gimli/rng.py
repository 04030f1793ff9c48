"""Deterministic, platform-independent random number generation.

Every stochastic step in the package (bootstrap sampling, feature
subsampling, fold shuffling, synthetic data generation) draws from the
SplitMix64 generator implemented here, so identical seeds give identical
results on every platform.  The exact algorithms are documented in
``docs/rng.md`` and pinned by tests; changing them invalidates persisted
models and fold plans.
"""

from __future__ import annotations

import hashlib

_MASK64 = (1 << 64) - 1

# SplitMix64 constants (Steele, Lea & Flood 2014).
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB


def stable_hash64(*parts) -> int:
    """64-bit hash of the given parts, stable across processes and platforms.

    Parts are joined with NUL separators and hashed with BLAKE2b; used to
    derive per-tree and per-fold seeds (unlike builtin ``hash``, which is
    salted per process).
    """
    h = hashlib.blake2b(digest_size=8)
    for part in parts:
        h.update(str(part).encode("utf-8"))
        h.update(b"\x00")
    return int.from_bytes(h.digest(), "big")


def derive_seed(seed: int, *parts) -> int:
    """Derive a sub-stream seed: ``seed XOR stable_hash64(*parts)``."""
    return (seed & _MASK64) ^ stable_hash64(*parts)


class SplitMix64:
    """SplitMix64 generator with unbiased integer sampling.

    ``randbelow`` uses rejection sampling, ``shuffle`` the Fisher-Yates
    procedure, and ``sample_without_replacement`` a partial Fisher-Yates;
    see ``docs/rng.md`` for the pinned step-by-step definitions.
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GAMMA) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def randbelow(self, n: int) -> int:
        """Uniform integer in [0, n) via rejection sampling."""
        if n <= 0:
            raise ValueError("n must be positive")
        bound = (1 << 64) - ((1 << 64) % n)
        while True:
            u = self.next_u64()
            if u < bound:
                return u % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle (descending index order)."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_without_replacement(self, n: int, k: int) -> list[int]:
        """k distinct integers from [0, n) by partial Fisher-Yates."""
        if not 0 <= k <= n:
            raise ValueError(f"cannot sample {k} of {n}")
        arr = list(range(n))
        for i in range(k):
            j = i + self.randbelow(n - i)
            arr[i], arr[j] = arr[j], arr[i]
        return arr[:k]

    def bootstrap_indices(self, n: int) -> list[int]:
        """n indices drawn from [0, n) with replacement, in draw order."""
        return [self.randbelow(n) for _ in range(n)]
