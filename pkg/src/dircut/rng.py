"""Seeded, splittable random streams.

Every random decision is drawn from a Philox (counter-based) generator whose
seed is derived from a root seed and an integer key path, so a branch's
randomness depends only on ``(seed, key)`` and never on what ran before it.
"""

from __future__ import annotations

import numpy as np

# key tags, so different consumers never collide
SPARSIFY_EDGE = 1
SPARSIFY_VERTEX = 2
SAMPLE_SINKS = 3
SAMPLE_ROOTS = 4
GUESS = 5
BENCH = 6


def derive_seed(seed: int, *key: int) -> int:
    """Child seed for ``key`` under ``seed`` (a 128-bit integer)."""
    ss = np.random.SeedSequence(entropy=int(seed) & ((1 << 128) - 1), spawn_key=tuple(int(k) for k in key))
    lo, hi = ss.generate_state(2, dtype=np.uint64)
    return (int(hi) << 64) | int(lo)


def generator(seed: int, *key: int) -> np.random.Generator:
    """Philox generator for ``(seed, *key)``."""
    if key:
        seed = derive_seed(seed, *key)
    return np.random.Generator(np.random.Philox(int(seed) & ((1 << 128) - 1)))


def fraction_key(q) -> tuple[int, int]:
    """Stable integer key for a rational guess value."""
    from fractions import Fraction

    q = Fraction(q)
    return (q.numerator, q.denominator)


def sample_indices(rng: np.random.Generator, population: int, count: int) -> list[int]:
    """``count`` uniform draws with replacement from ``range(population)``, deduplicated in draw order.

    If ``count`` reaches ``population`` every index is returned instead.
    """
    if population <= 0:
        return []
    if count >= population:
        return list(range(population))
    draws = rng.integers(0, population, size=count)
    seen: dict[int, None] = {}
    for d in draws.tolist():
        seen.setdefault(d, None)
    return list(seen)
