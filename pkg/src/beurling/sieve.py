"""Prime enumeration for the classical (rational-prime) system.

A plain sieve serves small limits and the base primes; larger limits go
through fixed-size segments so memory stays bounded by the segment length
rather than the limit.  Prime powers p^j are compared against the limit in
exact integer arithmetic, never through floating-point roots.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator

import numpy as np

DEFAULT_SEGMENT = 8_000_000


def simple_sieve(limit: int) -> np.ndarray:
    """All primes <= limit as an int64 array."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    mask = np.ones(limit + 1, dtype=bool)
    mask[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if mask[p]:
            mask[p * p :: p] = False
    return np.flatnonzero(mask).astype(np.int64)


def iter_primes(limit: int, segment: int = DEFAULT_SEGMENT) -> Iterator[np.ndarray]:
    """Yield primes <= limit in ascending segments."""
    if limit < 2:
        return
    base = simple_sieve(math.isqrt(limit))
    lo = 2
    while lo <= limit:
        hi = min(lo + segment - 1, limit)
        mask = np.ones(hi - lo + 1, dtype=bool)
        for p in base.tolist():
            p2 = p * p
            if p2 > hi:
                break
            start = max(p2, ((lo + p - 1) // p) * p)
            mask[start - lo :: p] = False
        yield (lo + np.flatnonzero(mask)).astype(np.int64)
        lo = hi + 1


def prime_count(limit: int, segment: int = DEFAULT_SEGMENT) -> int:
    return sum(int(len(seg)) for seg in iter_primes(limit, segment))


def prime_powers(limit: int) -> Iterator[tuple[int, int, int]]:
    """Yield (p, j, p**j) for every prime power p^j <= limit, j >= 1.

    Sieves all primes up to limit, so this is meant for moderate limits;
    the lattice builder streams segments instead for its j = 1 pass.
    """
    for p in simple_sieve(limit).tolist():
        pj, j = p, 1
        while pj <= limit:
            yield p, j, pj
            j += 1
            pj *= p


def prime_power_mass(limit: int) -> Fraction:
    """Exact total prime-power mass sum_{p^j <= limit} 1/j."""
    total = Fraction(0)
    for _, j, _ in prime_powers(limit):
        total += Fraction(1, j)
    return total
