"""
Sieve Module
Segmented numpy sieves: primes, odd square-free integers, Moebius-weighted
multiplicative sums
"""

import math
from typing import Callable, Iterable, Iterator

import numpy as np

from utils.summation import NeumaierSum

SEGMENT_SIZE = 2**20

LocalFactor = Callable[[np.ndarray], np.ndarray]


def primes_up_to(limit: int) -> np.ndarray:
    """
    Primes p <= limit by a plain Eratosthenes sieve over odd numbers

    Args:
        limit (int): Upper bound, inclusive

    Returns:
        np.ndarray: int64 array of primes in ascending order
    """
    limit = int(limit)
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    # index i stands for 2*i + 1
    sieve = np.ones(limit // 2 + 1, dtype=bool)
    sieve[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if sieve[i]:
            p = 2 * i + 1
            sieve[p * p // 2 :: p] = False
    odd_primes = 2 * np.nonzero(sieve)[0] + 1
    odd_primes = odd_primes[odd_primes <= limit]
    return np.concatenate(([2], odd_primes)).astype(np.int64)


def _segment_bounds(start: int, stop: int, segment_size: int) -> Iterator[tuple]:
    lo = start
    while lo < stop:
        hi = min(lo + segment_size, stop)
        yield lo, hi
        lo = hi


def squarefree_segments(limit: int, start: int = 1, segment_size: int = SEGMENT_SIZE,
                        odd_only: bool = True) -> Iterator[np.ndarray]:
    """
    Yield arrays of the (odd) square-free integers in [start, limit], one per segment

    Args:
        limit (int): Upper bound, inclusive
        start (int): Lower bound, inclusive
        segment_size (int): Integers covered by one segment
        odd_only (bool): Drop even integers

    Yields:
        np.ndarray: Ascending int64 array for each segment
    """
    start = max(int(start), 1)
    stop = int(limit) + 1
    if stop <= start:
        return
    primes = primes_up_to(math.isqrt(stop - 1))
    for lo, hi in _segment_bounds(start, stop, segment_size):
        keep = np.ones(hi - lo, dtype=bool)
        if odd_only:
            keep[(-lo) % 2 :: 2] = False
        for p in primes:
            square = int(p) * int(p)
            if square >= hi:
                break
            keep[(-lo) % square :: square] = False
        yield np.arange(lo, hi, dtype=np.int64)[keep]


def squarefree_sieve(limit: int, segment_size: int = SEGMENT_SIZE) -> Iterator[int]:
    """Odd square-free integers in [1, limit], ascending"""
    for segment in squarefree_segments(limit, segment_size=segment_size):
        for d in segment:
            yield int(d)


def odd_squarefree_between(lo: int, hi: int) -> np.ndarray:
    """Odd square-free integers in [lo, hi] as one array"""
    parts = list(squarefree_segments(hi, start=lo))
    if not parts:
        return np.zeros(0, dtype=np.int64)
    return np.concatenate(parts)


def moebius_segment(lo: int, hi: int) -> np.ndarray:
    """
    Moebius function on [lo, hi)

    Args:
        lo (int): First integer, at least 1
        hi (int): One past the last integer

    Returns:
        np.ndarray: int64 array of mu(n)
    """
    values = multiplicative_segment(lo, hi, lambda p: np.ones(len(p)), squarefree=True)
    return np.rint(values.real).astype(np.int64)


def multiplicative_segment(lo: int, hi: int, local: LocalFactor, squarefree: bool = True,
                           exclude: Iterable[int] = ()) -> np.ndarray:
    """
    Values of a multiplicative function determined by one factor per prime

    With squarefree=True the value at n is mu(n) * prod_{p|n} local(p);
    otherwise it is prod_{p|n} local(p) over the distinct primes of n.
    Integers divisible by a prime in exclude get 0.

    Args:
        lo (int): First integer, at least 1
        hi (int): One past the last integer
        local (LocalFactor): Vectorized map from primes to their factor
        squarefree (bool): Moebius-weighted square-free version
        exclude (Iterable[int]): Primes whose multiples are dropped

    Returns:
        np.ndarray: complex array indexed by n - lo
    """
    lo = max(int(lo), 1)
    hi = int(hi)
    size = max(hi - lo, 0)
    values = np.ones(size, dtype=complex)
    if size == 0:
        return values
    remaining = np.arange(lo, hi, dtype=np.int64)

    primes = primes_up_to(math.isqrt(hi - 1))
    factors = np.asarray(local(primes), dtype=complex) if len(primes) else np.zeros(0, complex)
    sign = -1.0 if squarefree else 1.0
    for p, factor_p in zip(primes.tolist(), factors.tolist()):
        first = (-lo) % p
        values[first::p] *= sign * factor_p
        if squarefree:
            remaining[first::p] //= p
            values[(-lo) % (p * p) :: p * p] = 0
        else:
            power = p
            while power < hi:
                remaining[(-lo) % power :: power] //= p
                power *= p

    large = remaining > 1
    if np.any(large):
        values[large] *= sign * np.asarray(local(remaining[large]), dtype=complex)

    for p in exclude:
        p = int(p)
        values[(-lo) % p :: p] = 0
    return values


def multiplicative_sum(start: int, limit: int, local: LocalFactor, squarefree: bool = True,
                       exclude: Iterable[int] = (), segment_size: int = SEGMENT_SIZE) -> complex:
    """
    Sum of multiplicative_segment values over start <= n <= limit

    Segments are summed with numpy and combined in ascending order with a
    compensated accumulator.

    Args:
        start (int): First integer
        limit (int): Last integer, inclusive
        local (LocalFactor): Vectorized map from primes to their factor
        squarefree (bool): Moebius-weighted square-free version
        exclude (Iterable[int]): Primes whose multiples are dropped
        segment_size (int): Integers per segment

    Returns:
        complex: The sum
    """
    exclude = list(exclude)
    total = NeumaierSum()
    for lo, hi in _segment_bounds(max(int(start), 1), int(limit) + 1, segment_size):
        total.add(np.sum(multiplicative_segment(lo, hi, local, squarefree, exclude)))
    return total.value

