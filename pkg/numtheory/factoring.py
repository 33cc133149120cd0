"""
Factoring Module
Factored integers and the arithmetic functions read off a factorization
"""

import numbers
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, List, Tuple, Union

import sympy

from utils.errors import DomainError

MAX_VALUE = 2**63


@dataclass(frozen=True)
class FactoredInt:
    """A positive integer together with its prime factorization"""

    value: int
    factors: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        product = 1
        previous = 1
        for prime, exponent in self.factors:
            if prime <= previous or exponent < 1:
                raise DomainError(f"Malformed factorization {self.factors} of {self.value}")
            product *= prime**exponent
            previous = prime
        if product != self.value:
            raise DomainError(f"Factorization {self.factors} does not multiply to {self.value}")

    @property
    def primes(self) -> List[int]:
        return [p for p, _ in self.factors]

    @property
    def is_squarefree(self) -> bool:
        return all(e == 1 for _, e in self.factors)

    @property
    def is_odd(self) -> bool:
        return self.value % 2 == 1

    def __int__(self) -> int:
        return self.value

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return "*".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)


def factor(n: int) -> FactoredInt:
    """
    Factor a positive integer below 2^63

    sympy.factorint runs trial division, Pollard rho and p-1 with fixed
    seeds, so the result is deterministic.

    Args:
        n (int): Integer to factor

    Returns:
        FactoredInt: n with its factorization
    """
    if isinstance(n, bool) or not isinstance(n, numbers.Integral):
        raise DomainError(f"Cannot factor non-integer {n!r}")
    n = int(n)
    if n < 1:
        raise DomainError(f"Cannot factor non-positive integer {n}")
    if n >= MAX_VALUE:
        raise DomainError(f"{n} is outside the 64-bit range")
    return FactoredInt(n, tuple(sorted(sympy.factorint(n).items())))


def as_factored(n: Union[int, FactoredInt]) -> FactoredInt:
    return n if isinstance(n, FactoredInt) else factor(n)


def moebius(n: Union[int, FactoredInt]) -> int:
    n = as_factored(n)
    if not n.is_squarefree:
        return 0
    return -1 if len(n.factors) % 2 else 1


def euler_phi(n: Union[int, FactoredInt]) -> int:
    n = as_factored(n)
    result = 1
    for p, e in n.factors:
        result *= (p - 1) * p ** (e - 1)
    return result


def squarefree_divisors(n: Union[int, FactoredInt]) -> Iterator[Tuple[int, int]]:
    """
    Yield (r, moebius(r)) for every square-free divisor r of n

    Args:
        n: Integer or factored integer

    Yields:
        Tuple[int, int]: Divisor and its Moebius value
    """
    primes = as_factored(n).primes
    for size in range(len(primes) + 1):
        sign = -1 if size % 2 else 1
        for subset in combinations(primes, size):
            r = 1
            for p in subset:
                r *= p
            yield r, sign


def squarefree_decomposition(n: Union[int, FactoredInt]) -> Tuple[int, int]:
    """
    Split n as core * e^2 with core square-free

    Args:
        n: Integer or factored integer

    Returns:
        Tuple[int, int]: (core, e)
    """
    core, e = 1, 1
    for p, k in as_factored(n).factors:
        if k % 2:
            core *= p
        e *= p ** (k // 2)
    return core, e


@dataclass(frozen=True)
class TwistIndex:
    """The twist l: odd, square-free, positive"""

    l: FactoredInt

    def __post_init__(self):
        if not self.l.is_odd or not self.l.is_squarefree:
            raise DomainError(f"Twist l={self.l.value} must be odd and square-free")

    @classmethod
    def of(cls, l: Union[int, FactoredInt, "TwistIndex"]) -> "TwistIndex":
        if isinstance(l, TwistIndex):
            return l
        return cls(as_factored(l))

    @property
    def value(self) -> int:
        return self.l.value

    @property
    def primes(self) -> List[int]:
        return self.l.primes


@dataclass(frozen=True)
class QuadraticFamilyIndex:
    """Odd positive square-free d indexing the even primitive character chi^(8d)"""

    d: FactoredInt

    def __post_init__(self):
        if not self.d.is_odd or not self.d.is_squarefree:
            raise DomainError(f"d={self.d.value} must be odd and square-free")

    @classmethod
    def of(cls, d: Union[int, FactoredInt, "QuadraticFamilyIndex"]) -> "QuadraticFamilyIndex":
        if isinstance(d, QuadraticFamilyIndex):
            return d
        return cls(as_factored(d))

    @property
    def value(self) -> int:
        return self.d.value

    @property
    def conductor(self) -> int:
        return 8 * self.d.value
