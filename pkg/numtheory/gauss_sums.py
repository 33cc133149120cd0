"""
Gauss Sums Module
Quadratic Gauss sums tau(chi, q), the multiplicative normalization G(chi_n, q)
and the Gauss-sum series for L(s, chi^(4) chi_n) left of the critical strip
"""

import cmath
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from analysis.special_functions import Parity, gamma_e_o
from numtheory.characters import jacobi_array, kronecker
from numtheory.factoring import FactoredInt, as_factored, euler_phi
from utils.errors import DomainError

_EXACT_PATTERN = re.compile(r"^(-?\d+)(?:\*(i))?(?:\*sqrt\((\d+)\))?$")


@dataclass(frozen=True)
class GaussSumValue:
    """A Gauss sum value, with an exact form when one is known"""

    value: complex
    exact_form: Optional[str] = None

    def evaluate_exact(self) -> Optional[complex]:
        """Numeric value of exact_form, e.g. "-3", "2*sqrt(15)" or "1*i*sqrt(3)" """
        if self.exact_form is None:
            return None
        match = _EXACT_PATTERN.match(self.exact_form)
        if match is None:
            raise DomainError(f"Unrecognized exact form {self.exact_form!r}")
        coefficient, imaginary, radicand = match.groups()
        value = complex(int(coefficient))
        if imaginary:
            value *= 1j
        if radicand:
            value *= math.sqrt(int(radicand))
        return value


class CharacterKind(Enum):
    JACOBI = "jacobi"          # chi_n = (./n), modulus n
    TWISTED = "twisted"        # chi^(4) chi_n, modulus 4n
    PSI = "psi"                # psi_j = chi^(4j), j in {1, -1, 2, -2}


@dataclass(frozen=True)
class CharacterSpec:
    """Which quadratic character a Gauss sum is taken over"""

    kind: CharacterKind
    j: int = 1

    def __post_init__(self):
        if self.kind is CharacterKind.PSI and self.j not in (1, -1, 2, -2):
            raise DomainError(f"psi_j needs j in (1, -1, 2, -2), got {self.j}")

    def modulus(self, n: int) -> int:
        if self.kind is CharacterKind.JACOBI:
            return n
        if self.kind is CharacterKind.TWISTED:
            return 4 * n
        return 4 * abs(self.j)

    def values(self, n: int, residues: np.ndarray) -> np.ndarray:
        if self.kind is CharacterKind.JACOBI:
            if n % 2 == 0:
                raise DomainError(f"chi_n needs odd n, got {n}")
            return jacobi_array(residues, n)
        if self.kind is CharacterKind.TWISTED:
            if n % 2 == 0:
                raise DomainError(f"chi^(4) chi_n needs odd n, got {n}")
            return np.where(residues % 2 == 1, jacobi_array(residues, n), 0)
        return np.array([kronecker(4 * self.j, int(r)) if r else 0 for r in residues],
                        dtype=np.int64)


JACOBI = CharacterSpec(CharacterKind.JACOBI)
TWISTED = CharacterSpec(CharacterKind.TWISTED)


def _as_spec(chi_spec: Union[CharacterSpec, str]) -> CharacterSpec:
    if isinstance(chi_spec, CharacterSpec):
        return chi_spec
    if isinstance(chi_spec, str):
        name, _, j = chi_spec.partition(":")
        try:
            return CharacterSpec(CharacterKind(name), int(j) if j else 1)
        except ValueError:
            pass
    raise DomainError(f"Unknown character descriptor {chi_spec!r}")


def tau_bruteforce(n: int, chi_spec: Union[CharacterSpec, str], q: int) -> GaussSumValue:
    """
    Gauss sum tau(chi, q) as the literal sum over residues mod the modulus

    Args:
        n (int): Odd positive n (ignored for psi_j)
        chi_spec: CharacterSpec or "jacobi", "twisted", "psi:<j>"
        q (int): Frequency

    Returns:
        GaussSumValue: The sum, without exact form
    """
    spec = _as_spec(chi_spec)
    n = int(n)
    if n < 1:
        raise DomainError(f"tau needs positive n, got {n}")
    modulus = spec.modulus(n)
    residues = np.arange(modulus, dtype=np.int64)
    chi = spec.values(n, residues)
    phases = np.exp(2j * np.pi * ((residues * (int(q) % modulus)) % modulus) / modulus)
    return GaussSumValue(complex(np.sum(chi * phases)))


def _valuation(q: int, p: int) -> int:
    a = 0
    while q % p == 0:
        q //= p
        a += 1
    return a


def _prime_power_G(p: int, k: int, q: int):
    """G(chi_{p^k}, q) as (integer coefficient, radicand)"""
    if k == 0:
        return 1, 1
    a = math.inf if q == 0 else _valuation(q, p)
    if k <= a:
        return (euler_phi(p**k), 1) if k % 2 == 0 else (0, 1)
    if k == a + 1:
        if k % 2 == 0:
            return -(p**a), 1
        return kronecker(q // p**a, p) * p**a, p
    return 0, 1


def gauss_G(n: Union[int, FactoredInt], q: int) -> GaussSumValue:
    """
    Normalized Gauss sum G(chi_n, q), multiplicative in odd n

    Args:
        n: Odd positive integer (factored or not)
        q (int): Non-negative frequency; q = 0 means every p-adic valuation is infinite

    Returns:
        GaussSumValue: Value with exact form "c" or "c*sqrt(r)"
    """
    n = as_factored(n)
    if not n.is_odd:
        raise DomainError(f"G(chi_n, q) needs odd n, got {n.value}")
    q = int(q)
    if q < 0:
        raise DomainError(f"G(chi_n, q) needs q >= 0, got {q}")
    coefficient, radicand = 1, 1
    for p, k in n.factors:
        c, r = _prime_power_G(p, k, q)
        coefficient *= c
        radicand *= r
        if coefficient == 0:
            return GaussSumValue(0j, "0")
    if radicand == 1:
        return GaussSumValue(complex(coefficient), str(coefficient))
    return GaussSumValue(complex(coefficient * math.sqrt(radicand)),
                         f"{coefficient}*sqrt({radicand})")


def gauss_G_array(n: Union[int, FactoredInt], q: np.ndarray) -> np.ndarray:
    """
    G(chi_n, q) over an array of positive q

    Args:
        n: Odd positive integer
        q (np.ndarray): Positive integers

    Returns:
        np.ndarray: float array (G is real)
    """
    n = as_factored(n)
    if not n.is_odd:
        raise DomainError(f"G(chi_n, q) needs odd n, got {n.value}")
    q = np.asarray(q, dtype=np.int64)
    result = np.ones(q.shape, dtype=float)
    for p, k in n.factors:
        a = np.zeros(q.shape, dtype=np.int64)
        unit = q.copy()
        # valuations above k + 1 all land in the k <= a rows
        for _ in range(k + 1):
            divisible = unit % p == 0
            a += divisible
            unit = np.where(divisible, unit // p, unit)
        power_a = np.power(float(p), a)
        legendre = jacobi_array(unit, p)
        odd_k = k % 2 == 1
        divides = 0.0 if odd_k else float(euler_phi(p**k))
        boundary = legendre * power_a * math.sqrt(p) if odd_k else -power_a
        value = np.where(a >= k, divides, np.where(a == k - 1, boundary, 0.0))
        result *= value
    return result


def tau_from_G(n: Union[int, FactoredInt], q: int) -> complex:
    """tau(chi_n, q) from G by undoing the normalization"""
    n = as_factored(n)
    G = gauss_G(n, q).value
    return G if n.value % 4 == 1 else 1j * G


def tau_twisted(n: Union[int, FactoredInt], q: int) -> GaussSumValue:
    """
    tau(chi^(4) chi_n, q) from the mod-4 case table

    Args:
        n: Odd positive integer
        q (int): Positive frequency

    Returns:
        GaussSumValue: Value, exact form when tau(chi_n, q) is real or imaginary
    """
    n = as_factored(n)
    if not n.is_odd:
        raise DomainError(f"chi^(4) chi_n needs odd n, got {n.value}")
    q = int(q)
    if q % 2 == 1:
        return GaussSumValue(0j, "0")
    factor = -2 if q % 4 == 2 else 2
    G = gauss_G(n, q)
    value = factor * tau_from_G(n, q)
    match = _EXACT_PATTERN.match(G.exact_form)
    coefficient, _, radicand = match.groups()
    coefficient = factor * int(coefficient)
    if coefficient == 0:
        return GaussSumValue(0j, "0")
    form = str(coefficient)
    if n.value % 4 == 3:
        form += "*i"
    if radicand:
        form += f"*sqrt({radicand})"
    return GaussSumValue(complex(value), form)


def is_perfect_square(n: int) -> bool:
    root = math.isqrt(n)
    return root * root == n


def gauss_series_l_value(n: Union[int, FactoredInt], s: complex, q_max: int = 200000) -> complex:
    """
    L(s, chi^(4) chi_n) from the Gauss-sum form of its functional equation

    The q-series converge absolutely only for Re s < 0; truncation is at
    q <= q_max.

    Args:
        n: Odd positive non-square integer
        s (complex): Point with Re s < 0
        q_max (int): Last q in the series

    Returns:
        complex: The truncated value
    """
    n = as_factored(n)
    s = complex(s)
    if not n.is_odd or is_perfect_square(n.value):
        raise DomainError(f"Gauss-sum series needs odd non-square n, got {n.value}")
    if s.real >= 0:
        raise DomainError(f"Gauss-sum series converges only for Re s < 0, got s={s}")

    q = np.arange(2, int(q_max) + 1, 2, dtype=np.int64)
    G = gauss_G_array(n, q)
    signs = np.where(q % 4 == 2, -1.0, 1.0)
    series = np.sum(signs * G * np.exp((s - 1) * np.log(q.astype(float))))

    parity = Parity.EVEN if n.value % 4 == 1 else Parity.ODD
    prefactor = 2 * cmath.exp((s - 0.5) * math.log(math.pi) - s * math.log(4 * n.value))
    return complex(prefactor * gamma_e_o(s, parity) * series)
