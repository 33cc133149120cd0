"""
L-functions Module
Values of L(s, chi^(8d)) from the smoothed approximate functional equation
"""

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from analysis.special_functions import log_gamma, upper_incomplete_gamma
from numtheory.characters import kronecker, quadratic_character
from numtheory.factoring import (FactoredInt, QuadraticFamilyIndex, as_factored,
                                 squarefree_decomposition)
from utils.config import AFE_CUTOFF_CONSTANT
from utils.errors import DomainError

logger = logging.getLogger(__name__)

MAX_IMAG = 50.0
# theta-integral split point for the second, independent evaluation
DIRECT_SERIES_SPLIT = 1.0 / 16.0
_EPS = np.finfo(float).eps


class Method(Enum):
    SMOOTHED_AFE = "smoothed_afe"
    DIRECT_SERIES = "direct_series"

    @property
    def code(self) -> int:
        return 1 if self is Method.SMOOTHED_AFE else 2

    @classmethod
    def from_code(cls, code: int) -> "Method":
        return cls.SMOOTHED_AFE if code == 1 else cls.DIRECT_SERIES


@dataclass(frozen=True)
class LValueRecord:
    """One computed value of L(s, chi^(8d))"""

    d: int
    s: complex
    value: complex
    abs_error: float
    method: Method
    terms_used: int

    def admissible(self, threshold: float) -> bool:
        return self.abs_error <= threshold

    def to_dict(self) -> Dict[str, object]:
        return {
            "d": self.d,
            "s": [self.s.real, self.s.imag],
            "value": [self.value.real, self.value.imag],
            "abs_error": self.abs_error,
            "method": self.method.value,
            "terms_used": self.terms_used,
        }


def _check_window(s: complex) -> None:
    if not 0 < s.real < 3 or abs(s.imag) > MAX_IMAG:
        raise DomainError(f"s={s} is outside 0 < Re s < 3, |Im s| <= {MAX_IMAG}")


def afe_sum(d: int, s: complex, split: float = 1.0,
            cutoff_constant: float = AFE_CUTOFF_CONSTANT) -> Tuple[complex, float, int]:
    """
    Both theta-integral sums for L(s, chi^(8d)), before any rounding of the result

    Args:
        d (int): Odd positive square-free d
        s (complex): Point
        split (float): Theta split point; 1 is the self-dual smoothed AFE
        cutoff_constant (float): C in n <= C sqrt(N (1 + |Im s|) / split^(+-1))

    Returns:
        Tuple[complex, float, int]: Raw value, error bound, terms used
    """
    conductor = 8 * d
    scale = conductor / math.pi
    height = 1 + abs(s.imag)

    n_first = int(math.ceil(cutoff_constant * math.sqrt(conductor * height / split)))
    n_second = int(math.ceil(cutoff_constant * math.sqrt(conductor * height * split)))

    log_gamma_half_s = log_gamma(s / 2)
    dual_factor = cmath.exp((s - 0.5) * math.log(math.pi / conductor) - log_gamma_half_s)

    def first(n):
        x = n * n * split / scale
        return np.exp(-s * np.log(n) - log_gamma_half_s) * upper_incomplete_gamma(s / 2, x)

    def second(n):
        x = n * n / (split * scale)
        return dual_factor * np.exp((s - 1) * np.log(n)) * upper_incomplete_gamma((1 - s) / 2, x)

    total = 0j
    magnitude = 0.0
    terms = 0
    for series, n_max in ((first, n_first), (second, n_second)):
        n = np.arange(1, n_max + 1, dtype=np.int64)
        chi = quadratic_character(d, n)
        live = chi != 0
        values = chi[live] * series(n[live].astype(float))
        total += complex(np.sum(values))
        magnitude += float(np.sum(np.abs(values)))
        terms += int(np.count_nonzero(live))

    # Terms decay like exp(-n^2), so twice the first omitted envelope bounds the tail
    tail = 2 * (abs(first(np.array([n_first + 1.0]))[0])
                + abs(second(np.array([n_second + 1.0]))[0]))
    abs_error = tail + 4 * _EPS * magnitude + _EPS * abs(total)
    return total, abs_error, terms


def l_value(d: Union[int, FactoredInt, QuadraticFamilyIndex], s: complex,
            method: Method = Method.SMOOTHED_AFE,
            cutoff_constant: float = AFE_CUTOFF_CONSTANT) -> LValueRecord:
    """
    L(s, chi^(8d)) for odd square-free d

    Both methods split the theta integral of the completed L-function; the
    smoothed AFE splits at the self-dual point, the direct series at
    DIRECT_SERIES_SPLIT, so the two use different terms and cutoffs.

    Args:
        d: Odd positive square-free d
        s (complex): Point with 0 < Re s < 3, |Im s| <= 50
        method (Method): SMOOTHED_AFE or DIRECT_SERIES
        cutoff_constant (float): C in n <= C sqrt(N (1 + |Im s|))

    Returns:
        LValueRecord: Value, error bound and term count
    """
    index = QuadraticFamilyIndex.of(d)
    s = complex(s)
    _check_window(s)
    split = 1.0 if method is Method.SMOOTHED_AFE else DIRECT_SERIES_SPLIT
    value, abs_error, terms = afe_sum(index.value, s, split, cutoff_constant)
    if s.imag == 0:
        # L is real on the real axis; whatever imaginary part rounding left goes into the bound
        abs_error += abs(value.imag)
        value = complex(value.real, 0.0)
    return LValueRecord(index.value, s, value, abs_error, method, terms)


def euler_factor_product(d: int, s: complex, omit: Union[int, FactoredInt]) -> complex:
    """prod_{p | omit} (1 - chi^(8d)(p) p^-s)"""
    s = complex(s)
    product = 1 + 0j
    for p in as_factored(omit).primes:
        product *= 1 - kronecker(8 * d, p) * cmath.exp(-s * math.log(p))
    return product


def l_value_omit(d: Union[int, FactoredInt, QuadraticFamilyIndex], s: complex,
                 omit: Union[int, FactoredInt], method: Method = Method.SMOOTHED_AFE) -> LValueRecord:
    """L^(omit)(s, chi^(8d)): the Euler factors at primes dividing omit removed"""
    record = l_value(d, s, method)
    return scale_record(record, euler_factor_product(record.d, record.s, omit))


def scale_record(record: LValueRecord, factor: complex) -> LValueRecord:
    return LValueRecord(record.d, record.s, record.value * factor,
                        record.abs_error * abs(factor) + _EPS * abs(record.value * factor),
                        record.method, record.terms_used)


def imprimitive_l_value(d: int, s: complex, core_record: Optional[LValueRecord] = None) -> LValueRecord:
    """
    L(s, chi^(8d)) for any odd d, from the primitive core d0 with d = d0 e^2

    Args:
        d (int): Odd positive integer
        s (complex): Point in the l_value window
        core_record (LValueRecord): Precomputed record for d0, if available

    Returns:
        LValueRecord: Record carrying the imprimitive modulus d
    """
    d = int(d)
    if d < 1 or d % 2 == 0:
        raise DomainError(f"Imprimitive L-value needs odd positive d, got {d}")
    core, e = squarefree_decomposition(d)
    if core_record is None:
        core_record = l_value(core, s)
    elif core_record.d != core:
        raise DomainError(f"Core record for d={core_record.d} does not match core {core} of {d}")
    scaled = scale_record(core_record, euler_factor_product(core, core_record.s, e))
    return LValueRecord(d, scaled.s, scaled.value, scaled.abs_error, scaled.method,
                        scaled.terms_used)


def completed_l_value(record: LValueRecord) -> complex:
    """Lambda(s) = (N/pi)^(s/2) Gamma(s/2) L(s) for the conductor N = 8d"""
    s = record.s
    return cmath.exp(s / 2 * math.log(8 * record.d / math.pi) + log_gamma(s / 2)) * record.value


def l_values(ds: Iterable[int], s: complex, method: Method = Method.SMOOTHED_AFE,
             cutoff_constant: float = AFE_CUTOFF_CONSTANT) -> List[LValueRecord]:
    """Records for several d at one s, in the order given"""
    return [l_value(int(d), s, method, cutoff_constant) for d in ds]
