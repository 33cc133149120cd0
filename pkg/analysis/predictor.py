"""
Predictor Module
Closed-form main terms of the twisted first moment, their alpha -> 0 limit,
the recombination identities and the D_1 residue estimates
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from analysis.special_functions import (ComplexShift, Parity, StripTag, gamma_alpha, gamma_e_o,
                                        zeta, zeta_omit)
from analysis.weights import get_weight, mellin
from numtheory.factoring import TwistIndex, as_factored
from numtheory.gauss_sums import gauss_G_array
from numtheory.sieve import multiplicative_sum, primes_up_to
from utils.errors import DomainError, ExtrapolationError, StripError
from utils.summation import NeumaierSum

logger = logging.getLogger(__name__)

DEFAULT_PRIME_CUTOFF = 10**5
CENTRAL_EPSILON = 1e-4
CENTRAL_TOLERANCE = 1e-6
# Tail target and the largest A the resummation checks will sum to
RESUM_TAIL_TARGET = 1e-8
RESUM_MAX_A_CUTOFF = 2 * 10**7

Chain = Tuple[Tuple[str, int], ...]


@dataclass(frozen=True)
class EulerProductTruncation:
    """Prime cutoff of a truncated Euler product and a bound on the omitted log"""

    prime_cutoff: int
    tail_bound: float


@dataclass(frozen=True)
class EulerProductValue:
    value: complex
    truncation: EulerProductTruncation


@dataclass(frozen=True)
class MainTermBreakdown:
    """Both main terms with every factor that went into them"""

    term1: complex
    term2: complex
    inputs: Dict[str, object]
    component_values: Dict[str, complex]
    term1_chain: Chain
    term2_chain: Chain
    truncations: Dict[str, EulerProductTruncation] = field(default_factory=dict)

    @property
    def total(self) -> complex:
        return self.term1 + self.term2

    def _multiply(self, chain: Chain) -> complex:
        product = 1 + 0j
        for name, power in chain:
            product *= self.component_values[name] ** power
        return product

    def reproduce(self) -> Tuple[complex, complex]:
        """Recompute (term1, term2) from component_values"""
        return self._multiply(self.term1_chain), self._multiply(self.term2_chain)

    def to_dict(self) -> Dict[str, object]:
        return {
            "term1": _pair(self.term1),
            "term2": _pair(self.term2),
            "inputs": {k: (_pair(v) if isinstance(v, complex) else v) for k, v in self.inputs.items()},
            "component_values": {k: _pair(v) for k, v in self.component_values.items()},
            "term1_chain": [list(link) for link in self.term1_chain],
            "term2_chain": [list(link) for link in self.term2_chain],
            "truncations": {k: {"prime_cutoff": t.prime_cutoff, "tail_bound": t.tail_bound}
                            for k, t in self.truncations.items()},
        }


@dataclass(frozen=True)
class CentralPrediction:
    """alpha -> 0 limit of the main terms and its linear Q"""

    X: float
    l: int
    value: float
    q_coefficients: Tuple[float, float]
    extrapolation_gap: float
    epsilon: float

    def Q(self, log_X: float) -> float:
        c0, c1 = self.q_coefficients
        return c0 + c1 * log_X


@dataclass(frozen=True)
class D1Partial:
    value: complex
    tail_estimate: float
    cutoff: int


class ResumIdentity(Enum):
    """The two a-sum rearrangements behind the primitive main terms"""

    FIRST = "first"     # M11 + M21 -> B_alpha
    SECOND = "second"   # M12 + M22 -> B_-alpha


def _pair(z) -> List[float]:
    z = complex(z)
    return [z.real, z.imag]


def _power(base: float, exponent: complex) -> complex:
    return cmath.exp(exponent * math.log(base))


def _odd_primes(limit: int) -> np.ndarray:
    primes = primes_up_to(limit)
    return primes[primes > 2]


def _h(p) -> float:
    return p / (p + 1.0)


def b_alpha(l: Union[int, TwistIndex], alpha: complex,
            prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> EulerProductValue:
    """
    B_alpha(l) from its Euler product

    B_alpha(l) = prod_{p|l} h(p) prod_{p odd, p !| l} (1 - p^(-1-2 alpha)/(p+1)) with
    h(p) = p/(p+1). The factor 1/zeta^(2l)(2+2 alpha) is split off exactly so the
    truncated remainder converges like p^(-3-2 Re alpha).

    Args:
        l: Odd square-free twist
        alpha (complex): Shift with |Re alpha| < 1/2
        prime_cutoff (int): Largest prime kept in the remainder product

    Returns:
        EulerProductValue: Value with truncation metadata
    """
    l = TwistIndex.of(l)
    alpha = complex(alpha)
    if abs(alpha.real) >= 0.5:
        raise StripError(f"B_alpha needs |Re alpha| < 1/2, got {alpha}")
    s = 2 + 2 * alpha

    primes = _odd_primes(prime_cutoff)
    primes = primes[~np.isin(primes, l.primes)].astype(float)
    p_s = np.exp(-s * np.log(primes))
    log_remainder = np.sum(np.log1p(p_s / ((primes + 1) * (1 - p_s))))

    twist = 1.0
    for p in l.primes:
        twist *= _h(p)
    value = twist * cmath.exp(complex(log_remainder)) / zeta_omit(s, 2 * l.value)

    sigma = 2 + 2 * alpha.real
    tail = 4 * (prime_cutoff - 1) ** (-sigma) / sigma
    return EulerProductValue(complex(value), EulerProductTruncation(prime_cutoff, tail))


def _prod_l(l: TwistIndex, local) -> complex:
    product = 1 + 0j
    for p in l.primes:
        product *= local(p)
    return product


def _all_moduli_factors(l: TwistIndex, alpha: complex, weight: str) -> Dict[str, complex]:
    w = get_weight(weight)
    return {
        "1/2": 0.5 + 0j,
        "w_hat(1)": mellin(w, 1).value,
        "w_hat(1-alpha)": mellin(w, 1 - alpha).value,
        "gamma_alpha": gamma_alpha(alpha),
        "zeta2(1+2alpha)": zeta_omit(1 + 2 * alpha, 2),
        "zeta2(2+2alpha)": zeta_omit(2 + 2 * alpha, 2),
        "zeta2(1-2alpha)": zeta_omit(1 - 2 * alpha, 2),
        "zeta2(2)": zeta_omit(2, 2),
        "l^(-1/2-alpha)": _power(l.value, -0.5 - alpha),
        "l^(-1/2+alpha)": _power(l.value, -0.5 + alpha),
        "prod_l(1-1/p)/(1-p^(-2-2alpha))": _prod_l(
            l, lambda p: (1 - 1 / p) / (1 - _power(p, -2 - 2 * alpha))),
        "prod_l(1+1/p)^-1": _prod_l(l, _h),
    }


def predict_all_moduli(X: float, l: Union[int, TwistIndex], alpha: Union[complex, ComplexShift],
                       weight: str = "bump") -> MainTermBreakdown:
    """
    Main terms of the moment over all odd d

    Args:
        X (float): Family size
        l: Odd square-free twist
        alpha: Shift with 0 < |Re alpha| < 1/2
        weight (str): Registered weight name

    Returns:
        MainTermBreakdown: term1 (the X term) and term2 (the X^(1-alpha) term)
    """
    shift = ComplexShift.of(alpha, StripTag.ALL_MODULI).validate(X)
    return _all_moduli_breakdown(X, TwistIndex.of(l), shift.alpha, weight)


_ALL_MODULI_TERM1: Chain = (("X", 1), ("w_hat(1)", 1), ("1/2", 1), ("zeta2(1+2alpha)", 1),
                            ("zeta2(2+2alpha)", -1), ("l^(-1/2-alpha)", 1),
                            ("prod_l(1-1/p)/(1-p^(-2-2alpha))", 1))
_ALL_MODULI_TERM2: Chain = (("X^(1-alpha)", 1), ("w_hat(1-alpha)", 1), ("gamma_alpha", 1),
                            ("1/2", 1), ("zeta2(1-2alpha)", 1), ("zeta2(2)", -1),
                            ("l^(-1/2+alpha)", 1), ("prod_l(1+1/p)^-1", 1))


@lru_cache(maxsize=256)
def _cached_all_moduli_factors(l_value: int, alpha: complex, weight: str) -> Dict[str, complex]:
    return _all_moduli_factors(TwistIndex.of(l_value), alpha, weight)


def _all_moduli_breakdown(X: float, l: TwistIndex, alpha: complex, weight: str) -> MainTermBreakdown:
    components = dict(_cached_all_moduli_factors(l.value, alpha, weight))
    components["X"] = complex(X)
    components["X^(1-alpha)"] = _power(X, 1 - alpha)
    draft = MainTermBreakdown(0j, 0j, {}, components, _ALL_MODULI_TERM1, _ALL_MODULI_TERM2)
    term1, term2 = draft.reproduce()
    return MainTermBreakdown(
        term1, term2,
        {"family": "all_moduli", "X": float(X), "l": l.value, "alpha": alpha, "weight": weight},
        components, _ALL_MODULI_TERM1, _ALL_MODULI_TERM2,
    )


@lru_cache(maxsize=256)
def _primitive_factors(l_value: int, alpha: complex, weight: str,
                       prime_cutoff: int) -> Tuple[Dict[str, complex], Dict[str, EulerProductTruncation]]:
    l = TwistIndex.of(l_value)
    components = _all_moduli_factors(l, alpha, weight)
    plus = b_alpha(l, alpha, prime_cutoff)
    minus = b_alpha(l, -alpha, prime_cutoff)
    components["B_alpha(l)"] = plus.value
    components["B_-alpha(l)"] = minus.value
    return components, {"B_alpha(l)": plus.truncation, "B_-alpha(l)": minus.truncation}


_PRIMITIVE_TERM1: Chain = (("X", 1), ("w_hat(1)", 1), ("1/2", 1), ("zeta2(2)", -1),
                           ("l^(-1/2-alpha)", 1), ("zeta2(1+2alpha)", 1), ("B_alpha(l)", 1))
_PRIMITIVE_TERM2: Chain = (("X^(1-alpha)", 1), ("w_hat(1-alpha)", 1), ("gamma_alpha", 1),
                           ("1/2", 1), ("zeta2(2)", -1), ("l^(-1/2+alpha)", 1),
                           ("zeta2(1-2alpha)", 1), ("B_-alpha(l)", 1))


def _primitive_breakdown(X: float, l: TwistIndex, alpha: complex, weight: str,
                         prime_cutoff: int) -> MainTermBreakdown:
    factors, truncations = _primitive_factors(l.value, alpha, weight, prime_cutoff)
    components = dict(factors)
    components["X"] = complex(X)
    components["X^(1-alpha)"] = _power(X, 1 - alpha)
    draft = MainTermBreakdown(0j, 0j, {}, components, _PRIMITIVE_TERM1, _PRIMITIVE_TERM2)
    term1, term2 = draft.reproduce()
    return MainTermBreakdown(
        term1, term2,
        {"family": "primitive", "X": float(X), "l": l.value, "alpha": alpha, "weight": weight},
        components, _PRIMITIVE_TERM1, _PRIMITIVE_TERM2, dict(truncations),
    )


def predict_primitive(X: float, l: Union[int, TwistIndex], alpha: Union[complex, ComplexShift],
                      weight: str = "bump",
                      prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> MainTermBreakdown:
    """
    Main terms of the moment over odd square-free d

    alpha = 0 is handed to the central limit.

    Args:
        X (float): Family size
        l: Odd square-free twist
        alpha: Shift with |Re alpha| small against 1/log X
        weight (str): Registered weight name
        prime_cutoff (int): Prime cutoff for B_alpha(l) and B_-alpha(l)

    Returns:
        MainTermBreakdown: Terms plus B values and their truncations
    """
    l = TwistIndex.of(l)
    raw = alpha.alpha if isinstance(alpha, ComplexShift) else complex(alpha)
    if raw == 0:
        return central_breakdown(X, l, weight, prime_cutoff)
    shift = ComplexShift.of(raw, StripTag.PRIMITIVE).validate(X)
    return _primitive_breakdown(X, l, shift.alpha, weight, prime_cutoff)


def _family_breakdown(family: str, X: float, l: TwistIndex, alpha: complex, weight: str,
                      prime_cutoff: int) -> MainTermBreakdown:
    if family == "all_moduli":
        return _all_moduli_breakdown(X, l, alpha, weight)
    return _primitive_breakdown(X, l, alpha, weight, prime_cutoff)


def _symmetric_average(family: str, X: float, l: TwistIndex, epsilon: float, weight: str,
                       prime_cutoff: int) -> complex:
    plus = _family_breakdown(family, X, l, complex(epsilon), weight, prime_cutoff).total
    minus = _family_breakdown(family, X, l, complex(-epsilon), weight, prime_cutoff).total
    return (plus + minus) / 2


def _central_value(family: str, X: float, l: TwistIndex, epsilon: float, weight: str,
                   prime_cutoff: int) -> Tuple[float, float]:
    S1 = _symmetric_average(family, X, l, epsilon, weight, prime_cutoff)
    S2 = _symmetric_average(family, X, l, epsilon / 2, weight, prime_cutoff)
    S4 = _symmetric_average(family, X, l, epsilon / 4, weight, prime_cutoff)
    if abs(S1 - S2) > CENTRAL_TOLERANCE * abs(S2):
        raise ExtrapolationError(
            f"Symmetric averages at eps={epsilon} and eps/2 differ by "
            f"{abs(S1 - S2) / abs(S2):.3e} relative for X={X}, l={l.value}",
            abs(S1 - S2) / abs(S2),
        )
    R1 = (4 * S2 - S1) / 3
    R2 = (4 * S4 - S2) / 3
    value = (16 * R2 - R1) / 15
    return float(value.real), float(abs(R2 - R1) / abs(R2))


def predict_central(X: float, l: Union[int, TwistIndex] = 1, weight: str = "bump",
                    epsilon: float = CENTRAL_EPSILON,
                    prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
                    family: str = "primitive") -> CentralPrediction:
    """
    lim_{alpha -> 0} of term1 + term2

    The simple poles of zeta^(2)(1 +- 2 alpha) cancel between the two terms.
    The limit is taken from symmetric averages at +-eps, +-eps/2, +-eps/4 with
    two Richardson steps; Q comes from a linear fit of value/X against log X
    at X/e, X and X e.

    Args:
        X (float): Family size
        l: Twist; only l = 1 is covered by the closed form, other l are experimental
        weight (str): Registered weight name
        epsilon (float): Largest symmetric offset
        prime_cutoff (int): Prime cutoff for B
        family (str): "primitive" or "all_moduli"

    Returns:
        CentralPrediction: value, (Q0, Q1) with value = X (Q0 + Q1 log X), Richardson gap
    """
    l = TwistIndex.of(l)
    if l.value != 1:
        logger.info("Central limit for l=%d is experimental", l.value)
    value, gap = _central_value(family, X, l, epsilon, weight, prime_cutoff)

    log_X = math.log(X)
    logs = np.array([log_X - 1, log_X, log_X + 1])
    normalized = []
    for log_Y in logs:
        Y = math.exp(log_Y)
        y_value = value if log_Y == log_X else _central_value(family, Y, l, epsilon, weight,
                                                               prime_cutoff)[0]
        normalized.append(y_value / Y)
    c1, c0 = np.polyfit(logs, np.array(normalized), 1)
    return CentralPrediction(float(X), l.value, value, (float(c0), float(c1)), gap, epsilon)


def central_breakdown(X: float, l: Union[int, TwistIndex] = 1, weight: str = "bump",
                      prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
                      family: str = "primitive") -> MainTermBreakdown:
    """The central limit packaged as a breakdown: term1 carries the limit, term2 is 0"""
    l = TwistIndex.of(l)
    central = predict_central(X, l, weight, prime_cutoff=prime_cutoff, family=family)
    components = {
        "X": complex(X),
        "value/X": complex(central.value / X),
        "Q0": complex(central.q_coefficients[0]),
        "Q1": complex(central.q_coefficients[1]),
        "extrapolation_gap": complex(central.extrapolation_gap),
    }
    return MainTermBreakdown(
        complex(central.value), 0j,
        {"family": family, "central": True, "X": float(X), "l": l.value, "alpha": 0j,
         "weight": weight},
        components, (("X", 1), ("value/X", 1)), (),
    )


def predict_moment(family: str, X: float, l: Union[int, TwistIndex], alpha: complex,
                   weight: str = "bump",
                   prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> MainTermBreakdown:
    """Main terms a moment run subtracts: the central limit at alpha = 0, the closed forms otherwise"""
    alpha = complex(alpha)
    if alpha == 0:
        return central_breakdown(X, l, weight, prime_cutoff, family)
    if family == "all_moduli":
        return predict_all_moduli(X, l, alpha, weight)
    return predict_primitive(X, l, alpha, weight, prime_cutoff)


def _prefactor_first(X: float, l: TwistIndex, alpha: complex, weight: str) -> complex:
    w = get_weight(weight)
    return (X * mellin(w, 1).value / 2 * _power(l.value, -0.5 - alpha)
            * zeta_omit(1 + 2 * alpha, 2) / zeta_omit(2 + 2 * alpha, 2)
            * _prod_l(l, lambda p: (1 - 1 / p) / (1 - _power(p, -2 - 2 * alpha))))


def _prefactor_second(X: float, l: TwistIndex, alpha: complex, weight: str) -> complex:
    w = get_weight(weight)
    return (_power(X, 1 - alpha) * mellin(w, 1 - alpha).value * gamma_alpha(alpha) / 2
            * _power(l.value, -0.5 + alpha) * zeta_omit(1 - 2 * alpha, 2) / zeta_omit(2, 2)
            * _prod_l(l, _h))


def _first_local(alpha: complex):
    u, v = 1 + 2 * alpha, 2 + 2 * alpha

    def local(p):
        p = np.asarray(p, dtype=float)
        return p ** -2.0 * (1 - np.exp(-u * np.log(p))) / (1 - np.exp(-v * np.log(p)))
    return local


def _second_local(alpha: complex):
    def local(p):
        p = np.asarray(p, dtype=float)
        return np.exp((-2 + 2 * alpha) * np.log(p)) * _h(p)
    return local


def _a_sum(identity: ResumIdentity, l: TwistIndex, alpha: complex, start: int, stop: int) -> complex:
    local = _first_local(alpha) if identity is ResumIdentity.FIRST else _second_local(alpha)
    if stop < start:
        return 0j
    return multiplicative_sum(start, stop, local, squarefree=True, exclude=[2] + l.primes)


def resum_a_cutoff(identity: ResumIdentity, alpha: complex,
                   tail_target: float = RESUM_TAIL_TARGET) -> int:
    """
    Smallest A whose a-sum tail estimate is below tail_target

    The a-terms carry mu(a), so the tail past A is taken as A^(-3/2) for FIRST
    and A^(-3/2 + 2 Re alpha) for SECOND. A is capped at RESUM_MAX_A_CUTOFF.
    """
    alpha = complex(alpha)
    exponent = -1.5 if identity is ResumIdentity.FIRST else -1.5 + 2 * alpha.real
    a_cutoff = int(math.ceil(tail_target ** (1 / exponent)))
    if a_cutoff > RESUM_MAX_A_CUTOFF:
        logger.warning("Resummation %s at alpha=%s needs A=%d for tail %.0e; capped at %d",
                       identity.value, alpha, a_cutoff, tail_target, RESUM_MAX_A_CUTOFF)
        return RESUM_MAX_A_CUTOFF
    return a_cutoff


def resum_identity_check(l: Union[int, TwistIndex], alpha: Union[complex, ComplexShift], Y: int,
                         prime_cutoff: int = DEFAULT_PRIME_CUTOFF,
                         identity: ResumIdentity = ResumIdentity.FIRST,
                         a_cutoff: Optional[int] = None) -> float:
    """
    Residual of an a-sum recombination against its B_alpha closed form

    FIRST: zeta^(2)(1+2a)/zeta^(2)(2+2a) prod_{p|l}(1-1/p)/(1-p^(-2-2a))
    sum_{(a,2l)=1} mu(a) a^-2 zeta^(2a)(1+2a)/zeta^(2a)(2+2a) against
    zeta^(2)(1+2a) B_alpha(l) / zeta^(2)(2).
    SECOND: prod_{p|l} h(p) sum_{(a,2l)=1} mu(a) a^(-2+2a) prod_{p|a} h(p)
    against B_-alpha(l).
    The a-sum is taken as its a <= Y part plus Y < a <= A, with A from
    resum_a_cutoff unless given.

    Args:
        l: Odd square-free twist
        alpha: Nonzero shift with |Re alpha| < 1/2
        Y (int): Split point of the a-sum
        prime_cutoff (int): Prime cutoff for B
        identity (ResumIdentity): Which recombination
        a_cutoff (Optional[int]): Last a in the direct sum; None derives it from the tail target

    Returns:
        float: |LHS - RHS|
    """
    l = TwistIndex.of(l)
    alpha = alpha.alpha if isinstance(alpha, ComplexShift) else complex(alpha)
    if alpha == 0:
        raise StripError("Resummation identities need alpha != 0")
    Y = int(Y)
    if a_cutoff is None:
        a_cutoff = resum_a_cutoff(identity, alpha)
    if not 1 <= Y <= a_cutoff:
        raise DomainError(f"Y={Y} must lie in [1, {a_cutoff}]")

    a_sum = NeumaierSum()
    a_sum.add(_a_sum(identity, l, alpha, 1, Y))
    a_sum.add(_a_sum(identity, l, alpha, Y + 1, a_cutoff))

    if identity is ResumIdentity.FIRST:
        lhs = (zeta_omit(1 + 2 * alpha, 2) / zeta_omit(2 + 2 * alpha, 2)
               * _prod_l(l, lambda p: (1 - 1 / p) / (1 - _power(p, -2 - 2 * alpha))) * a_sum.value)
        rhs = zeta_omit(1 + 2 * alpha, 2) * b_alpha(l, alpha, prime_cutoff).value / zeta_omit(2, 2)
    else:
        lhs = _prod_l(l, _h) * a_sum.value
        rhs = b_alpha(l, -alpha, prime_cutoff).value
    logger.debug("Resummation %s summed to A=%d", identity.value, a_cutoff)
    return float(abs(lhs - rhs))


def predict_decomposition(X: float, l: Union[int, TwistIndex], alpha: complex, Y: int,
                          weight: str = "bump",
                          prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> Dict[str, complex]:
    """
    Main terms of the a <= Y strata (M11, M12) and of the rest (M21, M22)

    Args:
        X (float): Family size
        l: Odd square-free twist
        alpha (complex): Nonzero shift
        Y (int): Split point
        weight (str): Registered weight name
        prime_cutoff (int): Prime cutoff for B

    Returns:
        Dict[str, complex]: M11, M12, M21, M22, total1, total2
    """
    l = TwistIndex.of(l)
    alpha = complex(alpha)
    totals = predict_primitive(X, l, alpha, weight, prime_cutoff)
    M11 = _prefactor_first(X, l, alpha, weight) * _a_sum(ResumIdentity.FIRST, l, alpha, 1, int(Y))
    M12 = _prefactor_second(X, l, alpha, weight) * _a_sum(ResumIdentity.SECOND, l, alpha, 1, int(Y))
    return {
        "M11": M11,
        "M12": M12,
        "M21": totals.term1 - M11,
        "M22": totals.term2 - M12,
        "total1": totals.term1,
        "total2": totals.term2,
    }


def recursive_error_budget(X: float, l: Union[int, TwistIndex], Y: float, delta: float,
                           f: float) -> Dict[str, float]:
    """
    Sizes of the two error terms of the square-free recursion, implied constants 1

    E1 = X^delta Y^(1-2 delta) l^(1/2) from the a <= Y strata and
    E2 = X^f Y^(1-2f) l^(1/2) from the rest; Y = X^(1/2) balances them.
    """
    l = TwistIndex.of(l)
    root_l = math.sqrt(l.value)

    def budget(y):
        return (X ** delta * y ** (1 - 2 * delta) * root_l, X ** f * y ** (1 - 2 * f) * root_l)

    E1, E2 = budget(Y)
    Y_opt = math.sqrt(X)
    E1_opt, E2_opt = budget(Y_opt)
    return {"E1": E1, "E2": E2, "total": E1 + E2, "Y_opt": Y_opt, "total_at_Y_opt": E1_opt + E2_opt}


def residue_s1(l: Union[int, TwistIndex], alpha: complex) -> complex:
    """Res_{s=1} A(s, 1/2 + alpha; l), from zeta and explicit local factors"""
    l = TwistIndex.of(l)
    alpha = complex(alpha)
    u, v = 1 + 2 * alpha, 2 + 2 * alpha
    value = zeta(u) * (1 - 2 ** -u) / (zeta(v) * (1 - 2 ** -v))
    for p in l.primes:
        value *= (1 - 1 / p) / (1 - p ** -v)
    return value / (2 * l.value ** (0.5 + alpha))


def residue_s1_minus_alpha(l: Union[int, TwistIndex], alpha: complex) -> complex:
    """
    Res_{s=1-alpha} A(s, 1/2 + alpha; l) through (Gamma_e + Gamma_o)(1 - alpha) zeta(2 alpha)

    Args:
        l: Odd square-free twist
        alpha (complex): Shift with 0 < |Re alpha| < 1/2

    Returns:
        complex: The residue
    """
    l = TwistIndex.of(l)
    alpha = complex(alpha)
    gammas = gamma_e_o(1 - alpha, Parity.EVEN) + gamma_e_o(1 - alpha, Parity.ODD)
    zeta2_two = zeta(2) * (1 - 2 ** -2)
    value = (2 ** (-1 - alpha) * (1 - 2 ** (-(1 - 2 * alpha))) * math.pi ** (0.5 - alpha)
             * l.value ** (-0.5 + alpha) * gammas * zeta(2 * alpha) / (2 * zeta2_two))
    for p in l.primes:
        value /= 1 + 1 / p
    return value


def d1_partial(s: complex, w: complex, l: Union[int, TwistIndex], M: int) -> D1Partial:
    """
    sum_{m, q odd, m, q <= M} G(chi_{ml}, q^2) m^-w q^-2s

    Args:
        s (complex): Re s >= 2
        w (complex): Re w > 3/2
        l: Odd square-free twist
        M (int): Cutoff for both m and q

    Returns:
        D1Partial: Truncated sum and a tail estimate from |G(chi_n, q^2)| <= sqrt(n) q
    """
    l = TwistIndex.of(l)
    s, w = complex(s), complex(w)
    if s.real < 2 or w.real <= 1.5:
        raise DomainError(f"d1_partial needs Re s >= 2 and Re w > 3/2, got s={s}, w={w}")
    M = int(M)
    q = np.arange(1, M + 1, 2, dtype=np.int64)
    q_weights = np.exp(-2 * s * np.log(q.astype(float)))

    total = NeumaierSum()
    for m in range(1, M + 1, 2):
        G = gauss_G_array(as_factored(m * l.value), q * q)
        total.add(cmath.exp(-w * math.log(m)) * complex(np.sum(G * q_weights)))

    def odd_tail(beta: float) -> float:
        return M ** (1 - beta) / (2 * (beta - 1)) + M ** -beta

    sigma_s, sigma_w = s.real, w.real
    tail = math.sqrt(l.value) * (
        odd_tail(sigma_w - 0.5) * zeta_omit(2 * sigma_s - 1, 2).real
        + zeta_omit(sigma_w - 0.5, 2).real * odd_tail(2 * sigma_s - 1)
    )
    return D1Partial(total.value, tail, M)


def _d1_local(primes: np.ndarray, in_l: np.ndarray, s: complex, w: complex) -> np.ndarray:
    log_p = np.log(primes)
    phi_ratio = 1 - 1 / primes
    y = np.exp(-2 * s * log_p)

    partial = np.where(in_l, 0j, 1 + 0j)
    local = np.zeros(primes.shape, dtype=complex)
    y_power = np.ones(primes.shape, dtype=complex)
    for b in range(200):
        if b > 0:
            # phi(p^2b) x^2b off l, phi(p^2b) x^(2b-1) on l
            exponent = np.where(in_l, 2 * b - (2 * b - 1) * w, 2 * b * (1 - w))
            partial = partial + phi_ratio * np.exp(exponent * log_p)
        boundary = np.where(in_l, (2 * b + 0.5) - 2 * b * w, (2 * b + 0.5) - (2 * b + 1) * w)
        term = y_power * (partial + np.exp(boundary * log_p))
        local += term
        if np.max(np.abs(term)) < 1e-18 * np.min(np.abs(local)):
            break
        y_power = y_power * y
    return local * (1 - np.exp((0.5 - w) * log_p))


def d1_euler(s: complex, w: complex, l: Union[int, TwistIndex],
             prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> EulerProductValue:
    """
    D_1(s, w; l) as zeta^(2)(w - 1/2) times a convergent Euler product

    Args:
        s (complex): Re s >= 1
        w (complex): Re w > 1
        l: Odd square-free twist
        prime_cutoff (int): Largest prime in the product

    Returns:
        EulerProductValue: Value with truncation metadata
    """
    l = TwistIndex.of(l)
    s, w = complex(s), complex(w)
    sigma_s, sigma_w = s.real, w.real
    decay = min(2 * sigma_w - 1, 2 * sigma_s, 2 * sigma_s + 2 * sigma_w - 2,
                2 * sigma_s + 3 * sigma_w - 2.5)
    if decay <= 1:
        raise DomainError(f"D_1 Euler product does not converge at s={s}, w={w}")
    primes = _odd_primes(max(prime_cutoff, max(l.primes, default=3)))
    in_l = np.isin(primes, l.primes)
    local = _d1_local(primes.astype(float), in_l, s, w)
    value = zeta_omit(w - 0.5, 2) * cmath.exp(complex(np.sum(np.log(local))))
    tail = 4 * (prime_cutoff - 1) ** (1 - decay) / (decay - 1)
    return EulerProductValue(complex(value), EulerProductTruncation(prime_cutoff, tail))


def d1_residue_estimate(l: Union[int, TwistIndex] = 1, s: float = 2.0,
                     steps: Tuple[float, float, float] = (0.4, 0.2, 0.1),
                     prime_cutoff: int = DEFAULT_PRIME_CUTOFF) -> Dict[str, float]:
    """
    Richardson extrapolation of h D_1(s, 3/2 + h; l) to h = 0

    Returns:
        Dict[str, float]: extrapolated value, expected residue and their relative gap
    """
    l = TwistIndex.of(l)
    F = [h * d1_euler(s, 1.5 + h, l, prime_cutoff).value for h in steps]
    R1 = 2 * F[1] - F[0]
    R2 = 2 * F[2] - F[1]
    extrapolated = (4 * R2 - R1) / 3
    expected = (math.sqrt(l.value) * zeta_omit(2 * s, 2) / (2 * zeta_omit(2, 2))
                * _prod_l(l, _h))
    return {
        "extrapolated": float(extrapolated.real),
        "expected": float(complex(expected).real),
        "relative_gap": float(abs(extrapolated - expected) / abs(expected)),
    }
