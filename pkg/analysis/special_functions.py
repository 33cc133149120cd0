"""
Special Functions Module
Complex log-Gamma, the Gamma ratios of quadratic functional equations,
zeta with omitted Euler factors, and the upper incomplete Gamma function
"""

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np
from scipy import special

from numtheory.factoring import FactoredInt, as_factored
from utils.errors import ConvergenceError, DomainError, PoleError, StripError

logger = logging.getLogger(__name__)

# Largest |Im alpha| the harness has been exercised with
TESTED_IMAG_SHIFT = 5.0

ZETA_CORRECTION_TERMS = 10
ZETA_MIN_REAL = -20.0
_BERNOULLI = special.bernoulli(2 * ZETA_CORRECTION_TERMS)


class Parity(Enum):
    EVEN = "even"
    ODD = "odd"


class StripTag(Enum):
    ALL_MODULI = "all_moduli"      # 0 < |Re alpha| < 1/2
    PRIMITIVE = "primitive"        # |Re alpha| << 1/log X
    CENTRAL = "central"            # alpha -> 0 limit


@dataclass(frozen=True)
class ComplexShift:
    """The shift alpha in L(1/2 + alpha, chi) and the strip it is used in"""

    alpha: complex
    strip_tag: StripTag = StripTag.ALL_MODULI

    @classmethod
    def of(cls, alpha: Union[complex, "ComplexShift"],
           strip_tag: Optional[StripTag] = None) -> "ComplexShift":
        if isinstance(alpha, ComplexShift):
            return alpha if strip_tag is None else cls(alpha.alpha, strip_tag)
        alpha = complex(alpha)
        if strip_tag is None:
            strip_tag = StripTag.CENTRAL if alpha == 0 else StripTag.ALL_MODULI
        return cls(alpha, strip_tag)

    def validate(self, X: Optional[float] = None) -> "ComplexShift":
        """
        Check alpha against its strip

        Args:
            X (Optional[float]): Family size, used for the primitive-family advisory

        Returns:
            ComplexShift: self, for chaining
        """
        re = abs(self.alpha.real)
        if self.strip_tag is StripTag.ALL_MODULI and not 0 < re < 0.5:
            raise StripError(f"alpha={self.alpha} needs 0 < |Re alpha| < 1/2")
        if self.strip_tag is StripTag.PRIMITIVE:
            if self.alpha == 0:
                raise StripError("alpha = 0 is the central limit, not a primitive-family shift")
            if re >= 0.5:
                raise StripError(f"alpha={self.alpha} needs |Re alpha| < 1/2")
            if X is not None and X > 1 and re * math.log(X) > 1:
                logger.info("Re alpha=%.4g is large against 1/log X=%.4g", re, 1 / math.log(X))
        if self.strip_tag is StripTag.CENTRAL and self.alpha != 0:
            raise StripError(f"central limit needs alpha = 0, got {self.alpha}")
        if abs(self.alpha.imag) > TESTED_IMAG_SHIFT:
            logger.warning("|Im alpha|=%.3g exceeds %.1f: untested territory",
                           abs(self.alpha.imag), TESTED_IMAG_SHIFT)
        return self


def _is_pole(z: complex) -> bool:
    return z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real)


def log_gamma(z: complex) -> complex:
    """
    Principal branch of log Gamma(z)

    Args:
        z (complex): Point off the non-positive integers

    Returns:
        complex: log Gamma(z)
    """
    z = complex(z)
    if _is_pole(z):
        raise PoleError(f"Gamma has a pole at {z}")
    return complex(special.loggamma(z))


def gamma(z: complex) -> complex:
    return cmath.exp(log_gamma(z))


def gamma_ratio(a: complex, b: complex) -> complex:
    """Gamma(a) / Gamma(b) through log-Gamma"""
    return cmath.exp(log_gamma(a) - log_gamma(b))


def gamma_e_o(s: complex, parity: Parity) -> complex:
    """
    Gamma_e(s) = Gamma((1-s)/2) / Gamma(s/2), Gamma_o(s) = Gamma((2-s)/2) / Gamma((s+1)/2)

    Args:
        s (complex): Point
        parity (Parity): EVEN or ODD

    Returns:
        complex: The ratio
    """
    s = complex(s)
    if parity is Parity.EVEN:
        return gamma_ratio((1 - s) / 2, s / 2)
    return gamma_ratio((2 - s) / 2, (s + 1) / 2)


def gamma_alpha(alpha: Union[complex, ComplexShift]) -> complex:
    """(8/pi)^(-alpha) Gamma(1/4 - alpha/2) / Gamma(1/4 + alpha/2)"""
    if isinstance(alpha, ComplexShift):
        alpha = alpha.alpha
    alpha = complex(alpha)
    return cmath.exp(-alpha * math.log(8 / math.pi)) * gamma_ratio(0.25 - alpha / 2, 0.25 + alpha / 2)


def _zeta_euler_maclaurin(s: complex) -> complex:
    N = max(20, int(math.ceil(2 * abs(s.imag))))
    n = np.arange(1, N, dtype=float)
    total = complex(np.sum(np.exp(-s * np.log(n))))
    log_N = math.log(N)
    total += cmath.exp((1 - s) * log_N) / (s - 1) + cmath.exp(-s * log_N) / 2

    rising = s
    power = cmath.exp((-s - 1) * log_N)
    for k in range(1, ZETA_CORRECTION_TERMS + 1):
        total += _BERNOULLI[2 * k] / math.factorial(2 * k) * rising * power
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        power /= N * N
    return total


def zeta(s: complex) -> complex:
    """
    Riemann zeta by Euler-Maclaurin for Re s >= 0 and the functional equation below

    Args:
        s (complex): Point with Re s > -20, s != 1

    Returns:
        complex: zeta(s)
    """
    s = complex(s)
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    if s.real <= ZETA_MIN_REAL:
        raise DomainError(f"zeta is implemented for Re s > {ZETA_MIN_REAL}, got {s}")
    if s.real < 0:
        reflected = 1 - s
        return (cmath.exp(s * math.log(2) + (s - 1) * math.log(math.pi))
                * cmath.sin(math.pi * s / 2) * gamma(reflected) * _zeta_euler_maclaurin(reflected))
    return _zeta_euler_maclaurin(s)


def zeta_omit(s: complex, omit: Union[int, FactoredInt] = 1) -> complex:
    """
    zeta^(omit)(s): zeta(s) without the Euler factors at primes dividing omit

    Args:
        s (complex): Point, s != 1
        omit: Integer whose primes are removed

    Returns:
        complex: zeta(s) * prod_{p | omit} (1 - p^-s)
    """
    s = complex(s)
    value = zeta(s)
    for p in as_factored(omit).primes:
        value *= 1 - cmath.exp(-s * math.log(p))
    return value


def _incomplete_gamma_cf(a: complex, x: np.ndarray, max_iter: int = 1000) -> np.ndarray:
    # Modified Lentz on the Legendre continued fraction, good for x > |a|
    tiny = 1e-300
    b = x + 1 - a
    c = np.full(x.shape, 1 / tiny, dtype=complex)
    d = 1 / b
    h = d.copy()
    done = np.zeros(x.shape, dtype=bool)
    for i in range(1, max_iter + 1):
        an = -i * (i - a)
        b = b + 2
        d = an * d + b
        d = np.where(np.abs(d) < tiny, tiny, d)
        c = b + an / c
        c = np.where(np.abs(c) < tiny, tiny, c)
        d = 1 / d
        delta = d * c
        h = np.where(done, h, h * delta)
        done |= np.abs(delta - 1) < 1e-15
        if np.all(done):
            break
    else:
        raise ConvergenceError(f"Incomplete Gamma continued fraction stalled at a={a}")
    return np.exp(-x + a * np.log(x)) * h


def _incomplete_gamma_series(a: complex, x: np.ndarray, max_terms: int = 500) -> np.ndarray:
    log_x = np.log(x)
    if abs(a) < 0.5:
        # Gamma(a) - x^a/a written so the poles at a = 0 cancel analytically
        if a == 0:
            head = -np.euler_gamma - log_x
        else:
            head = (special.expm1(log_gamma(1 + a)) - special.expm1(a * log_x)) / a
        x_a = np.exp(a * log_x)
        total = np.zeros(x.shape, dtype=complex)
        term = np.ones(x.shape, dtype=float)
        for k in range(1, max_terms + 1):
            term = term * (-x) / k
            piece = term * x_a / (a + k)
            total += piece
            if np.all(np.abs(piece) <= 1e-17 * np.maximum(np.abs(head - total), 1e-300)):
                break
        else:
            raise ConvergenceError(f"Incomplete Gamma series stalled at a={a}")
        return head - total

    # Gamma(a) - gamma(a, x), lower function by its positive-term series
    term = np.full(x.shape, 1 / a, dtype=complex)
    total = term.copy()
    for k in range(1, max_terms + 1):
        term = term * x / (a + k)
        total += term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    else:
        raise ConvergenceError(f"Incomplete Gamma series stalled at a={a}")
    return gamma(a) - np.exp(a * log_x - x) * total


def upper_incomplete_gamma(a: complex, x) -> np.ndarray:
    """
    Gamma(a, x) for complex a and an array of positive real x

    Real positive a goes through scipy's regularized function; otherwise the
    continued fraction is used above x = 1.5|a| + 5 and a power series below.

    Args:
        a (complex): Parameter, not a non-positive integer unless |a| < 1/2
        x: Positive reals

    Returns:
        np.ndarray: complex values
    """
    a = complex(a)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise DomainError("upper_incomplete_gamma needs x > 0")
    if a.imag == 0 and a.real > 0:
        return (special.gammaincc(a.real, x) * special.gamma(a.real)).astype(complex)
    if _is_pole(a) and a != 0:
        raise PoleError(f"Gamma(a, x) series path has a pole at a={a}")

    out = np.empty(x.shape, dtype=complex)
    large = x > 1.5 * abs(a) + 5
    if np.any(large):
        out[large] = _incomplete_gamma_cf(a, x[large])
    if np.any(~large):
        out[~large] = _incomplete_gamma_series(a, x[~large])
    return out
