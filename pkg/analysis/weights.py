"""
Weights Module
Compactly supported smooth weights and their Mellin transforms
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import numpy as np
from scipy import integrate

from utils.errors import ConvergenceError, DomainError

logger = logging.getLogger(__name__)

QUAD_TOLERANCE = 1e-10
QUAD_LIMIT = 400
# Above this |Im s| QUADPACK's Fourier rule replaces the plain cos and sin integrands
OSCILLATORY_THRESHOLD = 20.0


@dataclass(frozen=True)
class SmoothWeight:
    """A non-negative smooth weight supported on [t0, t1]"""

    name: str
    support: Tuple[float, float]
    evaluate: Callable[[np.ndarray], np.ndarray]
    smoothness_order: int = 8

    def __post_init__(self):
        t0, t1 = self.support
        if not 0 < t0 < t1:
            raise DomainError(f"Weight {self.name} needs support 0 < t0 < t1, got {self.support}")
        if self.smoothness_order < 3:
            raise DomainError(f"Weight {self.name} needs smoothness order >= 3")

    def __call__(self, t):
        scalar = np.ndim(t) == 0
        t = np.atleast_1d(np.asarray(t, dtype=float))
        t0, t1 = self.support
        inside = (t > t0) & (t < t1)
        values = np.zeros(t.shape, dtype=float)
        if np.any(inside):
            values[inside] = self.evaluate(t[inside])
        return float(values[0]) if scalar else values

    @staticmethod
    def combine(first: "SmoothWeight", second: "SmoothWeight") -> "SmoothWeight":
        """Pointwise sum of two weights"""
        support = (min(first.support[0], second.support[0]),
                   max(first.support[1], second.support[1]))
        return SmoothWeight(
            name=f"{first.name}+{second.name}",
            support=support,
            evaluate=lambda t: first(t) + second(t),
            smoothness_order=min(first.smoothness_order, second.smoothness_order),
        )


@dataclass(frozen=True)
class MellinValue:
    s: complex
    value: complex
    abs_error_bound: float


def _bump(center: float, half_width: float) -> Callable[[np.ndarray], np.ndarray]:
    def evaluate(t: np.ndarray) -> np.ndarray:
        u = (t - center) / half_width
        return np.exp(1.0 - 1.0 / (1.0 - u * u))
    return evaluate


BUMP = SmoothWeight("bump", (1.0, 2.0), _bump(1.5, 0.5), smoothness_order=64)
NARROW_BUMP = SmoothWeight("narrowbump", (1.25, 1.75), _bump(1.5, 0.25), smoothness_order=64)
# e^-t cut to a finite window; the cut is far below double precision at t = 60
EXP_DECAY = SmoothWeight("expdecay", (1e-8, 60.0), lambda t: np.exp(-t), smoothness_order=64)

WEIGHTS: Dict[str, SmoothWeight] = {w.name: w for w in (BUMP, NARROW_BUMP, EXP_DECAY)}


def get_weight(name: str) -> SmoothWeight:
    """
    Look up a weight by name; "a+b" builds the sum of two registered weights

    Args:
        name (str): Registered name

    Returns:
        SmoothWeight: The weight
    """
    if name in WEIGHTS:
        return WEIGHTS[name]
    if "+" in name:
        parts = [get_weight(part) for part in name.split("+")]
        combined = parts[0]
        for part in parts[1:]:
            combined = SmoothWeight.combine(combined, part)
        return combined
    raise DomainError(f"Unknown weight {name!r}; known weights: {sorted(WEIGHTS)}")


def _quad(func, lo, hi, **kwargs):
    result = integrate.quad(func, lo, hi, epsabs=QUAD_TOLERANCE, epsrel=QUAD_TOLERANCE,
                            limit=QUAD_LIMIT, full_output=1, **kwargs)
    if len(result) > 3:
        raise ConvergenceError(f"Mellin quadrature did not converge: {result[3]}")
    return result[0], result[1]


def _mellin(w: SmoothWeight, s: complex, log_power: int, panels: int) -> MellinValue:
    s = complex(s)
    sigma, tau = s.real, s.imag
    if panels < 1:
        raise DomainError(f"Mellin quadrature needs at least one panel, got {panels}")

    # t = e^v: integral of w(e^v) e^(sigma v) v^k e^(i tau v) dv, smooth at t0 for any sigma
    def envelope(v):
        return w(math.exp(v)) * math.exp(sigma * v) * v ** log_power

    t0, t1 = w.support
    edges = np.linspace(math.log(t0), math.log(t1), panels + 1)
    real = imag = error = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if abs(tau) <= OSCILLATORY_THRESHOLD:
            re, re_err = _quad(lambda v: envelope(v) * math.cos(tau * v), lo, hi)
            im, im_err = _quad(lambda v: envelope(v) * math.sin(tau * v), lo, hi)
        else:
            re, re_err = _quad(envelope, lo, hi, weight="cos", wvar=tau)
            im, im_err = _quad(envelope, lo, hi, weight="sin", wvar=tau)
        real += re
        imag += im
        error += re_err + im_err

    return MellinValue(s, complex(real, imag), error)


def mellin(w: SmoothWeight, s: complex, panels: int = 1) -> MellinValue:
    """
    Mellin transform w^(s) = integral of w(t) t^(s-1) dt over the support

    Args:
        w (SmoothWeight): Weight
        s (complex): Any complex point (w^ is entire)
        panels (int): Equal pieces of [log t0, log t1] integrated separately

    Returns:
        MellinValue: Value with QUADPACK's error estimate
    """
    return _mellin(w, s, 0, panels)


def mellin_derivative(w: SmoothWeight, s: complex, panels: int = 1) -> MellinValue:
    """w^'(s) = integral of w(t) t^(s-1) log t dt"""
    return _mellin(w, s, 1, panels)


def mellin_gauss_legendre(w: SmoothWeight, s, panels: int = 256, nodes: int = 20):
    """
    w^(s) by a composite Gauss-Legendre rule in v = log t

    Independent of QUADPACK and vectorized over s, so it also serves the
    contour sums of the Mellin-inversion check.

    Args:
        w (SmoothWeight): Weight
        s: Complex point or array of points
        panels (int): Equal sub-intervals of [log t0, log t1]
        nodes (int): Gauss points per panel

    Returns:
        complex or np.ndarray: The quadrature value(s)
    """
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=complex))
    x, weights = np.polynomial.legendre.leggauss(nodes)
    t0, t1 = w.support
    edges = np.linspace(math.log(t0), math.log(t1), panels + 1)
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    v = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    quadrature_weights = (half[:, None] * weights[None, :]).ravel() * w(np.exp(v))
    values = np.exp(np.outer(s, v)) @ quadrature_weights
    return complex(values[0]) if scalar else values
