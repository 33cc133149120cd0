"""
Fitting Module
Log-log regression of moment deviations against X
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from harness.moments import MomentReport
from utils.errors import DegenerateFitError, DomainError

logger = logging.getLogger(__name__)

MIN_POINTS = 3


@dataclass(frozen=True)
class ExponentFit:
    """Least-squares slope of log|deviation| against log X"""

    points: List[Tuple[float, float]]
    delta_hat: float
    intercept: float
    r_squared: float
    target_exponent: Optional[float] = None
    rh_exponent: Optional[float] = None
    labels: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, object]:
        return {
            "points": [list(point) for point in self.points],
            "delta_hat": self.delta_hat,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "target_exponent": self.target_exponent,
            "rh_exponent": self.rh_exponent,
            "labels": self.labels,
        }


def fit_points(points: Sequence[Tuple[float, float]]) -> Tuple[float, float, float]:
    """
    Slope, intercept and r^2 of log y against log X

    Args:
        points: (X, y) pairs with X, y > 0

    Returns:
        Tuple[float, float, float]: (slope, intercept, r_squared)
    """
    if len(points) < MIN_POINTS:
        raise DegenerateFitError(f"Exponent fit needs at least {MIN_POINTS} points, got {len(points)}")
    xs = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)
    if len(np.unique(xs)) < MIN_POINTS:
        raise DegenerateFitError(f"Exponent fit needs {MIN_POINTS} distinct X, got {sorted(set(xs))}")
    if np.any(xs <= 0) or np.any(ys <= 0):
        raise DomainError("Exponent fit needs positive X and deviations")
    result = stats.linregress(np.log(xs), np.log(ys))
    return float(result.slope), float(result.intercept), float(result.rvalue ** 2)


def target_exponents(family: str, alpha: complex) -> Tuple[float, float]:
    """Unconditional error exponent for the family and the RH exponent 1/4 - Re alpha"""
    alpha = complex(alpha)
    unconditional = 0.5 if family == "primitive" else 0.5 - alpha.real
    return unconditional, 0.25 - alpha.real


def fit_error_exponent(reports: Sequence[MomentReport]) -> ExponentFit:
    """
    Fit |deviation| ~ C X^delta over reports of one (family, l, alpha, weight)

    Args:
        reports: At least three successful reports with distinct X

    Returns:
        ExponentFit: Slope, intercept, r^2 and the exponents it is read against
    """
    usable = [r for r in reports if r.error is None and r.deviation is not None]
    if len(usable) < len(reports):
        logger.warning("Skipping %d failed reports in exponent fit", len(reports) - len(usable))
    if not usable:
        raise DegenerateFitError("No successful reports to fit")
    keys = {(r.family, r.l, r.alpha, r.weight) for r in usable}
    if len(keys) > 1:
        raise DomainError(f"Exponent fit mixes report groups: {sorted(map(str, keys))}")
    family, l, alpha, weight = keys.pop()

    points = sorted((r.X, abs(r.deviation)) for r in usable)
    slope, intercept, r_squared = fit_points(points)
    target, rh = target_exponents(family, alpha)
    logger.info("Exponent fit family=%s l=%d alpha=%s: delta=%.4f r^2=%.4f (target %.3f)",
                family, l, alpha, slope, r_squared, target)
    return ExponentFit(
        points=[(float(x), float(y)) for x, y in points],
        delta_hat=slope,
        intercept=intercept,
        r_squared=r_squared,
        target_exponent=target,
        rh_exponent=rh,
        labels={"family": family, "l": l, "alpha": [alpha.real, alpha.imag], "weight": weight},
    )


def relative_deviations(reports: Sequence[MomentReport]) -> List[Tuple[float, float]]:
    """(X, |deviation| / |term1 + term2|) for successful reports, ascending in X"""
    rows = []
    for report in sorted(reports, key=lambda r: r.X):
        if report.error is None and report.predicted is not None and report.deviation is not None:
            scale = abs(report.predicted.total)
            rows.append((report.X, abs(report.deviation) / scale if scale else math.inf))
    return rows
