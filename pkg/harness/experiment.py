"""
Experiment Module
Runs the (X, l, alpha) grid of an ExperimentConfig and writes its reports
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from database.lvalue_cache import LValueCache
from harness.fitting import ExponentFit, fit_error_exponent
from harness.moments import MomentReport, empirical_moment
from harness.reports import write_reports
from utils.config import ExperimentConfig
from utils.errors import DegenerateFitError

logger = logging.getLogger(__name__)


@dataclass
class ExperimentResult:
    reports: List[MomentReport]
    fits: List[ExponentFit]
    paths: Dict[str, str] = field(default_factory=dict)
    cache_stats: Dict[str, int] = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def failed(self) -> List[MomentReport]:
        return [r for r in self.reports if r.error is not None]


def _failed_report(config: ExperimentConfig, X: float, l: int, alpha: complex,
                   error: Exception) -> MomentReport:
    return MomentReport(
        family=config.family, X=float(X), l=int(l), alpha=complex(alpha), weight=config.weight,
        empirical=None, predicted=None, deviation=None, d_count=0,
        error=f"{type(error).__name__}: {error}",
    )


def run_cell(config: ExperimentConfig, X: float, l: int, alpha: complex,
             cache: Optional[LValueCache]) -> MomentReport:
    """One moment of the grid; failures come back as a report carrying the diagnostic"""
    try:
        return empirical_moment(
            config.family, X, l, alpha, config.weight, cache=cache, threads=config.threads,
            admission_error=config.lvalue_admission_error,
            cutoff_constant=config.afe_cutoff_constant,
        )
    except Exception as e:
        logger.error("Error computing moment for X=%s, l=%s, alpha=%s: %s", X, l, alpha, e)
        return _failed_report(config, X, l, alpha, e)


def fit_groups(reports: List[MomentReport]) -> List[ExponentFit]:
    """One exponent fit per (l, alpha) group that has enough successful points"""
    groups: Dict[tuple, List[MomentReport]] = {}
    for report in reports:
        groups.setdefault((report.l, report.alpha.real, report.alpha.imag), []).append(report)
    fits = []
    for key in sorted(groups):
        try:
            fits.append(fit_error_exponent(groups[key]))
        except DegenerateFitError as e:
            logger.info("No exponent fit for l=%d alpha=%s: %s", key[0], complex(key[1], key[2]), e)
    return fits


def run_experiment(config: ExperimentConfig, cache: Optional[LValueCache] = None,
                   write: bool = True) -> ExperimentResult:
    """
    Compute every moment of the config grid, fit exponents and write the reports

    Args:
        config (ExperimentConfig): Validated configuration
        cache (Optional[LValueCache]): Cache to use instead of one in config.cache_dir
        write (bool): Write CSV, JSON and timing files under config.out

    Returns:
        ExperimentResult: Reports in (l, alpha, X) order, fits and written paths
    """
    config.validate()
    started = time.perf_counter()
    if not config.x_values:
        logger.warning("Empty X list: no moments to compute")
    if cache is None:
        cache = LValueCache(config.cache_dir)

    reports = []
    for l in config.l_values:
        for alpha in config.alphas:
            for X in config.x_values:
                logger.info("Moment family=%s X=%s l=%d alpha=%s", config.family, X, l, alpha)
                reports.append(run_cell(config, X, l, alpha, cache))

    fits = fit_groups(reports)
    result = ExperimentResult(reports, fits, cache_stats=cache.stats())
    if write:
        result.paths = write_reports(reports, fits, config.out)
    result.wall_time = time.perf_counter() - started

    failures = len(result.failed)
    if failures:
        logger.warning("%d of %d experiment cells failed", failures, len(reports))
    logger.info("Cache: %s", result.cache_stats)
    return result
