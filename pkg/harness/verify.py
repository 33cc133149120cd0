"""
Verify Module
Property suites behind `momentlab verify` and `momentlab selftest`
"""

import logging
import math
import tempfile
from dataclasses import dataclass
from typing import Callable, Dict, List

import mpmath
import numpy as np

from analysis.lfunctions import Method, completed_l_value, l_value
from analysis.predictor import (ResumIdentity, d1_residue_estimate, predict_all_moduli,
                                resum_identity_check)
from analysis.special_functions import Parity, gamma_alpha, gamma_e_o, gamma_ratio, zeta
from database.lvalue_cache import LValueCache
from harness.fitting import fit_error_exponent, relative_deviations
from harness.moments import empirical_moment, mellin_inversion_check
from numtheory.characters import kronecker
from numtheory.gauss_sums import JACOBI, gauss_G, gauss_series_l_value, tau_bruteforce, tau_from_G
from numtheory.sieve import odd_squarefree_between

logger = logging.getLogger(__name__)

SUITES = ("gauss", "fe", "identities", "asymptotics")
FE_POINTS = (0.5 + 0j, 0.5 + 0.3j, 0.7 + 0.1j)


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    passed: bool
    detail: str


def _check(suite: str, name: str, error: float, tolerance: float) -> CheckResult:
    passed = bool(error <= tolerance)
    return CheckResult(suite, name, passed, f"error {error:.3e} (tolerance {tolerance:.1e})")


def gauss_suite(quick: bool = False) -> List[CheckResult]:
    """G against brute-force tau, G(chi_n, 4q) = G(chi_n, q) and the Gauss-sum series at s = -3/2"""
    n_max, q_max = (45, 24) if quick else (315, 128)
    worst = 0.0
    for n in range(1, n_max + 1, 2):
        for q in range(1, q_max + 1):
            brute = tau_bruteforce(n, JACOBI, q).value
            worst = max(worst, abs(tau_from_G(n, q) - brute))

    n_max, q_max = (25, 8) if quick else (99, 32)
    periodic = 0.0
    for n in range(1, n_max + 1, 2):
        for q in range(1, q_max + 1):
            periodic = max(periodic, abs(gauss_G(n, 4 * q).value - gauss_G(n, q).value))

    series = 0.0
    for n in ((3,) if quick else (3, 5, 15)):
        # chi^(4) chi_n as a table over one period of 4n
        table = [0 if r % 2 == 0 else kronecker(r, n) for r in range(4 * n)]
        reference = complex(mpmath.dirichlet(-1.5, table))
        value = gauss_series_l_value(n, -1.5)
        series = max(series, abs(value - reference) / max(1.0, abs(reference)))
    return [
        _check("gauss", "G matches brute-force tau", worst, 1e-8),
        _check("gauss", "G(chi_n, 4q) = G(chi_n, q)", periodic, 1e-10),
        _check("gauss", "Gauss-sum series matches L(-3/2, chi^(4) chi_n)", series, 1e-6),
    ]


def fe_suite(quick: bool = False) -> List[CheckResult]:
    """Lambda(s) from the smoothed AFE against Lambda(1 - s) from the direct series"""
    candidates = odd_squarefree_between(1, 500)
    count = 5 if quick else 50
    ds = candidates[np.linspace(0, len(candidates) - 1, count).astype(int)]
    worst = 0.0
    for d in ds:
        for s in FE_POINTS:
            left = completed_l_value(l_value(int(d), s, Method.SMOOTHED_AFE))
            right = completed_l_value(l_value(int(d), 1 - s, Method.DIRECT_SERIES))
            worst = max(worst, abs(left - right) / abs(right))
    return [_check("fe", "Lambda(s) = Lambda(1 - s)", worst, 1e-8)]


def _gamma_zeta_identity_error(alpha: complex) -> float:
    left = (gamma_e_o(1 - alpha, Parity.ODD) + gamma_e_o(1 - alpha, Parity.EVEN)) * zeta(2 * alpha)
    right = (math.pi ** (2 * alpha - 0.5) * 2 ** (1 - 2 * alpha)
             * gamma_ratio(0.25 - alpha / 2, 0.25 + alpha / 2) * zeta(1 - 2 * alpha))
    return abs(left - right) / abs(right)


def identities_suite(quick: bool = False) -> List[CheckResult]:
    """Gamma identities, resummations, the D_1 residue and Mellin inversion"""
    rng = np.random.default_rng(20240611)
    alphas = rng.uniform(-0.45, 0.45, 20) + 1j * rng.uniform(-3, 3, 20)
    reflection = max(abs(gamma_alpha(a) * gamma_alpha(-a) - 1) for a in alphas)
    strip = rng.uniform(0.01, 0.49, 20) + 1j * rng.uniform(-3, 3, 20)
    gamma_zeta = max(_gamma_zeta_identity_error(a) for a in strip)
    results = [
        _check("identities", "gamma_alpha gamma_-alpha = 1", reflection, 1e-10),
        _check("identities", "Gamma-zeta identity", gamma_zeta, 1e-9),
    ]

    cases = [(1, 0.1)] if quick else [(l, a) for l in (1, 15) for a in (0.1, 0.2)]
    a_cutoff = 2 * 10**5 if quick else None
    for l, alpha in cases:
        for identity in ResumIdentity:
            residual = resum_identity_check(l, alpha, Y=10, identity=identity, a_cutoff=a_cutoff)
            results.append(_check("identities", f"resummation {identity.value} l={l} alpha={alpha}",
                                  residual, 1e-5 if quick else 1e-6))

    estimate = d1_residue_estimate(1)
    results.append(_check("identities", "D_1 residue at w = 3/2", estimate["relative_gap"], 0.25))

    twists = (1,) if quick else (1, 3)
    for l in twists:
        residual = mellin_inversion_check(20.0, l, 0.1, 50)
        results.append(_check("identities", f"Mellin inversion l={l}", residual, 1e-6))
    return results


def asymptotics_suite(quick: bool = False) -> List[CheckResult]:
    """Primitive moments at alpha = 0 against the central main term as X doubles"""
    x_values = (1000.0, 2000.0) if quick else (1000.0, 2000.0, 4000.0, 8000.0)
    twists = (1,) if quick else (1, 3, 5)
    results = []
    with tempfile.TemporaryDirectory() as cache_dir:
        cache = LValueCache(cache_dir)
        for l in twists:
            reports = [empirical_moment("primitive", X, l, 0, cache=cache) for X in x_values]
            relative = [value for _, value in relative_deviations(reports)]
            results.append(_check("asymptotics", f"relative deviation l={l} X={x_values[-1]:g}",
                                  relative[-1], 0.05))
            if quick:
                continue
            decreasing = all(later < earlier for earlier, later in zip(relative, relative[1:]))
            results.append(CheckResult("asymptotics", f"relative deviation decreases l={l}",
                                       decreasing, ", ".join(f"{v:.3e}" for v in relative)))
            fit = fit_error_exponent(reports)
            results.append(CheckResult(
                "asymptotics", f"error exponent l={l}",
                fit.delta_hat <= 0.75 and fit.r_squared >= 0.7,
                f"delta_hat {fit.delta_hat:.3f}, r^2 {fit.r_squared:.3f} (limits 0.75, 0.7)",
            ))
    return results


def moment_smoke(quick: bool = True) -> List[CheckResult]:
    """A tiny primitive moment and an all-moduli main-term audit"""
    report = empirical_moment("primitive", 10.0, 1, 0.1, predict=False)
    empty = empirical_moment("primitive", 0.4, 1, 0.1, predict=False)
    breakdown = predict_all_moduli(100.0, 15, 0.1)
    term1, term2 = breakdown.reproduce()
    audit = max(abs(term1 - breakdown.term1), abs(term2 - breakdown.term2))
    return [
        CheckResult("moment", "X=10 moment is finite", bool(np.isfinite(abs(report.empirical))),
                    f"d_count {report.d_count}"),
        CheckResult("moment", "empty support", empty.d_count == 0 and empty.empirical == 0,
                    f"d_count {empty.d_count}"),
        _check("moment", "main-term audit chain", audit, 1e-12 * abs(breakdown.term1)),
    ]


SUITE_FUNCTIONS: Dict[str, Callable[[bool], List[CheckResult]]] = {
    "gauss": gauss_suite,
    "fe": fe_suite,
    "identities": identities_suite,
    "asymptotics": asymptotics_suite,
}


def run_suites(suite: str = "all", quick: bool = False) -> List[CheckResult]:
    """
    Run one suite or all of them

    Args:
        suite (str): One of SUITES, or "all"
        quick (bool): Reduced sizes for selftest

    Returns:
        List[CheckResult]: One result per check
    """
    names = SUITES if suite == "all" else (suite,)
    results = []
    for name in names:
        logger.info("Running %s suite", name)
        try:
            results.extend(SUITE_FUNCTIONS[name](quick))
        except Exception as e:
            logger.error("Error running %s suite: %s", name, e)
            results.append(CheckResult(name, "suite completed", False, str(e)))
    return results


def selftest() -> List[CheckResult]:
    """Quick versions of every suite plus a moment smoke test"""
    results = run_suites("all", quick=True)
    try:
        results.extend(moment_smoke())
    except Exception as e:
        logger.error("Error running moment smoke test: %s", e)
        results.append(CheckResult("moment", "smoke test completed", False, str(e)))
    return results
