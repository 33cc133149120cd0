"""
Moments Module
Empirical twisted first moments, the square-free recursion and the Mellin-inversion check
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import repeat
from typing import Dict, Iterable, List, Optional, Union

import numpy as np

from analysis.lfunctions import LValueRecord, Method, imprimitive_l_value, l_value, l_values
from analysis.predictor import MainTermBreakdown, predict_decomposition, predict_moment
from analysis.weights import SmoothWeight, get_weight, mellin_gauss_legendre
from database.lvalue_cache import LValueCache, records_in_order
from numtheory.characters import jacobi_array
from numtheory.factoring import (TwistIndex, moebius, squarefree_decomposition,
                                 squarefree_divisors)
from numtheory.sieve import odd_squarefree_between
from utils.config import AFE_CUTOFF_CONSTANT, CODE_VERSION, FAMILIES, LVALUE_ADMISSION_ERROR
from utils.errors import ConvergenceError, DomainError, LValueAccuracyError
from utils.summation import NeumaierSum

logger = logging.getLogger(__name__)

SUM_BLOCK = 4096
MAX_CONTOUR_HEIGHT = 5000.0
CONTOUR_CHUNK = 64
CONTOUR_TOLERANCE = 1e-12


@dataclass
class MomentReport:
    """One empirical moment next to the main terms it is compared with"""

    family: str
    X: float
    l: int
    alpha: complex
    weight: str
    empirical: Optional[complex]
    predicted: Optional[MainTermBreakdown]
    deviation: Optional[complex]
    d_count: int
    wall_time: float = 0.0
    lvalue_time: float = 0.0
    code_version: str = CODE_VERSION
    error: Optional[str] = None

    def recompute_deviation(self) -> Optional[complex]:
        if self.predicted is None or self.empirical is None:
            return None
        return self.empirical - self.predicted.term1 - self.predicted.term2

    def to_dict(self, include_timings: bool = False) -> Dict[str, object]:
        """
        JSON-ready form of the report

        Args:
            include_timings (bool): Add wall-clock fields, which differ between runs

        Returns:
            Dict[str, object]: Complex numbers as [re, im] pairs, missing values as None
        """
        data = {
            "family": self.family,
            "X": self.X,
            "l": self.l,
            "alpha": [self.alpha.real, self.alpha.imag],
            "weight": self.weight,
            "empirical": (None if self.empirical is None
                          else [self.empirical.real, self.empirical.imag]),
            "predicted": self.predicted.to_dict() if self.predicted else None,
            "deviation": (None if self.deviation is None
                          else [self.deviation.real, self.deviation.imag]),
            "d_count": self.d_count,
            "code_version": self.code_version,
            "error": self.error,
        }
        if include_timings:
            data["wall_time"] = self.wall_time
            data["lvalue_time"] = self.lvalue_time
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "MomentReport":
        """Rebuild a report from its archive form; main terms are kept only as the deviation"""
        deviation = data.get("deviation")
        empirical = data.get("empirical")
        return cls(
            family=data["family"],
            X=float(data["X"]),
            l=int(data["l"]),
            alpha=complex(*data["alpha"]),
            weight=data["weight"],
            empirical=complex(*empirical) if empirical is not None else None,
            predicted=None,
            deviation=complex(*deviation) if deviation is not None else None,
            d_count=int(data["d_count"]),
            wall_time=float(data.get("wall_time", 0.0)),
            lvalue_time=float(data.get("lvalue_time", 0.0)),
            code_version=data.get("code_version", CODE_VERSION),
            error=data.get("error"),
        )


@dataclass(frozen=True)
class MomentDecomposition:
    M1: complex
    M2: complex
    Y: int
    main_terms: Optional[Dict[str, complex]] = None

    @property
    def total(self) -> complex:
        return self.M1 + self.M2


def block_sum(values: Iterable) -> complex:
    """
    Compensated sum in blocks of SUM_BLOCK, blocks combined in order

    Args:
        values: Terms in summation order

    Returns:
        complex: The sum
    """
    values = np.asarray(values, dtype=complex).ravel()
    total = NeumaierSum()
    for start in range(0, len(values), SUM_BLOCK):
        block = NeumaierSum()
        block.extend(values[start:start + SUM_BLOCK])
        total += block
    return total.value


def _compute_record(d: int, s: complex, cutoff_constant: float) -> LValueRecord:
    return l_value(d, s, Method.SMOOTHED_AFE, cutoff_constant)


def fetch_lvalues(ds: Iterable[int], s: complex, cache: Optional[LValueCache] = None,
                  threads: int = 1,
                  cutoff_constant: float = AFE_CUTOFF_CONSTANT) -> Dict[int, LValueRecord]:
    """
    Records for square-free d, from the cache where possible

    Missing values are computed (in worker processes when threads > 1) and
    written back by this process only.

    Args:
        ds (Iterable[int]): Odd square-free d
        s (complex): Point
        cache (Optional[LValueCache]): Cache, or None to always compute
        threads (int): Worker processes
        cutoff_constant (float): AFE cutoff constant

    Returns:
        Dict[int, LValueRecord]: Records keyed by d
    """
    ds = [int(d) for d in ds]
    found = cache.get_many(ds, s) if cache is not None else {}
    missing = [d for d in ds if d not in found]
    if missing:
        logger.info("Computing %d L-values at s=%s (%d cached)", len(missing), s, len(found))
        if threads > 1 and len(missing) > 1:
            chunksize = max(1, len(missing) // (4 * threads))
            with ProcessPoolExecutor(max_workers=threads) as pool:
                records = list(pool.map(_compute_record, missing, repeat(s),
                                        repeat(cutoff_constant), chunksize=chunksize))
        else:
            records = l_values(missing, s, Method.SMOOTHED_AFE, cutoff_constant)
        if cache is not None:
            cache.put_many(records)
        found.update({record.d: record for record in records})
    return found


def _admit(records: Dict[int, LValueRecord], threshold: float) -> None:
    for d in sorted(records):
        record = records[d]
        if not record.admissible(threshold):
            raise LValueAccuracyError(d, record.abs_error, threshold)


def _support_ds(w: SmoothWeight, X: float, scale: int = 1) -> np.ndarray:
    """Odd d with w(d scale / X) != 0, ascending"""
    t0, t1 = w.support
    lo = max(1, int(math.floor(t0 * X / scale)))
    hi = int(math.ceil(t1 * X / scale))
    if hi < lo:
        return np.zeros(0, dtype=np.int64)
    ds = np.arange(lo | 1, hi + 1, 2, dtype=np.int64)
    return ds[w(ds * scale / X) != 0]


def _squarefree_support(w: SmoothWeight, X: float, scale: int = 1) -> np.ndarray:
    t0, t1 = w.support
    lo = max(1, int(math.floor(t0 * X / scale)))
    hi = int(math.ceil(t1 * X / scale))
    ds = odd_squarefree_between(lo, hi)
    return ds[w(ds * scale / X) != 0]


class _ImprimitiveTable:
    """L(s, chi^(8n)) for odd n from core records, memoized"""

    def __init__(self, records: Dict[int, LValueRecord], s: complex):
        self.records = records
        self.s = s
        self._values: Dict[int, complex] = {}

    def __call__(self, n: int) -> complex:
        n = int(n)
        if n not in self._values:
            core, e = squarefree_decomposition(n)
            record = self.records[core]
            self._values[n] = record.value if e == 1 else imprimitive_l_value(n, self.s, record).value
        return self._values[n]

    def array(self, ns: np.ndarray) -> np.ndarray:
        return np.array([self(n) for n in ns], dtype=complex)


def _cores(ns: np.ndarray) -> List[int]:
    return sorted({squarefree_decomposition(int(n))[0] for n in ns})


def _twist(ds: np.ndarray, twist: int) -> np.ndarray:
    return jacobi_array(8 * ds, twist).astype(float)


def empirical_moment(family: str, X: float, l: Union[int, TwistIndex], alpha: complex,
                     weight: str = "bump", cache: Optional[LValueCache] = None, threads: int = 1,
                     admission_error: float = LVALUE_ADMISSION_ERROR,
                     cutoff_constant: float = AFE_CUTOFF_CONSTANT,
                     predict: bool = True, twist_fast_path: bool = True) -> MomentReport:
    """
    sum over odd d of L(1/2 + alpha, chi^(8d)) chi^(8d)(l) w(d/X)

    The primitive family keeps square-free d only; all_moduli takes every odd d
    with the imprimitive L-value obtained from the square-free core.

    Args:
        family (str): "primitive" or "all_moduli"
        X (float): Family size
        l: Odd square-free twist
        alpha (complex): Shift
        weight (str): Registered weight name
        cache (Optional[LValueCache]): L-value cache
        threads (int): Worker processes for L-values
        admission_error (float): Largest admissible abs_error of an L-value
        cutoff_constant (float): AFE cutoff constant
        predict (bool): Attach main terms and the deviation
        twist_fast_path (bool): Skip the character multiply when l = 1

    Returns:
        MomentReport: The report
    """
    if family not in FAMILIES:
        raise DomainError(f"Unknown family {family!r}, expected one of {FAMILIES}")
    started = time.perf_counter()
    l = TwistIndex.of(l)
    alpha = complex(alpha)
    s = 0.5 + alpha
    w = get_weight(weight)

    ds = _squarefree_support(w, X) if family == "primitive" else _support_ds(w, X)
    cores = ds.tolist() if family == "primitive" else _cores(ds)

    lvalue_started = time.perf_counter()
    records = fetch_lvalues(cores, s, cache, threads, cutoff_constant)
    lvalue_time = time.perf_counter() - lvalue_started
    _admit(records, admission_error)

    if family == "primitive":
        L = np.array([r.value for r in records_in_order(records, ds)], dtype=complex)
    else:
        L = _ImprimitiveTable(records, s).array(ds)

    terms = L * w(ds / X)
    if l.value != 1 or not twist_fast_path:
        terms = terms * _twist(ds, l.value)
    empirical = block_sum(terms)

    predicted = predict_moment(family, X, l, alpha, weight) if predict else None
    report = MomentReport(
        family=family, X=float(X), l=l.value, alpha=alpha, weight=weight,
        empirical=empirical, predicted=predicted, deviation=None, d_count=int(len(ds)),
        lvalue_time=lvalue_time,
    )
    report.deviation = report.recompute_deviation()
    report.wall_time = time.perf_counter() - started
    return report


def decompose_m1_m2(X: float, l: Union[int, TwistIndex], alpha: complex, Y: int,
                    weight: str = "bump", cache: Optional[LValueCache] = None, threads: int = 1,
                    admission_error: float = LVALUE_ADMISSION_ERROR,
                    cutoff_constant: float = AFE_CUTOFF_CONSTANT,
                    predict: bool = True) -> MomentDecomposition:
    """
    Split the primitive moment by the size of a in sum_{a^2 | d} mu(a)

    M1 = sum_{a <= Y} mu(a) sum_{r | a} mu(r) r^(-1/2-alpha)
         sum_{d odd} L(1/2+alpha, chi^(8d)) chi^(8d)(rl) w(d a^2 / X)
    M2 = sum_{c} (sum_{a | c, a > Y} mu(a))
         sum_{d square-free} L(1/2+alpha, chi^(8dc^2)) chi^(8d)(l) w(d c^2 / X)
    with a and c coprime to 2l. M1 + M2 is the primitive moment.

    Args:
        X (float): Family size
        l: Odd square-free twist
        alpha (complex): Shift
        Y (int): Split point, at least 1
        weight (str): Registered weight name
        cache (Optional[LValueCache]): L-value cache
        threads (int): Worker processes for L-values
        admission_error (float): Largest admissible abs_error of an L-value
        cutoff_constant (float): AFE cutoff constant
        predict (bool): Attach M11, M12, M21, M22 when alpha != 0

    Returns:
        MomentDecomposition: M1, M2 and optional main terms
    """
    l = TwistIndex.of(l)
    alpha = complex(alpha)
    Y = int(Y)
    if Y < 1:
        raise DomainError(f"Y must be at least 1, got {Y}")
    s = 0.5 + alpha
    w = get_weight(weight)

    records = fetch_lvalues(_cores(_support_ds(w, X)), s, cache, threads, cutoff_constant)
    _admit(records, admission_error)
    table = _ImprimitiveTable(records, s)
    a_max = math.isqrt(int(math.ceil(w.support[1] * X)))

    def coprime(a: int) -> bool:
        return a % 2 == 1 and math.gcd(a, l.value) == 1

    M1 = NeumaierSum()
    for a in range(1, min(Y, a_max) + 1, 2):
        mu_a = moebius(a)
        if mu_a == 0 or not coprime(a):
            continue
        ds = _support_ds(w, X, a * a)
        if len(ds) == 0:
            continue
        base = table.array(ds) * w(ds * (a * a) / X)
        for r, mu_r in squarefree_divisors(a):
            twisted = base * _twist(ds, r * l.value)
            M1.add(mu_a * mu_r * r ** (-s) * block_sum(twisted))

    M2 = NeumaierSum()
    for c in range(1, a_max + 1, 2):
        if not coprime(c):
            continue
        kappa = sum(mu for a, mu in squarefree_divisors(c) if a > Y)
        if kappa == 0:
            continue
        ds = _squarefree_support(w, X, c * c)
        if len(ds) == 0:
            continue
        values = table.array(ds * (c * c)) * _twist(ds, l.value) * w(ds * (c * c) / X)
        M2.add(kappa * block_sum(values))

    main_terms = None
    if predict and alpha != 0:
        main_terms = predict_decomposition(X, l, alpha, Y, weight)
    return MomentDecomposition(M1.value, M2.value, Y, main_terms)


def mellin_inversion_check(X: float, l: Union[int, TwistIndex], alpha: complex,
                           truncation_D: int, weight: str = "bump",
                           cache: Optional[LValueCache] = None) -> float:
    """
    Compare (1/2 pi i) int_(2) A_D(s) X^s w^(s) ds with sum_{d <= D} c_d w(d/X)

    A_D(s) = sum_{odd d <= D} c_d d^-s, c_d = L(1/2+alpha, chi^(8d)) chi^(8d)(l) with the
    imprimitive L-value for non-square-free d. The line integral is a trapezoid
    sum in Im s whose step keeps every aliased copy outside the support of the
    integrand's Fourier transform; the height grows in chunks until the
    integrand drops below CONTOUR_TOLERANCE.

    Args:
        X (float): Family size
        l: Odd square-free twist
        alpha (complex): Shift
        truncation_D (int): Last d in the Dirichlet series
        weight (str): Registered weight name
        cache (Optional[LValueCache]): L-value cache

    Returns:
        float: |integral - direct sum|
    """
    l = TwistIndex.of(l)
    alpha = complex(alpha)
    s = 0.5 + alpha
    w = get_weight(weight)
    ds = np.arange(1, int(truncation_D) + 1, 2, dtype=np.int64)
    if len(ds) == 0:
        return 0.0

    records = fetch_lvalues(_cores(ds), s, cache)
    coefficients = _ImprimitiveTable(records, s).array(ds) * _twist(ds, l.value)
    direct = block_sum(coefficients * w(ds / X))

    log_y = np.log(X / ds.astype(float))
    t0, t1 = w.support
    v = -log_y
    width = max(v.max() - math.log(t0), math.log(t1) - v.min())
    step = 2 * math.pi / (1 + width)
    scale = max(1.0, abs(direct))

    amplitudes = coefficients * np.exp(2 * log_y)
    integral = NeumaierSum(step * complex(np.sum(amplitudes)) * mellin_gauss_legendre(w, 2.0))
    k = 1
    while True:
        t = step * np.arange(k, k + CONTOUR_CHUNK)
        w_hat = mellin_gauss_legendre(w, 2 + 1j * t)
        phases = np.exp(1j * np.outer(t, log_y))
        upper = (phases @ amplitudes) * w_hat
        lower = (np.conj(phases) @ amplitudes) * np.conj(w_hat)
        chunk = step * (upper + lower)
        integral.extend(chunk)
        k += CONTOUR_CHUNK
        if np.max(np.abs(chunk[-8:])) < CONTOUR_TOLERANCE * scale:
            break
        if t[-1] > MAX_CONTOUR_HEIGHT:
            raise ConvergenceError(
                f"Mellin contour did not settle below {CONTOUR_TOLERANCE} by height {t[-1]:.0f}"
            )
    residual = abs(integral.value / (2 * math.pi) - direct)
    logger.debug("Mellin inversion: height %.0f, residual %.3e", t[-1], residual)
    return float(residual)
