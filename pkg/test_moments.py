"""
Tests for empirical moments, the M1/M2 decomposition and the Mellin-inversion check
"""

import tempfile
from pathlib import Path

import numpy as np
import pytest

from analysis.lfunctions import Method, imprimitive_l_value, l_value
from analysis.weights import BUMP
from database.lvalue_cache import LValueCache
from harness.moments import (MomentReport, block_sum, decompose_m1_m2, empirical_moment,
                             fetch_lvalues, mellin_inversion_check)
from numtheory.characters import kronecker
from utils.errors import DomainError, LValueAccuracyError

ALPHA = 0.1


def _close(value, reference, tolerance=1e-9):
    return abs(value - reference) <= tolerance * max(1.0, abs(reference))


def test_empty_support():
    report = empirical_moment("primitive", 0.4, 1, ALPHA, predict=False)
    assert report.d_count == 0
    assert report.empirical == 0
    assert report.predicted is None and report.deviation is None


def test_small_moment_matches_direct_series():
    s = 0.5 + ALPHA
    for l in (1, 3):
        report = empirical_moment("primitive", 10.0, l, ALPHA, predict=False)
        assert report.d_count == 5
        expected = sum(l_value(d, s, Method.DIRECT_SERIES).value * BUMP(d / 10) * kronecker(8 * d, l)
                       for d in (11, 13, 15, 17, 19))
        assert _close(report.empirical, expected, 1e-10), l


def test_all_moduli_uses_imprimitive_values():
    s = 0.5 + ALPHA
    report = empirical_moment("all_moduli", 30.0, 1, ALPHA, predict=False)
    ds = list(range(31, 60, 2))
    assert report.d_count == len(ds)
    assert 45 in ds and 49 in ds
    expected = sum(imprimitive_l_value(d, s).value * BUMP(d / 30) for d in ds)
    assert _close(report.empirical, expected, 1e-10)


def test_report_carries_main_terms():
    report = empirical_moment("primitive", 60.0, 3, ALPHA)
    assert report.predicted is not None
    assert report.deviation == report.empirical - report.predicted.term1 - report.predicted.term2
    rebuilt = MomentReport.from_dict(report.to_dict())
    assert rebuilt.deviation == report.deviation
    assert rebuilt.empirical == report.empirical
    assert "wall_time" not in report.to_dict()
    assert "wall_time" in report.to_dict(include_timings=True)


def test_decomposition_sums_to_primitive_moment():
    primitive = empirical_moment("primitive", 60.0, 1, ALPHA, predict=False).empirical
    decomposition = decompose_m1_m2(60.0, 1, ALPHA, 2)
    assert _close(decomposition.total, primitive)
    assert decomposition.main_terms is not None
    assert set(decomposition.main_terms) == {"M11", "M12", "M21", "M22", "total1", "total2"}


def test_decomposition_with_large_Y_has_no_M2():
    decomposition = decompose_m1_m2(60.0, 1, ALPHA, 100, predict=False)
    assert decomposition.M2 == 0
    assert decomposition.main_terms is None


def test_decomposition_with_Y_one_is_the_all_moduli_moment():
    for l in (1, 3):
        all_moduli = empirical_moment("all_moduli", 60.0, l, ALPHA, predict=False).empirical
        decomposition = decompose_m1_m2(60.0, l, ALPHA, 1, predict=False)
        assert _close(decomposition.M1, all_moduli), l
    with pytest.raises(DomainError):
        decompose_m1_m2(60.0, 1, ALPHA, 0)


@pytest.mark.slow
def test_decomposition_sums_to_primitive_moment_across_splits(tmp_path):
    cache = LValueCache(str(tmp_path / "cache"))
    for l in (1, 3, 15):
        primitive = empirical_moment("primitive", 500.0, l, ALPHA, cache=cache, predict=False).empirical
        for Y in (1, 5, 20):
            decomposition = decompose_m1_m2(500.0, l, ALPHA, Y, cache=cache, predict=False)
            assert abs(decomposition.total - primitive) <= 1e-9 * abs(primitive), (l, Y)


def test_mellin_inversion():
    for l in (1, 3):
        assert mellin_inversion_check(20.0, l, ALPHA, 50) < 1e-6


def test_moment_is_linear_in_the_weight():
    parts = [empirical_moment("primitive", 40.0, 3, ALPHA, weight, predict=False).empirical
             for weight in ("bump", "narrowbump")]
    combined = empirical_moment("primitive", 40.0, 3, ALPHA, "bump+narrowbump", predict=False)
    assert _close(combined.empirical, sum(parts), 1e-12)


def test_twist_fast_path_is_exact():
    fast = empirical_moment("primitive", 40.0, 1, ALPHA, predict=False)
    slow = empirical_moment("primitive", 40.0, 1, ALPHA, predict=False, twist_fast_path=False)
    assert fast.empirical == slow.empirical


def test_moment_errors():
    with pytest.raises(LValueAccuracyError):
        empirical_moment("primitive", 20.0, 1, ALPHA, admission_error=0.0, predict=False)
    with pytest.raises(DomainError):
        empirical_moment("even", 20.0, 1, ALPHA, predict=False)


def test_worker_processes_give_identical_results():
    single = empirical_moment("primitive", 60.0, 3, ALPHA, threads=1, predict=False)
    pooled = empirical_moment("primitive", 60.0, 3, ALPHA, threads=2, predict=False)
    assert single.empirical == pooled.empirical
    records = fetch_lvalues([3, 5, 7], 0.5, threads=2)
    assert sorted(records) == [3, 5, 7]


def test_block_sum():
    values = np.full(10000, 0.1 + 0.1j)
    assert abs(block_sum(values) - (1000 + 1000j)) < 1e-9
    assert block_sum([]) == 0


if __name__ == "__main__":
    print("🧪 Moment Lab - Moment Tests\n")

    tests = [
        test_empty_support,
        test_small_moment_matches_direct_series,
        test_all_moduli_uses_imprimitive_values,
        test_report_carries_main_terms,
        test_decomposition_sums_to_primitive_moment,
        test_decomposition_with_large_Y_has_no_M2,
        test_decomposition_with_Y_one_is_the_all_moduli_moment,
        test_decomposition_sums_to_primitive_moment_across_splits,
        test_mellin_inversion,
        test_moment_is_linear_in_the_weight,
        test_twist_fast_path_is_exact,
        test_moment_errors,
        test_worker_processes_give_identical_results,
        test_block_sum,
    ]
    failed = 0
    for test in tests:
        try:
            if test.__code__.co_argcount:
                test(Path(tempfile.mkdtemp()))
            else:
                test()
            print(f"  ✅ {test.__name__}")
        except Exception as e:
            failed += 1
            print(f"  ❌ {test.__name__}: {e!r}")

    print()
    print("✅ All tests completed!" if not failed else f"❌ {failed} test(s) failed")
