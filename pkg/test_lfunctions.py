"""
Tests for L(s, chi^(8d)) evaluation against Hurwitz-zeta oracles and the functional equation
"""

import mpmath
import pytest

from analysis.lfunctions import (LValueRecord, Method, afe_sum, completed_l_value,
                                 euler_factor_product, imprimitive_l_value, l_value, l_value_omit,
                                 l_values)
from numtheory.characters import kronecker
from numtheory.sieve import odd_squarefree_between
from utils.config import LVALUE_ADMISSION_ERROR
from utils.errors import DomainError


def _oracle(modulus_top, period, s, omit=1):
    chi = [kronecker(modulus_top, r) if omit == 1 or r % omit else 0 for r in range(period)]
    return complex(mpmath.dirichlet(s, chi))


def _close(value, reference, tolerance):
    return abs(value - reference) <= tolerance * max(1.0, abs(reference))


def test_l_value_matches_dirichlet_oracle():
    for d in (1, 3, 15, 35):
        for s in (0.5, 0.6 + 0.1j, 0.5 + 3j, 1.2):
            record = l_value(d, s)
            assert _close(record.value, _oracle(8 * d, 8 * d, s), 1e-9), (d, s)


def test_methods_agree():
    for d in (1, 7, 55, 231, 1001):
        for s in (0.5, 0.5 + 7j, 0.75 - 1j, 2.5):
            first = l_value(d, s, Method.SMOOTHED_AFE)
            second = l_value(d, s, Method.DIRECT_SERIES)
            assert _close(first.value, second.value, 1e-10), (d, s)
            assert first.terms_used != second.terms_used


def test_real_point_gives_real_value():
    record = l_value(7, 0.5)
    assert record.value.imag == 0.0
    assert record.s == 0.5 + 0j
    for d in odd_squarefree_between(1, 100):
        for sigma in (0.5, 0.8, 1.7):
            raw, _, _ = afe_sum(int(d), complex(sigma))
            assert abs(raw.imag) <= 1e-10, (d, sigma)


def test_functional_equation():
    for d in (1, 3, 7, 15, 105):
        for s in (0.5, 0.5 + 0.3j, 0.7 + 0.1j):
            left = completed_l_value(l_value(d, s))
            dual = LValueRecord(d, complex(1 - s), _oracle(8 * d, 8 * d, 1 - s), 0.0,
                                Method.DIRECT_SERIES, 0)
            right = completed_l_value(dual)
            assert abs(left - right) <= 1e-8 * abs(right), (d, s)


def test_l_value_domain():
    for s in (3.5, 0.0, -0.5, 0.5 + 60j):
        with pytest.raises(DomainError):
            l_value(1, s)
    for d in (4, 9, 0, -3):
        with pytest.raises(DomainError):
            l_value(d, 0.5)


def test_error_bound_is_admissible():
    for d in (1, 101, 555, 1001):
        for s in (0.6, 0.5 + 2j, 0.5 + 8j):
            record = l_value(d, s)
            assert 0 < record.abs_error < LVALUE_ADMISSION_ERROR
            assert record.admissible(LVALUE_ADMISSION_ERROR)
            assert not record.admissible(0.0)


def test_cutoff_constant_only_adds_terms():
    default = l_value(15, 0.5)
    wider = l_value(15, 0.5, cutoff_constant=4.0)
    assert wider.terms_used > default.terms_used
    assert abs(wider.value - default.value) < 1e-12


def test_imprimitive_matches_oracle():
    s = 0.5 + 1j
    for d in (45, 49):
        record = imprimitive_l_value(d, s)
        assert record.d == d
        assert _close(record.value, _oracle(8 * d, 8 * d, s), 1e-9), d
    assert imprimitive_l_value(15, s).value == l_value(15, s).value
    with pytest.raises(DomainError):
        imprimitive_l_value(45, s, core_record=l_value(3, s))
    with pytest.raises(DomainError):
        imprimitive_l_value(10, s)


def test_l_value_omit():
    s = 0.5
    record = l_value_omit(3, s, 5)
    assert _close(record.value, _oracle(24, 120, s, omit=5), 1e-9)
    factor = euler_factor_product(3, s, 5)
    assert abs(factor - (1 - kronecker(24, 5) * 5**-0.5)) < 1e-15
    assert l_value_omit(3, s, 1).value == l_value(3, s).value


def test_record_helpers():
    records = l_values([15, 1, 7], 0.5)
    assert [r.d for r in records] == [15, 1, 7]
    data = records[0].to_dict()
    assert data["d"] == 15
    assert data["s"] == [0.5, 0.0]
    assert data["method"] == "smoothed_afe"
    assert Method.from_code(Method.DIRECT_SERIES.code) is Method.DIRECT_SERIES
    assert Method.from_code(Method.SMOOTHED_AFE.code) is Method.SMOOTHED_AFE
    assert isinstance(records[0], LValueRecord)


if __name__ == "__main__":
    print("🧪 Moment Lab - L-value Tests\n")

    tests = [
        test_l_value_matches_dirichlet_oracle,
        test_methods_agree,
        test_real_point_gives_real_value,
        test_functional_equation,
        test_l_value_domain,
        test_error_bound_is_admissible,
        test_cutoff_constant_only_adds_terms,
        test_imprimitive_matches_oracle,
        test_l_value_omit,
        test_record_helpers,
    ]
    failed = 0
    for test in tests:
        try:
            test()
            print(f"  ✅ {test.__name__}")
        except Exception as e:
            failed += 1
            print(f"  ❌ {test.__name__}: {e!r}")

    print()
    print("✅ All tests completed!" if not failed else f"❌ {failed} test(s) failed")
