"""
Tests for factoring, quadratic symbols, sieves and compensated summation
"""

import math

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from numtheory.characters import jacobi_array, kronecker, kronecker_array, quadratic_character
from numtheory.factoring import (QuadraticFamilyIndex, TwistIndex, euler_phi, factor, moebius,
                                 squarefree_decomposition, squarefree_divisors)
from numtheory.sieve import (moebius_segment, multiplicative_segment, multiplicative_sum,
                             odd_squarefree_between, primes_up_to, squarefree_segments,
                             squarefree_sieve)
from utils.errors import DomainError
from utils.summation import NeumaierSum, neumaier_sum

odd_moduli = st.integers(min_value=0, max_value=5000).map(lambda k: 2 * k + 1)


def test_factor_known_values():
    """Factorizations, Moebius and phi on hand-checked inputs"""
    assert factor(360).factors == ((2, 3), (3, 2), (5, 1))
    assert factor(1).factors == ()
    assert str(factor(1)) == "1"
    assert str(factor(72)) == "2^3*3^2"
    assert moebius(1) == 1
    assert moebius(30) == -1
    assert moebius(15) == 1
    assert moebius(12) == 0
    assert euler_phi(36) == 12
    assert euler_phi(1) == 1
    assert squarefree_decomposition(72) == (2, 6)
    assert squarefree_decomposition(45) == (5, 3)


def test_factor_rejects_bad_input():
    for bad in (0, -5, True, 2.0, 2**63):
        with pytest.raises(DomainError):
            factor(bad)


def test_squarefree_divisors():
    divisors = dict(squarefree_divisors(30))
    assert divisors == {1: 1, 2: -1, 3: -1, 5: -1, 6: 1, 10: 1, 15: 1, 30: -1}
    assert sum(divisors.values()) == 0
    assert list(squarefree_divisors(1)) == [(1, 1)]
    # repeated primes contribute once
    assert dict(squarefree_divisors(9)) == {1: 1, 3: -1}


def test_index_types_validate():
    assert TwistIndex.of(15).primes == [3, 5]
    assert TwistIndex.of(TwistIndex.of(1)).value == 1
    assert QuadraticFamilyIndex.of(105).conductor == 840
    for bad in (6, 9):
        with pytest.raises(DomainError):
            TwistIndex.of(bad)
        with pytest.raises(DomainError):
            QuadraticFamilyIndex.of(bad)


@settings(deadline=None)
@given(st.integers(min_value=1, max_value=10**9))
def test_squarefree_decomposition_property(n):
    core, e = squarefree_decomposition(n)
    assert core * e * e == n
    assert moebius(core) != 0


def test_kronecker_known_values():
    assert kronecker(8, 3) == -1
    assert kronecker(5, 2) == -1
    assert kronecker(7, 2) == 1
    assert kronecker(-3, 4) == 1
    assert kronecker(2, 4) == 0
    assert kronecker(1, 0) == 1
    assert kronecker(3, 0) == 0
    assert kronecker(24, 5) == 1
    with pytest.raises(DomainError):
        kronecker(0, 0)


def test_kronecker_euler_criterion():
    for p in sympy.primerange(3, 100):
        for m in range(1, 100):
            if m % p:
                assert kronecker(m, p) % p == pow(m, (p - 1) // 2, p), (m, p)


def test_family_characters_are_even():
    for d in range(1, 400, 2):
        assert kronecker(8 * d, -1) == 1
        # chi^(8d) has period 8d, so chi(8d - 1) = chi(-1)
        assert quadratic_character(d, np.array([8 * d - 1]))[0] == 1, d


@settings(deadline=None)
@given(st.integers(min_value=-10**6, max_value=10**6), odd_moduli)
def test_jacobi_array_matches_sympy(a, n):
    assert int(jacobi_array(a, n)) == sympy.jacobi_symbol(a % n, n)


@settings(deadline=None)
@given(st.integers(min_value=-1000, max_value=1000),
       st.integers(min_value=1, max_value=500),
       st.integers(min_value=1, max_value=500))
def test_kronecker_multiplicative_in_bottom(m, n1, n2):
    assert kronecker(m, n1 * n2) == kronecker(m, n1) * kronecker(m, n2)


def test_kronecker_array_matches_scalar():
    n = np.arange(1, 301)
    for m in (24, 40, -4, 5, 840, -8 * 7):
        expected = [kronecker(m, int(k)) for k in n]
        assert kronecker_array(m, n).tolist() == expected
    assert quadratic_character(3, n).tolist() == [kronecker(24, int(k)) for k in n]


def test_jacobi_array_broadcasts_over_moduli():
    moduli = np.array([3, 5, 7, 9, 15])
    assert jacobi_array(2, moduli).tolist() == [sympy.jacobi_symbol(2, int(k)) for k in moduli]
    with pytest.raises(DomainError):
        jacobi_array(1, np.array([3, 4]))


def test_primes_up_to():
    assert primes_up_to(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    assert len(primes_up_to(1)) == 0
    assert primes_up_to(2).tolist() == [2]
    assert primes_up_to(10**4).tolist() == list(sympy.primerange(2, 10**4 + 1))


def test_odd_squarefree_between():
    assert odd_squarefree_between(1, 30).tolist() == [1, 3, 5, 7, 11, 13, 15, 17, 19, 21, 23, 29]
    assert odd_squarefree_between(24, 28).tolist() == []
    assert len(odd_squarefree_between(10, 5)) == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=1500), st.integers(min_value=0, max_value=1500),
       st.integers(min_value=1, max_value=700))
def test_squarefree_segments_independent_of_segment_size(start, length, segment_size):
    limit = start + length
    found = np.concatenate(list(squarefree_segments(limit, start, segment_size)) or
                           [np.zeros(0, dtype=np.int64)])
    expected = [n for n in range(start, limit + 1) if n % 2 == 1 and moebius(n) != 0]
    assert found.tolist() == expected


def test_squarefree_sieve_matches_moebius():
    found = list(squarefree_sieve(500, segment_size=64))
    assert found == [d for d in range(1, 501, 2) if moebius(d) != 0]
    assert list(squarefree_sieve(1)) == [1]


def test_moebius_segment():
    assert moebius_segment(1, 200).tolist() == [moebius(n) for n in range(1, 200)]
    assert moebius_segment(1000, 1100).tolist() == [moebius(n) for n in range(1000, 1100)]


def test_multiplicative_segment_radical():
    values = multiplicative_segment(1, 60, lambda p: np.asarray(p, dtype=float), squarefree=False)
    radicals = [math.prod(factor(n).primes) for n in range(1, 60)]
    assert np.allclose(values.real, radicals)
    excluded = multiplicative_segment(1, 60, lambda p: np.ones(len(p)), exclude=[3])
    assert all(excluded[n - 1] == 0 for n in range(3, 60, 3))


def test_multiplicative_sum_moebius_over_squares():
    total = multiplicative_sum(1, 10**5, lambda p: np.asarray(p, dtype=float) ** -2.0)
    assert abs(total - 6 / math.pi**2) < 1e-4
    odd_total = multiplicative_sum(1, 10**5, lambda p: np.asarray(p, dtype=float) ** -2.0,
                                   exclude=[2])
    assert abs(odd_total - 8 / math.pi**2) < 1e-4
    # segmented and one-shot sums agree
    small = multiplicative_sum(1, 5000, lambda p: np.asarray(p, dtype=float) ** -2.0,
                               segment_size=333)
    whole = multiplicative_sum(1, 5000, lambda p: np.asarray(p, dtype=float) ** -2.0)
    assert abs(small - whole) < 1e-14


def test_neumaier_sum():
    assert neumaier_sum([1e16, 1.0, -1e16]) == 1.0
    assert neumaier_sum([1e16j, 1j, -1e16j]) == 1j
    assert neumaier_sum([]) == 0j

    first = NeumaierSum()
    first.extend([1e16, 1.0])
    second = NeumaierSum()
    second.extend([-1e16, 2.0])
    first += second
    assert first.value == 3.0
    assert first.count == 4


if __name__ == "__main__":
    print("🧪 Moment Lab - Arithmetic Core Tests\n")

    tests = [
        test_factor_known_values,
        test_factor_rejects_bad_input,
        test_squarefree_divisors,
        test_index_types_validate,
        test_squarefree_decomposition_property,
        test_kronecker_known_values,
        test_kronecker_euler_criterion,
        test_family_characters_are_even,
        test_jacobi_array_matches_sympy,
        test_kronecker_multiplicative_in_bottom,
        test_kronecker_array_matches_scalar,
        test_jacobi_array_broadcasts_over_moduli,
        test_primes_up_to,
        test_odd_squarefree_between,
        test_squarefree_segments_independent_of_segment_size,
        test_squarefree_sieve_matches_moebius,
        test_moebius_segment,
        test_multiplicative_segment_radical,
        test_multiplicative_sum_moebius_over_squares,
        test_neumaier_sum,
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
