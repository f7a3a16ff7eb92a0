from fractions import Fraction

import pytest
import sympy
from sympy.matrices.normalforms import smith_normal_form
from hypothesis import given, settings
from hypothesis import strategies as st

from ultrarigid.numtheory import (
    bound_N0,
    constant_Cd,
    cyclotomic_poly,
    divisors,
    euler_phi,
    factorize,
    fraction_to_decimal,
    hermite_basis,
    is_prime,
    phi_filter,
    subgroup_index,
)


@pytest.mark.parametrize("n", list(range(1, 400)) + [2**31 - 1, 600851475143, 2 * 3 * 5 * 7 * 11 * 13])
def test_factorization_matches_sympy(n):
    assert factorize(n) == sympy.factorint(n) if n > 1 else factorize(n) == {}
    assert euler_phi(n) == sympy.totient(n)
    assert divisors(n) == sympy.divisors(n)
    assert is_prime(n) == sympy.isprime(n)


def test_factorize_rejects_non_positive():
    with pytest.raises(ValueError):
        factorize(0)


def test_small_cyclotomic_polynomials():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(2) == (1, 1)
    assert cyclotomic_poly(4) == (1, 0, 1)
    assert cyclotomic_poly(6) == (1, -1, 1)
    # first order with a coefficient of absolute value two
    assert 2 in map(abs, cyclotomic_poly(105))


def test_lattice_constant_in_the_plane():
    assert fraction_to_decimal(constant_Cd(2), 20) == "1.5196713713031850947"
    assert constant_Cd(2) ** 4 > Fraction(16, 3) > (constant_Cd(2) - Fraction(1, 2**250)) ** 4


def test_bound_errors_and_growth():
    with pytest.raises(ValueError):
        bound_N0(1, 3)
    with pytest.raises(ValueError):
        bound_N0(2, -1)
    assert bound_N0(2, 30).N0 == 30325
    assert bound_N0(2, 30, field_degree=2).N0 > bound_N0(2, 30).N0


def test_phi_filter_examples():
    bound = bound_N0(2, 18)
    assert phi_filter(1, bound)
    assert phi_filter(210, bound) and phi_filter(2310, bound)
    assert not phi_filter(8089, bound)  # a prime: phi is large
    small = bound_N0(2, 1)
    assert phi_filter(30, small)
    assert not phi_filter(210, small)


def test_phi_filter_agrees_with_floating_point_away_from_ties():
    bound = bound_N0(3, 4)
    c_hat = float(bound.C_hat)
    for n in range(2, 3000):
        margin = euler_phi(n) - c_hat * n ** (2 / 3)
        if abs(margin) > 1e-6:
            assert phi_filter(n, bound) == (margin <= 0)


@pytest.mark.parametrize(
    "vectors,index",
    [
        ([(1, 0), (0, 1)], 1),
        ([(2, 0), (0, 3)], 6),
        ([(2, 1), (1, 2)], 3),
        ([(4, 6), (6, 9)], None),
        ([(1, 1)], None),
        ([(2, 0), (0, 2), (1, 1)], 2),
        ([(0, 0), (3, 0), (0, 5), (6, 10)], 15),
    ],
)
def test_subgroup_index_examples(vectors, index):
    assert subgroup_index(vectors) == index


def test_subgroup_index_in_three_dimensions():
    assert subgroup_index([(2, 0, 0), (0, 3, 0), (0, 0, 5)], dim=3) == 30
    assert subgroup_index([(1, 0, 0), (0, 1, 0)], dim=3) is None


vectors_2d = st.lists(st.tuples(st.integers(-30, 30), st.integers(-30, 30)), min_size=0, max_size=5)


@settings(max_examples=300, deadline=None)
@given(vectors_2d)
def test_planar_index_matches_smith_form(vectors):
    ours = subgroup_index(vectors)
    if not vectors:
        assert ours is None
        return
    matrix = sympy.Matrix(vectors)
    if matrix.rank() < 2:
        assert ours is None
        return
    snf = smith_normal_form(matrix, domain=sympy.ZZ)
    assert ours == abs(snf[0, 0] * snf[1, 1])


@settings(max_examples=200, deadline=None)
@given(vectors_2d, st.integers(-3, 3), st.integers(0, 4))
def test_hermite_basis_is_canonical(vectors, factor, target):
    basis = hermite_basis(vectors, 2)
    if not vectors or target >= len(vectors):
        return
    # adding a multiple of one generator to another does not change the span
    changed = list(vectors)
    source = (target + 1) % len(vectors)
    changed[target] = tuple(a + factor * b for a, b in zip(vectors[target], vectors[source]))
    if source != target:
        assert hermite_basis(changed, 2) == basis
