import random
from fractions import Fraction

import pytest

from ultrarigid.core_model import ColoredGraph, Framework, random_realization
from ultrarigid.cyclotomic import cyclo_context, find_modp_context
from ultrarigid.fixtures import square_lattice, two_vertex_fixed
from ultrarigid.rigidity import (
    TorsionPoint,
    augment_fixed_volume,
    build_S,
    build_Shat,
    enumerate_torsion,
    evaluate_at,
    rank_exact,
    rank_mod_matrix,
    rank_modp,
)


def test_torsion_point_helpers():
    point = TorsionPoint(12, (4, 8))
    assert point.order == 3
    assert point.reduced() == TorsionPoint(3, (1, 2))
    assert point.as_fractions() == (Fraction(1, 3), Fraction(2, 3))
    assert point.exponent((1, 1)) == 0
    assert TorsionPoint(5, (0, 0)).is_identity


def test_full_enumeration_counts():
    points = list(enumerate_torsion(4, 2, galois_reduced=False))
    assert len(points) == 15
    assert len(set(points)) == 15


def test_reduced_enumeration_uses_divisors_first():
    points = list(enumerate_torsion(6, 2))
    assert [p.k[0] for p in points[:6]] == [1] * 6
    assert {p.k[0] for p in points} == {1, 2, 3, 0}
    assert points[-1] == TorsionPoint(6, (0, 5))
    assert len(points) == 4 * 6 - 1


def test_reduced_enumeration_meets_every_orbit():
    N = 12
    units = [u for u in range(1, N) if all(u % q for q in (2, 3))]
    listed = set(enumerate_torsion(N, 2))
    for point in enumerate_torsion(N, 2, galois_reduced=False):
        assert any(TorsionPoint(N, tuple(u * a % N for a in point.k)) in listed for u in units)


def test_build_S_layout():
    fw = two_vertex_fixed()
    S = build_S(fw)
    assert S.shape == (4, 8)
    # edge (0,1) with color (1,0): lattice group 0 holds the edge vector
    row = S.rows[1]
    assert row[4:6] == row[2:4] and row[6:8] == (0, 0)
    assert row[0:2] == tuple(-x for x in row[2:4])


def test_loop_rows():
    fw = square_lattice()
    S = build_S(fw)
    assert S.rows[0] == (0, 0, 1, 0, 0, 0)
    shat = build_Shat(fw)
    assert shat.shape == (2, 2)
    assert shat.rows[0] == {0: ((Fraction(1), (-1, 0)), (Fraction(-1), (0, 0)))}


def test_fixed_volume_row_is_trace_of_inverse():
    graph = ColoredGraph.build(2, 1, [(0, 0, (1, 0))])
    fw = Framework(graph, ((0, 0),), ((2, 0), (0, 4)))
    augmented = augment_fixed_volume(build_S(fw), fw)
    assert augmented.rows[-1] == (0, 0, Fraction(1, 2), 0, 0, Fraction(1, 4))


def test_rank_exact_over_cyclotomic_field():
    ctx = cyclo_context(3)
    w = ctx.zeta_power(1)
    # rows (1, w) and (w, w^2) are dependent
    assert rank_exact([[ctx.one(), w], [w, w * w]]) == 1
    assert rank_exact([[ctx.one(), w], [w, ctx.one()]]) == 2
    assert rank_exact([[Fraction(0)] * 3]) == 0


def test_rank_mod_matrix():
    assert rank_mod_matrix([[1, 2], [2, 4]], 7) == 1
    assert rank_mod_matrix([[1, 2], [3, 4]], 2) == 1
    assert rank_mod_matrix([[1, 2], [3, 4]], 5) == 2


@pytest.mark.parametrize("seed", range(5))
def test_modular_rank_bounded_by_exact(seed):
    rng = random.Random(seed)
    graph = ColoredGraph.build(2, 2, [(rng.randrange(2), rng.randrange(2), (rng.randint(-1, 1), rng.randint(-1, 1)))
                                      for _ in range(4)])
    fw = random_realization(graph, rng, bits=12)
    shat = build_Shat(fw)
    for point in enumerate_torsion(6, 2):
        exact = rank_exact(evaluate_at(shat, point))
        assert rank_modp(shat, point, find_modp_context(6, bits=62, seed=seed)) <= exact
