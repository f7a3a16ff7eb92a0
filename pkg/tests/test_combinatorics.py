import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ultrarigid.combinatorics import (
    SubsetCatalog,
    check_thm_fixed,
    check_thm_flexible,
    enumerate_epimorphisms,
    find_circuit,
    is_colored_laman,
    is_colored_laman_sparse,
    is_gamma22,
    is_gamma22_spanning,
    is_ross,
    is_ross_sparse,
    is_unit_area_laman,
    killing_epimorphism,
    pebble_game,
    spanning_ross_subgraph,
    T_value,
)
from ultrarigid.core_model import ColoredGraph, CyclicColoredGraph, push_colors
from ultrarigid.fixtures import one_vertex_rank_one_loops, square_lattice, three_loop, two_vertex_fixed
from ultrarigid.numtheory import factorize


def _brute_sparse(n, pairs, k, l):
    for r in range(1, len(pairs) + 1):
        for subset in itertools.combinations(pairs, r):
            touched = {v for e in subset for v in e}
            if r > k * len(touched) - l:
                return False
    return True


edge_lists = st.integers(1, 4).flatmap(
    lambda n: st.tuples(st.just(n), st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=9)))


@settings(max_examples=300, deadline=None)
@given(edge_lists, st.sampled_from([(2, 2), (2, 3), (1, 1), (2, 1)]))
def test_pebble_game_matches_brute_force(graph, params):
    n, pairs = graph
    k, l = params
    result = pebble_game(n, pairs, k, l)
    assert result.sparse == _brute_sparse(n, pairs, k, l)
    assert _brute_sparse(n, [pairs[i] for i in result.accepted], k, l)


def test_pebble_game_examples():
    assert not pebble_game(1, [(0, 0)], 2, 3).sparse
    # a single vertex carries no edges in the (2,2) count
    assert not pebble_game(1, [(0, 0)], 2, 2).sparse
    assert pebble_game(1, [(0, 0)], 2, 1).tight
    assert not pebble_game(2, [(0, 1), (0, 1)], 2, 3).sparse
    assert pebble_game(2, [(0, 1), (0, 1)], 2, 2).tight
    with pytest.raises(ValueError):
        pebble_game(2, [], 1, 2)


def test_find_circuit():
    graph = ColoredGraph.build(2, 3, [(0, 1, (0, 0)), (0, 1, (1, 0)), (1, 2, (0, 0)), (1, 2, (0, 1)), (0, 1, (0, 1))])
    assert find_circuit(graph, [0, 1, 2, 3], 4) == [0, 1, 4]
    assert find_circuit(graph, [0, 2], 1) is None


def test_epimorphisms_small_orders():
    assert enumerate_epimorphisms(1) == [(0, 0)]
    assert enumerate_epimorphisms(2) == [(0, 1), (1, 0), (1, 1)]
    assert enumerate_epimorphisms(3) == [(0, 1), (1, 0), (1, 1), (1, 2)]
    assert len(enumerate_epimorphisms(6, canonical=False)) == 24


@pytest.mark.parametrize("N", range(2, 31))
def test_epimorphism_orbit_count(N):
    # one orbit per cyclic quotient: N * prod(1 + 1/p)
    expected = N
    for p in factorize(N):
        expected = expected // p * (p + 1)
    reps = enumerate_epimorphisms(N)
    assert len(reps) == expected
    units = [u for u in range(1, N) if all(u % p for p in factorize(N))]
    orbits = {frozenset((u * a % N, u * b % N) for u in units) for a, b in enumerate_epimorphisms(N, canonical=False)}
    assert {min(o) for o in orbits} == set(reps)


def test_killing_epimorphism():
    assert killing_epimorphism([(1, 0), (0, 1)]) is None
    assert killing_epimorphism([(2, 0), (0, 2)]) == (2, (0, 1))
    assert killing_epimorphism([(3, 0), (0, 3), (1, 1)]) == (3, (1, 2))
    assert killing_epimorphism([(1, 0)]) == (2, (0, 1))


def _random_graph(rng, n, m):
    return ColoredGraph.build(2, n, [(rng.randrange(n), rng.randrange(n), (rng.randint(-1, 1), rng.randint(-1, 1)))
                                     for _ in range(m)])


@pytest.mark.parametrize("seed", range(60))
def test_certificates_agree_with_subset_enumeration(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    graph = _random_graph(rng, n, 2 * n + rng.choice((-2, -1, 0, 1)))
    for predicate in (is_colored_laman_sparse, is_unit_area_laman, is_ross_sparse):
        assert bool(predicate(graph, method="exhaustive")) == bool(predicate(graph, method="certificate", seed=seed))
    if graph.n_edges == 2 * n - 2:
        assert bool(is_ross(graph, method="exhaustive")) == bool(is_ross(graph, method="certificate"))
    N = rng.randint(2, 5)
    pushed = push_colors(graph, (1, rng.randrange(N)), N)
    for tight in (True, False):
        assert bool(is_gamma22(pushed, method="exhaustive", require_tight=tight)) == \
            bool(is_gamma22(pushed, method="certificate", require_tight=tight, seed=seed))
    assert bool(is_gamma22_spanning(pushed, method="exhaustive")) == \
        bool(is_gamma22_spanning(pushed, method="certificate", seed=seed))


def test_predicate_examples():
    assert is_colored_laman(three_loop().graph)
    assert not is_colored_laman(one_vertex_rank_one_loops().graph)
    assert not is_colored_laman(square_lattice().graph)
    assert is_unit_area_laman(two_vertex_fixed().graph)
    assert spanning_ross_subgraph(two_vertex_fixed().graph) is not None
    assert spanning_ross_subgraph(ColoredGraph.build(2, 2, [(0, 1, (0, 0)), (0, 1, (0, 0)), (0, 0, (1, 0))])) is None


def test_T_value():
    cg = CyclicColoredGraph(3, 2, ((0, 1, 1), (1, 0, 2), (0, 0, 1)))
    assert T_value(cg, [0, 1]) == 1
    assert T_value(cg, [2]) == 0
    with pytest.raises(ValueError):
        T_value(cg, [0])


def test_fixed_theorem_examples():
    assert check_thm_fixed(two_vertex_fixed().graph).holds
    report = check_thm_fixed(square_lattice().graph)
    assert report.step == "circuit-image"
    assert report.certificate["epimorphism"] == {"N": 2, "psi": [0, 1]}
    assert check_thm_fixed(three_loop().graph).step == "edge-count"


def test_flexible_theorem_examples():
    assert check_thm_flexible(three_loop().graph).holds
    assert check_thm_flexible(one_vertex_rank_one_loops().graph).step == "colored-laman"
    doubled = ColoredGraph.build(2, 1, [(0, 0, (2, 0)), (0, 0, (0, 1)), (0, 0, (2, 1))])
    report = check_thm_flexible(doubled)
    assert report.step == "gamma-22" and report.certificate == {"N": 2, "psi": [1, 0]}


@pytest.mark.parametrize("seed", range(40))
def test_reduced_flexible_check_matches_literal(seed):
    rng = random.Random(1000 + seed)
    n = rng.randint(1, 3)
    graph = _random_graph(rng, n, 2 * n + 1)
    reduced = check_thm_flexible(graph, order_limit=13)
    literal = check_thm_flexible(graph, order_limit=13, literal=True)
    assert reduced.holds == literal.holds
    assert reduced.step == literal.step


def test_subset_catalog_limits():
    graph = ColoredGraph.build(2, 1, [(0, 0, (1, 0))] * 17)
    with pytest.raises(ValueError):
        SubsetCatalog(graph)
    assert len(SubsetCatalog(three_loop().graph).entries) == 7
