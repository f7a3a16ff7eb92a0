import json
import random

import pytest

from ultrarigid.core_model import ColoredGraph, Framework, random_realization
from ultrarigid.decider import (
    BoundTooLarge,
    Model,
    VerdictKind,
    base_rank,
    decide,
    reduce_weight,
    rum_rational_spectrum,
)
from ultrarigid.core_model import rho_image, total_weight
from ultrarigid.fixtures import pulled_tight, square_lattice, three_loop, two_vertex_fixed
from ultrarigid.rigidity import TorsionPoint


def test_square_lattice_witness_details():
    verdict = decide(square_lattice(), Model.FIXED_LATTICE)
    assert verdict.witness.point == TorsionPoint(2, (1, 0))
    assert verdict.witness.as_dict()["omega"] == ["1/2", "0"]


def test_base_ranks():
    assert base_rank(three_loop(), Model.FLEXIBLE) == (3, 3)
    assert base_rank(square_lattice(), Model.FLEXIBLE) == (2, 3)
    assert base_rank(two_vertex_fixed(), Model.FIXED_LATTICE) == (2, 2)
    assert base_rank(two_vertex_fixed(), Model.FIXED_VOLUME) == (5, 5)


def test_two_vertex_fixed_is_ultrarigid_in_both_fixed_models():
    assert decide(two_vertex_fixed(), Model.FIXED_LATTICE).is_ultrarigid
    assert decide(two_vertex_fixed(), Model.FIXED_VOLUME).is_ultrarigid


def test_pulled_tight_flexes_at_order_two():
    verdict = decide(pulled_tight(), Model.FIXED_LATTICE)
    assert verdict.kind is VerdictKind.TORSION_FLEXIBLE
    assert verdict.witness.point.order == 2


def test_report_is_deterministic_json():
    first = json.dumps(decide(three_loop(), "flexible", order_limit=200).as_dict(), sort_keys=True)
    second = json.dumps(decide(three_loop(), "flexible", order_limit=200).as_dict(), sort_keys=True)
    assert first == second
    assert json.loads(first)["order_limit"] == 200


def test_worker_processes_give_the_same_report():
    single = decide(three_loop(), Model.FLEXIBLE, threads=1, order_limit=600)
    multi = decide(three_loop(), Model.FLEXIBLE, threads=2, order_limit=600)
    assert single.as_dict() == multi.as_dict()


def test_bound_ceiling():
    graph = ColoredGraph.build(2, 1, [(0, 0, (9, 0)), (0, 0, (0, 9)), (0, 0, (9, 9))])
    fw = Framework(graph, ((0, 0),), ((1, 0), (0, 1)))
    with pytest.raises(BoundTooLarge, match="bound too large"):
        decide(fw, Model.FLEXIBLE, max_bound=10_000)


def test_unknown_engine():
    with pytest.raises(ValueError):
        decide(three_loop(), engine="fast")


@pytest.mark.parametrize("seed", range(30))
def test_engines_agree(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    model = [Model.FLEXIBLE, Model.FIXED_LATTICE, Model.FIXED_VOLUME][seed % 3]
    m = 2 * n + (model is Model.FLEXIBLE)
    graph = ColoredGraph.build(2, n, [(rng.randrange(n), rng.randrange(n), (rng.randint(-1, 1), rng.randint(-1, 1)))
                                      for _ in range(m)])
    fw = random_realization(graph, rng, bits=20)
    batched = decide(fw, model, engine="batched", order_limit=40).as_dict()
    pointwise = decide(fw, model, engine="pointwise", order_limit=40).as_dict()
    batched.pop("engine")
    pointwise.pop("engine")
    assert batched == pointwise


def test_regauge_keeps_the_verdict_and_does_not_raise_weight():
    rng = random.Random(77)
    for _ in range(20):
        n = rng.randint(2, 3)
        graph = ColoredGraph.build(2, n, [(rng.randrange(n), rng.randrange(n), (rng.randint(-3, 3), rng.randint(-3, 3)))
                                          for _ in range(2 * n + 1)])
        lighter = reduce_weight(graph)
        assert total_weight(lighter) <= total_weight(graph)
        assert rho_image(lighter) == rho_image(graph)
        fw = random_realization(graph, rng, bits=20)
        plain = decide(fw, Model.FLEXIBLE, order_limit=30)
        regauged = decide(fw, Model.FLEXIBLE, order_limit=30, regauge=True)
        assert plain.kind is regauged.kind
        assert (plain.witness and plain.witness.point) == (regauged.witness and regauged.witness.point)


def test_rum_spectrum_of_square_lattice():
    spectrum = {(p.N, p.k): nullity for p, nullity in rum_rational_spectrum(square_lattice(), 4)}
    assert spectrum[(1, (0, 0))] == 2
    assert spectrum[(2, (0, 1))] == 1 and spectrum[(2, (1, 0))] == 1
    # every point on the two axes is a rigid unit mode
    assert spectrum[(3, (0, 1))] == 1 and spectrum[(4, (3, 0))] == 1
    assert (2, (1, 1)) not in spectrum


def test_rum_spectrum_of_three_loop_is_the_origin():
    assert [(p.N, p.k) for p, _ in rum_rational_spectrum(three_loop(), 6)] == [(1, (0, 0))]
