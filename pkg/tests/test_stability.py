from fractions import Fraction

import pytest

from logdr.graphs import QuasiStableGraph, StableGraph, canonical, contract_edges, enumerate_stable_graphs
from logdr.stability import (StabilityCondition, StabilityError, default_theta, is_nondegenerate, is_small,
                             is_theta_stable, nondegeneracy_certificate, stable_multidegrees, theta_value)

DOLLAR = canonical(StableGraph((0, 0), ((1,), (2,)), ((0, 1),) * 3, 2))


def test_trivial_is_small_but_degenerate():
    th = StabilityCondition.trivial(1, 2)
    assert is_small(th)
    cert = nondegeneracy_certificate(th)
    assert not cert.ok and cert.witness is not None


def test_canonical_theta_is_degenerate():
    assert not is_nondegenerate(StabilityCondition.canonical_theta(2, 1))


@pytest.mark.parametrize("gn", [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2)])
def test_default_theta_certified(gn):
    th = default_theta(*gn, seed=1)
    assert th.degree == 0 and is_small(th) and is_nondegenerate(th)
    assert default_theta(*gn, seed=1) == th


def test_genus_two_needs_nonzero_a():
    th = default_theta(2, 2, seed=1)
    assert th.a != 0


def test_degree_must_match():
    with pytest.raises(StabilityError):
        StabilityCondition(1, 2, "affine", Fraction(0), (Fraction(1), Fraction(0)), Fraction(0))


def test_additivity_under_contraction():
    th = default_theta(2, 2, seed=3)
    for G in enumerate_stable_graphs(2, 2):
        for e in range(G.num_edges):
            c = contract_edges(G, [e])
            for w in range(c.target.num_vertices):
                pre = sum(th.base_value(G, v) for v in range(G.num_vertices) if c.vertex_surjection[v] == w)
                assert pre == th.base_value(c.target, w)


def test_exceptional_vertices_have_zero_weight():
    th = default_theta(1, 2, seed=1)
    G = canonical(StableGraph((0, 0), ((1,), (2,)), ((0, 1), (0, 1)), 2))
    qs = QuasiStableGraph(G, (0,))
    exc = [v for v, x in enumerate(qs.exceptional) if x]
    assert [theta_value(th, qs, v) for v in exc] == [0]


def test_dollar_sign_multidegrees():
    from logdr.graphs import quasi_stable_models
    th = default_theta(2, 2, seed=1)
    total = sum(len(stable_multidegrees(q, th, 0)) for q in quasi_stable_models(DOLLAR))
    assert total == 12


def test_admissibility_enforced():
    th = default_theta(1, 2, seed=1)
    G = canonical(StableGraph((0, 0), ((1,), (2,)), ((0, 1), (0, 1)), 2))
    qs = QuasiStableGraph(G, (0,))
    with pytest.raises(StabilityError):
        is_theta_stable(qs, (0,) * qs.graph.num_vertices, th)


def test_table_kind_matches_affine():
    th = default_theta(1, 2, seed=1)
    values = {(G, v): th.base_value(G, v) for G in enumerate_stable_graphs(1, 2) for v in range(G.num_vertices)}
    tab = StabilityCondition.from_table(1, 2, values, 0)
    for G in enumerate_stable_graphs(1, 2):
        for v in range(G.num_vertices):
            assert tab.base_value(G, v) == th.base_value(G, v)
