import itertools
import random
from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, settings, strategies as st

from logdr.graphs import StableGraph, automorphism_order, canonical, enumerate_stable_graphs
from logdr.pixton import classical_dr_pp
from logdr.ppoly import EdgePolynomial as EP, exp_series, stacky_check
from logdr.tautexpr import (edge_factor, phi_strata, round_trip_ok, strata_to_pp, strict_pp_to_strata,
                            substitute_edge_series)


def spanning_trees(G):
    for sub in itertools.combinations(range(G.num_edges), G.num_vertices - 1):
        parent = list(range(G.num_vertices))

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        ok = True
        for e in sub:
            a, b = find(G.edges[e][0]), find(G.edges[e][1])
            if a == b:
                ok = False
                break
            parent[a] = b
        if ok:
            yield set(sub)


@pytest.mark.parametrize("g", [2, 3])
def test_rose_spanning_tree_identity(g):
    rose = StableGraph((0,), ((),), ((0, 0),) * g, 0)
    f, stratum = phi_strata(rose, (0,) * g)
    assert stratum.coef == 1 and stratum.degree == g
    scale = 2 ** g * factorial(g)
    for G in enumerate_stable_graphs(g, 0):
        if G.h1 != g:
            continue
        expected = {}
        for T in spanning_trees(G):
            exp = tuple(0 if e in T else 1 for e in range(G.num_edges))
            expected[exp] = expected.get(exp, 0) + scale
        assert f[G].pieces[0] == EP.from_dict(G.num_edges, expected)


def test_banana_self_morphisms():
    G = canonical(StableGraph((0, 0), ((1,), (2,)), ((0, 1), (0, 1)), 2))
    f, _ = phi_strata(G, (0, 0))
    assert f[G].pieces[0] == EP.from_dict(2, {(1, 1): 2})


def test_smooth_graph_is_constant_one():
    G = StableGraph((1,), ((1, 2),), (), 2)
    f, _ = phi_strata(G, ())
    assert all(pp.pieces[0] == EP.const(H.num_edges, 1) for H, pp in f.per_graph.items())


def test_genus_one_dr_strata():
    c = classical_dr_pp(1, 2, (3, -3), 0).degree_part(1)
    pp = c.terms[(0, 0, 0)]
    strata = strict_pp_to_strata(pp)
    assert len(strata) == 1
    s = strata[0]
    assert s.graph.num_edges == 1 and s.graph.h1 == 1 and s.edge_exp == (0,)
    assert s.coef * automorphism_order(s.graph) == Fraction(-1, 12)


def test_square_on_one_edge():
    graphs = enumerate_stable_graphs(0, 4)
    one_edge = [G for G in graphs if G.num_edges == 1][0]
    f, _ = phi_strata(one_edge, (1,))
    strata = strict_pp_to_strata(f)
    assert [(s.edge_exp, s.coef) for s in strata] == [((1,), 1)]
    G = [H for H in graphs if H.num_edges == 1][0]
    assert f[G].pieces[0] == EP.from_dict(1, {(2,): 1})


def test_zero_gives_nothing():
    f, _ = phi_strata(StableGraph((1,), ((1, 2),), (), 2), ())
    assert strict_pp_to_strata(f.scale(0)) == []


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_round_trip_random(seed):
    rng = random.Random(seed)
    graphs = enumerate_stable_graphs(1, 2)
    pick = [(rng.choice(graphs), rng.randint(-3, 3)) for _ in range(3)]
    strata = []
    total = None
    for G, c in pick:
        d = tuple(rng.randint(0, 2) for _ in range(G.num_edges))
        f, s = phi_strata(G, d, graphs)
        f = f.scale(c)
        total = f if total is None else total.combine(f, "add")
    assert stacky_check(total).ok
    assert round_trip_ok(total)
    back = strata_to_pp(strict_pp_to_strata(total), graphs)
    for G in graphs:
        assert back[G].pieces[0] == total[G].pieces[0]


def test_degree_bookkeeping():
    graphs = enumerate_stable_graphs(1, 3)
    for G in graphs:
        d = tuple(1 for _ in range(G.num_edges))
        f, s = phi_strata(G, d, graphs)
        assert s.degree == 2 * G.num_edges
        assert all(p.degree() in (-1, 2 * G.num_edges) or p.is_zero() for pp in f.per_graph.values() for p in pp.pieces)


@pytest.mark.parametrize("c", [Fraction(1), Fraction(3, 2), Fraction(-2), Fraction(7)])
def test_substitution_rule(c):
    deg = 4
    series = exp_series(EP.linear([c]), deg + 1)
    coeffs = [series.coefficient((d,)) for d in range(deg + 2)]
    coeffs[0] = 0
    assert substitute_edge_series(coeffs) == edge_factor(c, deg)
