import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from logdr.graphs import QuasiStableGraph, StableGraph, canonical, divergence, enumerate_stable_graphs
from logdr.pixton import (InterpolationError, admissible_weightings, classical_dr_pp, cont_r, cont_r0,
                          eta_exponential, frak_L, frak_P, p_theta_class, relation_classes)
from logdr.ppoly import EdgePolynomial as EP, pp_equal, stacky_check
from logdr.stability import StabilityCondition, default_theta
from logdr.subdivision import theta_subdivision

LOOP = StableGraph((0,), ((1, 2),), ((0, 0),), 2)
BANANA = canonical(StableGraph((0, 0), ((1,), (2,)), ((0, 1), (0, 1)), 2))
DOLLAR = canonical(StableGraph((0, 0), ((1,), (2,)), ((0, 1),) * 3, 2))
BRIDGE = StableGraph((0, 1), ((1, 2), ()), ((0, 1),), 2)

small_graphs = [G for gn in [(1, 2), (1, 3), (2, 1), (2, 2)] for G in enumerate_stable_graphs(*gn)
                if G.num_edges <= 4]


@settings(max_examples=60)
@given(st.sampled_from(small_graphs), st.integers(1, 7), st.data())
def test_weighting_count(G, r, data):
    D = data.draw(st.lists(st.integers(-3, 3), min_size=G.num_vertices - 1, max_size=G.num_vertices - 1))
    D = tuple(D) + (-sum(D),)
    ws = admissible_weightings(G, D, r)
    assert len(ws) == r ** G.h1
    assert len(set(ws)) == len(ws)
    for w in ws:
        assert all((x - y) % r == 0 for x, y in zip(divergence(G, w), D))


def test_weighting_examples():
    assert len(admissible_weightings(LOOP, (0,), 5)) == 5
    assert len(admissible_weightings(BANANA, (0, 0), 3)) == 3
    assert len(admissible_weightings(BRIDGE, (2, -2), 7)) == 1
    assert admissible_weightings(BRIDGE, (1, 0), 3) == []


@pytest.mark.parametrize("r", range(1, 12))
def test_loop_lattice_sum(r):
    c = cont_r(LOOP, (0,), r, 1).coefficient((1,))
    assert c == Fraction(r * r - 1, 12)


@pytest.mark.parametrize("w", range(-5, 6))
def test_separating_edge(w):
    r = 13
    c = cont_r(BRIDGE, (w, -w), r, 1).coefficient((1,))
    wbar = w % r
    assert c == Fraction(wbar * (r - wbar), 2)
    assert cont_r0(BRIDGE, (w, -w), 1).coefficient((1,)) == Fraction(-w * w, 2)


def test_cont_r0_examples():
    assert cont_r0(LOOP, (0,), 1).coefficient((1,)) == Fraction(-1, 12)
    smooth = StableGraph((2,), ((1,),), (), 1)
    assert cont_r0(smooth, (0,), 3) == EP.const(0, 1)


def test_cont_r0_matches_direct_polynomial():
    # sum_w (w(r-w))^2 = r(r^4-1)/30, so the coefficient is (r^4-1)/240
    c = cont_r0(LOOP, (0,), 2).coefficient((2,))
    def exact(r):
        return Fraction(sum((w * (r - w)) ** 2 for w in range(r)), 8 * r)
    xs = list(range(20, 25))
    ys = [exact(x) for x in xs]
    val = Fraction(0)
    for i, xi in enumerate(xs):
        term = ys[i]
        for j, xj in enumerate(xs):
            if j != i:
                term *= Fraction(-xj, xi - xj)
        val += term
    assert c == val == Fraction(-1, 240)


def test_eta_exponential():
    e = eta_exponential(2, (3, -3), 0, 2)
    assert e.coefficient((0, 1, 0)) == Fraction(9, 2)
    assert e.coefficient((0, 1, 1)) == Fraction(81, 4)


def test_figure_class():
    th = default_theta(1, 2, seed=1)
    c = p_theta_class(1, 2, (3, -3), 0, th).degree_part(1)
    assert c.taut_part() == {(0, 1, 0): Fraction(9, 2), (0, 0, 1): Fraction(9, 2)}
    pp = c.terms[(0, 0, 0)]
    slopes = {C.rays: (p.coefficient((1, 0)), p.coefficient((0, 1))) for C, p in zip(pp[BANANA].cones, pp[BANANA].pieces)}
    assert slopes[((1, 1), (1, 2))] == slopes[((1, 1), (2, 1))] == (Fraction(-13, 12), Fraction(-13, 12))
    assert slopes[((0, 1), (1, 2))] == (Fraction(-37, 12), Fraction(-1, 12))
    assert slopes[((1, 0), (2, 1))] == (Fraction(-1, 12), Fraction(-37, 12))
    assert pp[canonical(LOOP)].pieces == [EP.linear([Fraction(-1, 12)])]


def test_L_on_banana():
    th = default_theta(1, 2, seed=1)
    s = theta_subdivision(1, 2, (3, -3), 0, th)
    L = frak_L(s)[BANANA]
    assert L.evaluate((3, 2)) == 10 and L.evaluate((1, 5)) == 6


def test_P_genus_one_degree_one():
    th = default_theta(1, 3, seed=2)
    s = theta_subdivision(1, 3, (2, -1, -1), 0, th)
    P = frak_P(s, 1)
    for G in s.graphs():
        from logdr.graphs import cycle_space_basis
        cyc = [e for e in range(G.num_edges) if any(g[e] for g in cycle_space_basis(G))]
        expected = EP.from_dict(G.num_edges, {(0,) * G.num_edges: 1,
                                              **{tuple(int(i == e) for i in range(G.num_edges)): Fraction(-1, 12) for e in cyc}})
        assert all(p == expected for p in P[G].pieces)


def test_genus_zero_is_trivial():
    th = default_theta(0, 4, seed=1)
    s = theta_subdivision(0, 4, (1, 1, -1, -1), 0, th)
    P = frak_P(s, 1)
    for G in s.graphs():
        assert all(p == EP.const(G.num_edges, 1) for p in P[G].pieces)
    c = p_theta_class(0, 3, (1, 1, -2), 0, default_theta(0, 3, 1))
    assert c.degree_part(0).taut_part() == {(0, 0, 0, 0): 1}


def test_dollar_family_stacky():
    th = default_theta(2, 2, seed=1)
    s = theta_subdivision(2, 2, (3, -3), 0, th)
    assert stacky_check(frak_P(s, 2)).ok
    assert stacky_check(frak_L(s)).ok


def test_classical_dr_genus_one():
    c = classical_dr_pp(1, 2, (3, -3), 0).degree_part(1)
    pp = c.terms[(0, 0, 0)]
    assert pp[canonical(LOOP)].pieces[0] == EP.linear([Fraction(-1, 12)])
    assert pp[BANANA].pieces[0] == EP.linear([Fraction(-1, 12)] * 2)


def _negated(th):
    return StabilityCondition.affine(th.g, th.n, -th.a, [-x for x in th.b])


@pytest.mark.parametrize("A", [(3, -3), (1, -1), (2, -1, -1), (4, 0, -4)])
def test_theta_difference_vanishes_in_genus_one(A):
    n = len(A)
    t1 = default_theta(1, n, seed=1)
    t2 = _negated(t1)
    rels = relation_classes(1, n, A, 0, t1, t2)
    assert rels[0].cls.is_zero() and not rels[0].verified


def test_higher_degree_relation_emitted():
    th = default_theta(1, 2, seed=1)
    rels = relation_classes(1, 2, (3, -3), 0, th, h=2)
    assert rels[0].degree == 2 and not rels[0].verified
    assert "not verified" in rels[0].note
    with pytest.raises(ValueError):
        relation_classes(1, 2, (3, -3), 0, th, h=1)
