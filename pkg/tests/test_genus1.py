import itertools
import random
from fractions import Fraction
from math import gcd

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from logdr import linalg
from logdr.genus1 import (cycle_data, ddr_closed_form, ddr_m12, l_prime, logdr_g1, min_form_value,
                          pushforward_2d, subdivided_plane)
from logdr.graphs import StableGraph, canonical, enumerate_stable_graphs
from logdr.pixton import classical_dr_pp, p_theta_class
from logdr.polyhedra import cone_from_rays
from logdr.ppoly import EdgePolynomial as EP, PiecewisePolynomial, pp_equal
from logdr.stability import default_theta

BANANA = canonical(StableGraph((0, 0), ((1,), (2,)), ((0, 1), (0, 1)), 2))
LOOP = StableGraph((0,), ((1, 2),), ((0, 0),), 2)
X, Y = EP.var(2, 0), EP.var(2, 1)


def test_banana_chambers():
    L = l_prime(BANANA, (3, -3), 0)
    assert L.evaluate((3, 2)) == 10
    assert L.evaluate((1, 5)) == 6 and L.evaluate((5, 1)) == 6
    assert l_prime(canonical(LOOP), (3, -3), 0).pieces == [EP.zero(1)]


def test_small_ramification():
    L = l_prime(BANANA, (1, -1), 0)
    assert all(p.is_zero() for p in L.pieces)
    r = logdr_g1(1, (0,), 0)
    dr = classical_dr_pp(1, 1, (0,), 0).degree_part(1)
    one = (0, 0)
    for G in dr.terms[one].graphs():
        assert pp_equal(r.terms[one][G], dr.terms[one][G])


@settings(max_examples=40)
@given(st.sampled_from([G for n in (1, 2, 3) for G in enumerate_stable_graphs(1, n) if G.h1 == 1 and G.num_edges <= 3]),
       st.data())
def test_l_prime_matches_min_form(G, data):
    A = data.draw(st.lists(st.integers(-5, 5), min_size=G.n - 1, max_size=G.n - 1))
    A = tuple(A) + (-sum(A),)
    L = l_prime(G, A, 0)
    C, F0 = cycle_data(G, A, 0)
    rng = random.Random(0)
    for _ in range(10):
        pt = tuple(Fraction(rng.randint(1, 30), rng.randint(1, 4)) for _ in range(G.num_edges))
        assert L.evaluate(pt) == min_form_value(C, F0, pt)


def _hat_forms(u):
    """Per subdivision cone, the dual forms of its two rays."""
    out = []
    for a, b in zip(u, u[1:]):
        d = Fraction(a[0] * b[1] - a[1] * b[0])
        out.append(([b[1] / d, -b[0] / d], [-a[1] / d, a[0] / d]))
    return out


def localization(u, pieces):
    """p_* f by summing f/(index * product of dual forms) over the cones, then clearing."""
    x, y = sympy.symbols("x y")
    b1, b2 = u[0], u[-1]
    base = abs(b1[0] * b2[1] - b1[1] * b2[0])
    w1, w2 = _hat_forms([b1, b2])[0]
    top = (sympy.Rational(w1[0].numerator, w1[0].denominator) * x + sympy.Rational(w1[1].numerator, w1[1].denominator) * y) * \
          (sympy.Rational(w2[0].numerator, w2[0].denominator) * x + sympy.Rational(w2[1].numerator, w2[1].denominator) * y)
    total = 0
    for (a, b), p, (f1, f2) in zip(zip(u, u[1:]), pieces, _hat_forms(u)):
        idx = sympy.Rational(abs(a[0] * b[1] - a[1] * b[0]), base)
        lf = [sympy.Rational(c.numerator, c.denominator) * x + sympy.Rational(d.numerator, d.denominator) * y
              for c, d in (f1, f2)]
        poly = sum(sympy.Rational(c.numerator, c.denominator) * x ** e[0] * y ** e[1] for e, c in p.terms)
        total += poly / (idx * lf[0] * lf[1])
    res = sympy.expand(sympy.cancel(total * top))
    return sympy.Poly(res, x, y) if res != 0 else sympy.Poly(0, x, y)


def _as_sympy(p):
    x, y = sympy.symbols("x y")
    return sympy.Poly(sum(sympy.Rational(c.numerator, c.denominator) * x ** e[0] * y ** e[1] for e, c in p.terms) + 0 * x, x, y)


def random_pp(rng, u, degree=2):
    """A random facet-compatible function: global polynomial plus hat-function combinations."""
    sigma, cones = subdivided_plane(u)
    forms = _hat_forms(u)
    q = EP.from_dict(2, {e: Fraction(rng.randint(-3, 3)) for e in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
                         if sum(e) <= degree})
    c1 = [Fraction(rng.randint(-3, 3)) for _ in u]
    c2 = [Fraction(rng.randint(-3, 3)) for _ in u]
    d = [Fraction(rng.randint(-3, 3)) for _ in range(len(u) - 1)]
    pieces = []
    for i, (f1, f2) in enumerate(forms):
        h1, h2 = EP.linear(f1), EP.linear(f2)
        p = q + h1.scale(c1[i]) + h2.scale(c1[i + 1])
        if degree >= 2:
            p = p + (h1 * h1).scale(c2[i]) + (h2 * h2).scale(c2[i + 1]) + (h1 * h2).scale(d[i])
        pieces.append(p)
    return PiecewisePolynomial(sigma, cones, pieces)


def random_rays(rng):
    b1 = rng.choice([(1, 0), (2, 1), (1, 3)])
    b2 = rng.choice([(0, 1), (1, 4), (-1, 2)])
    inner = set()
    for _ in range(rng.randint(0, 5)):
        s, t = rng.randint(1, 4), rng.randint(1, 4)
        v = linalg.primitive([s * a + t * b for a, b in zip(b1, b2)])
        inner.add(v)
    from logdr.genus1 import _cross
    from functools import cmp_to_key
    return sorted({b1, b2} | inner, key=cmp_to_key(lambda u, v: -_cross(u, v)))


@settings(max_examples=200)
@given(st.integers(0, 10 ** 9))
def test_pushforward_matches_localization(seed):
    rng = random.Random(seed)
    u = random_rays(rng)
    f = random_pp(rng, u)
    assert f.is_compatible()
    p = pushforward_2d(f)
    assert _as_sympy(p) == localization(u, f.pieces)


@settings(max_examples=100)
@given(st.integers(0, 10 ** 9))
def test_pushforward_identity_and_projection(seed):
    rng = random.Random(seed)
    u = random_rays(rng)
    sigma, cones = subdivided_plane(u)
    q = EP.from_dict(2, {(2, 0): rng.randint(-3, 3), (1, 1): rng.randint(-3, 3), (0, 1): rng.randint(-3, 3), (0, 0): 1})
    assert pushforward_2d(PiecewisePolynomial(sigma, cones, [q] * len(cones))) == q
    lin = EP.linear([Fraction(rng.randint(-3, 3)), Fraction(rng.randint(-3, 3))])
    f = random_pp(rng, u, degree=1)
    g = f.map_pieces(lambda p: (p - p.coefficient((0, 0))) * lin)
    assert pushforward_2d(g) == (pushforward_2d(f) - pushforward_2d(f).coefficient((0, 0))) * lin


def test_star_subdivision_examples():
    sigma, cones = subdivided_plane([(1, 0), (1, 1), (0, 1)])
    assert pushforward_2d(PiecewisePolynomial(sigma, cones, [Y * Y, X * X])) == (X * Y).scale(-1)
    assert pushforward_2d(PiecewisePolynomial(sigma, cones, [Y * (X - Y), EP.zero(2)])) == X * Y


@pytest.mark.parametrize("a,b", [(a, b) for a in range(1, 5) for b in range(1, 5)])
def test_ddr_closed_form(a, b):
    strata = ddr_m12(a, b)
    coef = sum((s.coef for s in strata), Fraction(0))
    assert coef == ddr_closed_form(a, b) == Fraction(-(a * a * b * b - a * a - b * b + gcd(a, b) ** 2), 24)


def test_ddr_examples():
    assert ddr_closed_form(3, 3) == -3 and ddr_closed_form(2, 3) == -1 and ddr_closed_form(1, 1) == 0
    assert ddr_m12(1, 1) == []


@pytest.mark.parametrize("A", [(3, -3), (2, -1, -1), (4, -3, -1), (0, 0, 0)])
def test_pipeline_agrees_with_closed_form(A):
    n = len(A)
    one = (0,) * (n + 1)
    for seed in (1, 2):
        th = default_theta(1, n, seed)
        c = p_theta_class(1, n, A, 0, th, trunc=1).degree_part(1)
        r = logdr_g1(n, A, 0)
        assert c.taut_part() == r.taut_part()
        for G in r.terms[one].graphs():
            assert pp_equal(c.terms[one][G], r.terms[one][G])
