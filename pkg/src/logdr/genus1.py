"""Genus one: the flow-selection function L', its pushforward, and double-double ramification."""
from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key
from math import gcd

from . import linalg
from .graphs import StableGraph, cycle_space_basis, enumerate_stable_graphs
from .polyhedra import RationalCone, cone_from_constraints, cone_from_rays, orthant
from .ppoly import EdgePolynomial, PiecewisePolynomial, StackyPP, pp_arith
from .pixton import LogTautClass, classical_dr_pp
from .subdivision import degree_vector, tree_solution
from .tautexpr import DecoratedStratum, strict_pp_to_strata


class Genus1Error(ValueError):
    pass


class DDRMismatch(ArithmeticError):
    pass


def _check_type(n, A, k):
    if len(A) != n or sum(A) != k * n:
        raise Genus1Error(f"genus one needs sum of A = k n, got {A} with k = {k}")


def cycle_data(G: StableGraph, A, k):
    """(C, F0): the unit cycle flow and one flow with divergence deg_{k,A}."""
    deg = degree_vector(1, G.n, A, k, G)
    basis = cycle_space_basis(G)
    if len(basis) != 1:
        return None, tuple(tree_solution(G, deg, {}))
    return tuple(basis[0]), tuple(tree_solution(G, deg, {}))


def _selection_range(C, F0):
    vals = [F0[e] * C[e] for e in range(len(C)) if C[e]]
    return range(-max(vals), -min(vals) + 2)


def l_prime(G: StableGraph, A, k, check: bool = True) -> PiecewisePolynomial:
    """sum over cycle edges of (F^2 - F C) l_e for the flow F selected on each chamber."""
    A = tuple(A)
    _check_type(G.n, A, k)
    E = G.num_edges
    sigma = orthant(E)
    C, F0 = cycle_data(G, A, k)
    if C is None:
        return PiecewisePolynomial.constant_on(sigma, EdgePolynomial.zero(E))
    units = [[int(i == j) for j in range(E)] for i in range(E)]
    cones, pieces, flows = [], [], []
    for m in _selection_range(C, F0):
        F = [f + m * c for f, c in zip(F0, C)]
        upper = [F[e] * C[e] if C[e] else 0 for e in range(E)]
        lower = [-(F[e] - C[e]) * C[e] if C[e] else 0 for e in range(E)]
        cone = cone_from_constraints(E, (), units + [upper, lower])
        if cone.cone_dim < E:
            continue
        form = [F[e] ** 2 - F[e] * C[e] if C[e] else 0 for e in range(E)]
        if any(c.rays == cone.rays for c in cones):
            # the selection ties on the whole chamber; both flows give the same value
            i = next(i for i, c in enumerate(cones) if c.rays == cone.rays)
            if pieces[i] != EdgePolynomial.linear(form):
                raise Genus1Error(f"tied flows disagree on {G}")
            continue
        cones.append(cone)
        pieces.append(EdgePolynomial.linear(form))
        flows.append(tuple(F))
    pp = PiecewisePolynomial(sigma, cones, pieces)
    if check:
        if pp.incompatibilities():
            raise Genus1Error(f"chambers of L' disagree across a wall on {G}")
        if not matches_min_form(pp, C, F0):
            raise Genus1Error(f"L' differs from twice the sum of m_F on {G}")
    return pp


def m_F_branches(C, F):
    """The two linear forms whose minimum is m_F."""
    pos = [F[e] * C[e] if F[e] * C[e] > 0 else 0 for e in range(len(C))]
    neg = [-F[e] * C[e] if F[e] * C[e] < 0 else 0 for e in range(len(C))]
    return pos, neg


def min_form_value(C, F0, point) -> Fraction:
    """2 sum_F m_F at a point."""
    total = Fraction(0)
    for m in _selection_range(C, F0):
        F = [f + m * c for f, c in zip(F0, C)]
        pos, neg = m_F_branches(C, F)
        total += min(linalg.dot(pos, point), linalg.dot(neg, point))
    return 2 * total


def matches_min_form(pp: PiecewisePolynomial, C, F0) -> bool:
    """Cone by cone, 2 sum_F m_F is linear and equal to the piece.

    On each cone one branch of every minimum must win at all rays; then it wins
    on the whole cone, and the sum of winners is compared with the piece.
    """
    E = len(C)
    for cone, piece in zip(pp.cones, pp.pieces):
        total = [Fraction(0)] * E
        for m in range(min(_selection_range(C, F0)) - 1, max(_selection_range(C, F0)) + 2):
            F = [f + m * c for f, c in zip(F0, C)]
            pos, neg = m_F_branches(C, F)
            if all(linalg.dot(pos, r) <= linalg.dot(neg, r) for r in cone.rays):
                branch = pos
            elif all(linalg.dot(neg, r) <= linalg.dot(pos, r) for r in cone.rays):
                branch = neg
            else:
                return False
            total = [x + 2 * y for x, y in zip(total, branch)]
        form = [piece.coefficient(tuple(int(i == j) for j in range(E))) for i in range(E)]
        if any(linalg.dot(total, r) != linalg.dot(form, r) for r in cone.rays):
            return False
    return True


def l_prime_stacky(n, A, k) -> StackyPP:
    return StackyPP({G: l_prime(G, A, k) for G in enumerate_stable_graphs(1, n)})


def logdr_g1(n: int, A, k: int) -> LogTautClass:
    """Classical DR in degree one minus half of L'."""
    A = tuple(A)
    _check_type(n, A, k)
    dr = classical_dr_pp(1, n, A, k, trunc=1)
    one = (0,) * (n + 1)
    lp = l_prime_stacky(n, A, k)
    terms = dict(dr.terms)
    half = {G: pp_arith(f, lp[G].scale(Fraction(1, 2)), "sub", 1) for G, f in dr.terms[one].per_graph.items()}
    terms[one] = StackyPP(half)
    return LogTautClass(1, n, 1, terms).degree_part(1)


# ---------------------------------------------------------------- 2d pushforward

def _cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def _dual_pair(b1, b2):
    """Linear forms on the plane: (1 on b1, 0 on b2) and (0 on b1, 1 on b2)."""
    d = Fraction(_cross(b1, b2))
    return [b2[1] / d, -b2[0] / d], [-b1[1] / d, b1[0] / d]


def ordered_rays(f: PiecewisePolynomial) -> list[tuple[int, int]]:
    """Rays of the subdivision, from one boundary ray of the support to the other."""
    if f.nvars != 2 or f.sigma.cone_dim != 2:
        raise Genus1Error("pushforward_2d needs a two-dimensional cone")
    b1, b2 = sorted(f.sigma.rays)
    if _cross(b1, b2) < 0:
        b1, b2 = b2, b1
    rays = {r for C in f.cones for r in C.rays} | {b1, b2}
    # sort by angle from b1 towards b2
    return sorted(rays, key=cmp_to_key(lambda u, v: -_cross(u, v)))


def pushforward_2d(f: PiecewisePolynomial) -> EdgePolynomial:
    """Push a piecewise polynomial of degree at most 2 on a subdivided 2d cone to the cone."""
    if f.degree() > 2:
        raise Genus1Error("pushforward_2d handles degree at most 2")
    u = ordered_rays(f)
    b1, b2 = u[0], u[-1]
    if _cross(b1, b2) <= 0:
        raise Genus1Error("boundary rays are not ordered")
    w1, w2 = _dual_pair(b1, b2)
    x1, x2 = EdgePolynomial.linear(w1), EdgePolynomial.linear(w2)
    mid = [tuple(a + b for a, b in zip(u[i], u[i + 1])) for i in range(len(u) - 1)]
    pieces = [f.piece_at(p) for p in mid]
    total = EdgePolynomial.const(2, pieces[0].coefficient((0, 0)))
    # degree one: only the boundary hat functions survive
    first = pieces[0].homogeneous(1)
    last = pieces[-1].homogeneous(1)
    total = total + x1.scale(first.evaluate(b1)) + x2.scale(last.evaluate(b2))
    # degree two in the basis phi_i^2, phi_i phi_{i+1}
    q = [p.homogeneous(2) for p in pieces]
    alpha = [q[0].evaluate(u[0])] + [q[i - 1].evaluate(u[i]) for i in range(1, len(u))]
    beta = [q[i].evaluate(mid[i]) - alpha[i] - alpha[i + 1] for i in range(len(u) - 1)]
    base = abs(_cross(b1, b2))
    adj = [Fraction(base, abs(_cross(u[i], u[i + 1]))) for i in range(len(u) - 1)]  # times x1 x2
    xy = x1 * x2
    c_xy = sum((b * a for b, a in zip(beta, adj)), Fraction(0))
    mform = [a + b for a, b in zip(w1, w2)]
    for i in range(1, len(u) - 1):
        mi = linalg.dot(mform, u[i])
        c_xy -= alpha[i] * (linalg.dot(mform, u[i - 1]) * adj[i - 1] + linalg.dot(mform, u[i + 1]) * adj[i]) / mi
    # boundary squares: phi_0 x1 = phi_0^2 + x1(u_1) phi_0 phi_1 pushed forward is x1^2
    c_xy -= alpha[0] * linalg.dot(w1, u[1]) * adj[0]
    c_xy -= alpha[-1] * linalg.dot(w2, u[-2]) * adj[-1]
    return total + x1.mul(x1).scale(alpha[0]) + x2.mul(x2).scale(alpha[-1]) + xy.scale(c_xy)


def subdivided_plane(rays) -> tuple[RationalCone, list[RationalCone]]:
    """The 2d cone spanned by the outer rays and its subdivision by all the rays."""
    rays = sorted(set(tuple(r) for r in rays), key=cmp_to_key(lambda u, v: -_cross(u, v)))
    sigma = cone_from_rays(2, [rays[0], rays[-1]])
    return sigma, [cone_from_rays(2, [rays[i], rays[i + 1]]) for i in range(len(rays) - 1)]


# ---------------------------------------------------------------- double-double ramification

def ddr_closed_form(a: int, b: int) -> Fraction:
    a, b = abs(a), abs(b)
    return Fraction(-(a * a * b * b - a * a - b * b + gcd(a, b) ** 2), 24)


def _banana(G) -> bool:
    return G.num_vertices == 2 and G.num_edges == 2 and all(u != v for u, v in G.edges)


def ddr_correction_pp(a: int, b: int) -> StackyPP:
    """A quarter of the pushforward of L'_A L'_B, per cone of the genus-one two-pointed fan."""
    A, B = (a, -a), (b, -b)
    out = {}
    for G in enumerate_stable_graphs(1, 2):
        if G.num_edges > 2:
            raise Genus1Error("only cones of dimension at most two are supported")
        prod = pp_arith(l_prime(G, A, 0), l_prime(G, B, 0), "mul")
        if G.num_edges == 2:
            poly = pushforward_2d(prod).scale(Fraction(1, 4))
        else:
            # cones of dimension <= 1 are not subdivided
            if any(len(C.rays) and C.cone_dim < G.num_edges for C in prod.cones):
                raise Genus1Error("unexpected subdivision of a low-dimensional cone")
            poly = prod.pieces[0].scale(Fraction(1, 4)) if prod.pieces else EdgePolynomial.zero(G.num_edges)
        out[G] = PiecewisePolynomial.constant_on(orthant(G.num_edges), poly)
    return StackyPP(out)


def ddr_m12(a: int, b: int, check: bool = True) -> list[DecoratedStratum]:
    if a == 0 or b == 0:
        raise Genus1Error("a and b must be nonzero")
    strata = strict_pp_to_strata(ddr_correction_pp(a, b))
    if check:
        target = ddr_closed_form(a, b)
        got = sum((s.coef for s in strata if _banana(s.graph) and s.edge_exp == (0, 0)), Fraction(0))
        others = [s for s in strata if not (_banana(s.graph) and s.edge_exp == (0, 0))]
        if got != target or others:
            raise DDRMismatch(f"double-edge coefficient {got}, closed form {target}, extra strata {others}")
    return strata
