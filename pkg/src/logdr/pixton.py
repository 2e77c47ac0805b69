"""Weightings mod r, the functions P and L on the subdivision, and the mixed class."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import numpy as np

from .graphs import DualGraph, QuasiStableGraph, cycle_space_basis, enumerate_stable_graphs
from .polyhedra import orthant
from .ppoly import (EdgePolynomial, PiecewisePolynomial, StackyPP, exp_series, monomials,
                    pp_arith)
from .rational import fmt
from .stability import StabilityCondition, is_small, nondegeneracy_certificate
from .subdivision import (ThetaSubdivision, degree_vector, frak_L_flow_form, frak_L_form,
                          same_on_cone, theta_subdivision, tree_solution)


class InterpolationError(ArithmeticError):
    pass


class CertificateError(ValueError):
    pass


def _graph(G):
    return G.graph if isinstance(G, QuasiStableGraph) else G


# ---------------------------------------------------------------- weightings

def _weighting_array(G: DualGraph, D, r: int) -> np.ndarray:
    """All weightings mod r with div w = D mod r, one per row, values in 0..r-1."""
    if sum(D) % r:
        return np.zeros((0, G.num_edges), dtype=np.int64)
    base = np.array(tree_solution(G, D, {}), dtype=np.int64) if G.num_edges else np.zeros(0, dtype=np.int64)
    basis = cycle_space_basis(G)
    if not basis:
        return (base % r)[None, :]
    cycles = np.array(basis, dtype=np.int64)
    h = len(basis)
    grid = np.array(list(itertools.product(range(r), repeat=h)), dtype=np.int64)
    return (base[None, :] + grid @ cycles) % r


def admissible_weightings(G, D, r: int) -> list[tuple[int, ...]]:
    G = _graph(G)
    return [tuple(int(x) for x in row) for row in _weighting_array(G, D, r)]


def _moment_sums(G: DualGraph, D, r: int, mons) -> list[int]:
    """sum over weightings of prod_e (w(e) (r - w(e)))^alpha_e, for each alpha."""
    W = _weighting_array(G, D, r)
    if not len(W):
        return [0] * len(mons)
    X = W * (r - W)
    t = max((sum(m) for m in mons), default=0)
    big = len(W) * (r * r // 4 + 1) ** t > 2 ** 62
    if big:
        X = X.astype(object)
    cache = {(0,) * G.num_edges: np.ones(len(W), dtype=object if big else np.int64)}
    out = []
    for m in mons:
        if m not in cache:
            i = max(j for j, e in enumerate(m) if e)
            parent = m[:i] + (m[i] - 1,) + m[i + 1:]
            cache[m] = cache[parent] * X[:, i]
        out.append(int(cache[m].sum()))
    return out


def _mono_factor(m) -> Fraction:
    den = 2 ** sum(m)
    for e in m:
        den *= factorial(e)
    return Fraction(1, den)


def cont_r(G, D, r: int, trunc: int) -> EdgePolynomial:
    """r^{-h1} sum_w prod_e exp(w(e) w(e') l_e / 2), truncated."""
    G = _graph(G)
    mons = monomials(G.num_edges, trunc)
    sums = _moment_sums(G, D, r, mons)
    scale = Fraction(1, r ** G.h1)
    return EdgePolynomial.from_dict(G.num_edges, {m: s * scale * _mono_factor(m) for m, s in zip(mons, sums)})


def _lagrange_weights(xs, x) -> list[Fraction]:
    ws = []
    for i, xi in enumerate(xs):
        w = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                w *= Fraction(x - xj, xi - xj)
        ws.append(w)
    return ws


_CONT_CACHE: dict = {}


def cont_r0(G, D, trunc: int, degree_bound: int | None = None) -> EdgePolynomial:
    """The r = 0 value of the polynomial in r interpolating cont_r.

    Each monomial coefficient is fitted by a polynomial of degree at most
    2*trunc through the first window of samples; the rest of that window and a
    second, disjoint window must lie on the same polynomial.
    """
    G = _graph(G)
    D = tuple(D)
    bound = max([abs(x) for x in D] + [0] if degree_bound is None else [degree_bound])
    key = (G, D, trunc, bound)
    if key in _CONT_CACHE:
        return _CONT_CACHE[key]
    mons = monomials(G.num_edges, trunc)
    r0 = 2 * bound + 2 * trunc + 3
    N = 2 * trunc + G.h1 + 2
    rs = list(range(r0, r0 + 2 * N))
    samples = []
    for r in rs:
        sums = _moment_sums(G, D, r, mons)
        samples.append([Fraction(s, r ** G.h1) for s in sums])
    fit = rs[:2 * trunc + 1]
    at_zero = _lagrange_weights(fit, 0)
    checks = [(k, _lagrange_weights(fit, rs[k])) for k in range(2 * trunc + 1, len(rs))]
    coeffs = {}
    for j, m in enumerate(mons):
        ys = [samples[k][j] for k in range(len(fit))]
        for k, ws in checks:
            if sum(w * y for w, y in zip(ws, ys)) != samples[k][j]:
                raise InterpolationError(f"windows disagree for monomial {m} on {G} with D={D}")
        val = sum(w * y for w, y in zip(at_zero, ys))
        if val:
            coeffs[m] = val * _mono_factor(m)
    out = EdgePolynomial.from_dict(G.num_edges, coeffs)
    _CONT_CACHE[key] = out
    return out


# ---------------------------------------------------------------- P and L

def _degree_bound(s: ThetaSubdivision, datum) -> int:
    deg = degree_vector(s.g, s.n, s.A, s.k, datum.qs)
    return max([abs(x) for x in deg] + [abs(x) for x in datum.D] + [0])


def frak_P_piece(s: ThetaSubdivision, datum, trunc: int) -> EdgePolynomial:
    m = datum.qs.base.num_edges
    hat = cont_r0(datum.qs.graph, datum.D, trunc, _degree_bound(s, datum))
    if m == 0:
        return EdgePolynomial.const(0, hat.coefficient(()))
    return hat.substitute([list(row) for row in datum.section], m)


def frak_P(s: ThetaSubdivision, trunc: int, check: bool = True) -> StackyPP:
    out = {}
    for G in s.graphs():
        data = s.maximal(G)
        pp = PiecewisePolynomial(orthant(G.num_edges), [d.cone for d in data],
                                 [frak_P_piece(s, d, trunc) for d in data])
        if check and pp.incompatibilities():
            raise ArithmeticError(f"P pieces disagree across a facet on {G}")
        out[G] = pp
    return StackyPP(out)


def frak_L(s: ThetaSubdivision, check: bool = True) -> StackyPP:
    out = {}
    for G in s.graphs():
        data = s.maximal(G)
        pieces = []
        for d in data:
            deg = degree_vector(s.g, s.n, s.A, s.k, d.qs)
            form = frak_L_form(d, deg)
            if check:
                if not same_on_cone(form, frak_L_flow_form(d, deg), d.cone):
                    raise ArithmeticError(f"the two formulas for L disagree on {G}, {d.I}")
                for base in range(d.qs.graph.num_vertices):
                    if not same_on_cone(form, frak_L_form(d, deg, base), d.cone):
                        raise ArithmeticError(f"L depends on the base vertex on {G}")
            pieces.append(EdgePolynomial.linear(form) if G.num_edges else EdgePolynomial.zero(0))
        pp = PiecewisePolynomial(orthant(G.num_edges), [d.cone for d in data], pieces)
        if check and pp.incompatibilities():
            raise ArithmeticError(f"L pieces disagree across a facet on {G}")
        out[G] = pp
    return StackyPP(out)


# ---------------------------------------------------------------- mixed classes

def taut_name(mono) -> str:
    parts = []
    if mono[0]:
        parts.append(f"k1^{mono[0]}")
    for i, e in enumerate(mono[1:], 1):
        if e:
            parts.append(f"psi{i}^{e}")
    return "*".join(parts) or "1"


def eta_exponential(n: int, A, k: int, trunc: int) -> EdgePolynomial:
    """exp(-eta/2) with eta = k^2 kappa_1 - sum a_i^2 psi_i, in variables (kappa_1, psi_1..psi_n)."""
    form = [Fraction(-k * k, 2)] + [Fraction(a * a, 2) for a in A]
    return exp_series(EdgePolynomial.linear(form), trunc)


@dataclass
class LogTautClass:
    g: int
    n: int
    trunc: int
    terms: dict = field(default_factory=dict)  # taut exponent tuple -> StackyPP

    def degree_part(self, h: int) -> "LogTautClass":
        out = {}
        for mono, pp in self.terms.items():
            j = sum(mono)
            if j > h:
                continue
            part = pp.map_pieces(lambda p, d=h - j: p.homogeneous(d))
            if not part.is_zero():
                out[mono] = part
        return LogTautClass(self.g, self.n, self.trunc, out)

    def taut_part(self) -> dict:
        """Coefficients of the taut monomials whose PP factor is a nonzero constant."""
        out = {}
        for mono, pp in self.terms.items():
            values = {p.coefficient((0,) * p.nvars) for f in pp.per_graph.values() for p in f.pieces}
            if len(values) == 1:
                c = values.pop()
                if c:
                    out[mono] = c
        return out

    def pp_part(self) -> StackyPP | None:
        """The PP factor of the monomial 1 without its constant term."""
        pp = self.terms.get((0,) * (self.n + 1))
        if pp is None:
            return None
        return pp.map_pieces(lambda p: p - p.coefficient((0,) * p.nvars))

    def is_zero(self) -> bool:
        return all(pp.is_zero() for pp in self.terms.values())

    def minus(self, other: "LogTautClass") -> "LogTautClass":
        out = {}
        monos = sorted(set(self.terms) | set(other.terms))
        for m in monos:
            if m in self.terms and m in other.terms:
                out[m] = self.terms[m].combine(other.terms[m], "sub")
            elif m in self.terms:
                out[m] = self.terms[m]
            else:
                out[m] = other.terms[m].scale(-1)
        return LogTautClass(self.g, self.n, self.trunc, out)

    def to_json(self) -> dict:
        taut = self.taut_part()
        return {"taut": [{"mono": taut_name(m), "coef": fmt(c)} for m, c in sorted(taut.items())],
                "pp": [{"mono": taut_name(m), "stackypp": pp.to_json()} for m, pp in sorted(self.terms.items())],
                "trunc": self.trunc}


def _mix(g, n, A, k, trunc, per_graph_fans) -> LogTautClass:
    """Tensor exp(-eta/2) with per-graph piecewise polynomials Q."""
    eta = eta_exponential(n, A, k, trunc)
    terms = {}
    for mono, c in eta.terms:
        j = sum(mono)
        pp = {G: PiecewisePolynomial(f.sigma, f.cones, [q.truncate(trunc - j).scale(c) for q in f.pieces])
              for G, f in per_graph_fans.items()}
        terms[mono] = StackyPP(pp)
    return LogTautClass(g, n, trunc, terms)


def p_theta_class(g: int, n: int, A, k: int, theta: StabilityCondition, trunc: int | None = None,
                  subdivision: ThetaSubdivision | None = None, require_small: bool = True,
                  check: bool = True) -> LogTautClass:
    top = 3 * g - 3 + n
    trunc = top if trunc is None else min(trunc, top)
    if not nondegeneracy_certificate(theta).ok:
        raise CertificateError("theta is not certified nondegenerate")
    if require_small and not is_small(theta):
        raise CertificateError("theta is not certified small")
    s = subdivision or theta_subdivision(g, n, A, k, theta)
    P = frak_P(s, trunc, check)
    L = frak_L(s, check)
    fans = {}
    for G in s.graphs():
        p, l = P[G], L[G]
        pieces = [exp_series(lp.scale(Fraction(-1, 2)), trunc).mul(pp, trunc) for pp, lp in zip(p.pieces, l.pieces)]
        fans[G] = PiecewisePolynomial(p.sigma, p.cones, pieces)
    return _mix(g, n, A, k, trunc, fans)


def logdr_class(g, n, A, k, theta, **kw) -> LogTautClass:
    """The degree-g part of the mixed class."""
    return p_theta_class(g, n, A, k, theta, trunc=g, **kw).degree_part(g)


def classical_dr_pp(g: int, n: int, A, k: int, trunc: int | None = None) -> LogTautClass:
    top = 3 * g - 3 + n
    trunc = top if trunc is None else min(trunc, top)
    fans = {}
    for G in enumerate_stable_graphs(g, n):
        deg = degree_vector(g, n, A, k, G)
        poly = cont_r0(G, deg, trunc, max([abs(x) for x in deg] + [0]))
        fans[G] = PiecewisePolynomial.constant_on(orthant(G.num_edges), poly)
    return _mix(g, n, A, k, trunc, fans)


@dataclass
class RelationCandidate:
    kind: str
    degree: int
    cls: LogTautClass
    verified: bool = False
    note: str = "vanishing in the Chow ring is not verified"

    def to_json(self) -> dict:
        return {"kind": self.kind, "degree": self.degree, "verified": self.verified, "note": self.note,
                "class": self.cls.to_json(), "zero_as_piecewise": self.cls.is_zero()}


def relation_classes(g, n, A, k, theta, theta2=None, h=None) -> list[RelationCandidate]:
    out = []
    if theta2 is not None:
        c1 = p_theta_class(g, n, A, k, theta, trunc=g).degree_part(g)
        c2 = p_theta_class(g, n, A, k, theta2, trunc=g).degree_part(g)
        out.append(RelationCandidate("theta difference", g, c1.minus(c2)))
    if h is not None:
        top = 3 * g - 3 + n
        if not g < h <= top:
            raise ValueError(f"h must satisfy {g} < h <= {top}")
        c = p_theta_class(g, n, A, k, theta, trunc=h).degree_part(h)
        out.append(RelationCandidate("higher degree", h, c))
    return out
