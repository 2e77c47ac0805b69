"""Decorated strata and their correspondence with strict piecewise polynomials."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import factorial

from .graphs import (StableGraph, automorphism_order, automorphisms, canonical_form, contract_edges,
                     enumerate_stable_graphs, isomorphism)
from .polyhedra import orthant
from .ppoly import EdgePolynomial, PiecewisePolynomial, StackyPP
from .rational import fmt


class StrataError(ValueError):
    pass


def global_name(mono) -> str:
    """Monomial in (kappa_1, psi_1, ..., psi_n) as text."""
    if not mono:
        return "1"
    parts = []
    if mono[0]:
        parts.append(f"k1^{mono[0]}")
    for i, e in enumerate(mono[1:], 1):
        if e:
            parts.append(f"psi{i}^{e}")
    return "*".join(parts) or "1"


@dataclass(frozen=True)
class DecoratedStratum:
    """coef * j_{graph *} (prod_e (-psi'_e - psi''_e)^{d_e} * global monomial)."""
    graph: StableGraph
    edge_exp: tuple
    global_mono: tuple = ()
    coef: Fraction = Fraction(1)

    @property
    def degree(self) -> int:
        return self.graph.num_edges + sum(self.edge_exp) + sum(self.global_mono)

    def key(self) -> tuple:
        return (self.graph.key(), self.edge_exp, self.global_mono)

    def to_json(self) -> dict:
        return {"graph": self.graph.to_json(), "edgeExp": list(self.edge_exp),
                "global": global_name(self.global_mono), "coef": fmt(self.coef)}


def morphisms(source: StableGraph, target: StableGraph):
    """Graph morphisms source -> target as edge maps E(target) -> E(source)."""
    drop = source.num_edges - target.num_edges
    if drop < 0:
        return []
    out = []
    for E0 in combinations(range(source.num_edges), drop):
        c = contract_edges(source, E0)
        iso = isomorphism(c.target, target)
        if iso is None:
            continue
        for sigma in automorphisms(c.target):
            rel = sigma.then(iso)
            emap = [0] * target.num_edges
            for e in range(c.target.num_edges):
                emap[rel.edge(e)[0]] = c.edge_injection[e]
            out.append(tuple(emap))
    return out


def phi_value(source: StableGraph, target: StableGraph, d) -> EdgePolynomial:
    """sum over morphisms f: source -> target of prod_e l_{f(e)}^{d_e + 1}."""
    terms: dict = {}
    for emap in morphisms(source, target):
        exp = [0] * source.num_edges
        for e, x in enumerate(emap):
            exp[x] += d[e] + 1
        exp = tuple(exp)
        terms[exp] = terms.get(exp, 0) + 1
    return EdgePolynomial.from_dict(source.num_edges, terms)


def phi_strata(G: StableGraph, d, graphs=None) -> tuple[StackyPP, DecoratedStratum]:
    d = tuple(d)
    if len(d) != G.num_edges or any(x < 0 for x in d):
        raise StrataError(f"bad edge exponents {d} for {G}")
    if graphs is None:
        graphs = enumerate_stable_graphs(G.genus, G.n)
    f = StackyPP({H: PiecewisePolynomial.constant_on(orthant(H.num_edges), phi_value(H, G, d)) for H in graphs})
    C, _ = canonical_form(G)
    return f, DecoratedStratum(C, _orbit_min(C, d))


def _orbit_min(G, exp) -> tuple:
    best = None
    for sigma in automorphisms(G):
        moved = [0] * G.num_edges
        for e, x in enumerate(exp):
            moved[sigma.edge(e)[0]] = x
        moved = tuple(moved)
        if best is None or moved < best:
            best = moved
    return best


def strict_pp_to_strata(f: StackyPP, global_mono=()) -> list[DecoratedStratum]:
    """Strata whose images under the correspondence add up to f.

    On each graph only the monomials using every edge are read off; the rest of
    the polynomial is the restriction of coarser graphs and is accounted for there.
    """
    acc: dict = {}
    seen = set()
    for G, pp in f.per_graph.items():
        if len(pp.pieces) != 1:
            raise StrataError(f"piecewise polynomial on {G} is not strict")
        C, rel = canonical_form(G)
        if C.key() in seen:
            continue
        seen.add(C.key())
        poly = pp.pieces[0]
        aut = automorphism_order(C)
        for exp, c in poly.terms:
            if any(x == 0 for x in exp):
                continue
            moved = [0] * C.num_edges
            for e, x in enumerate(exp):
                moved[rel.edge(e)[0]] = x
            key = _orbit_min(C, tuple(x - 1 for x in moved))
            k = (C.key(), key)
            if k not in acc:
                acc[k] = DecoratedStratum(C, key, tuple(global_mono), Fraction(0))
            s = acc[k]
            acc[k] = DecoratedStratum(s.graph, s.edge_exp, s.global_mono, s.coef + Fraction(c) / aut)
    return [s for _, s in sorted(acc.items()) if s.coef]


def strata_to_pp(strata, graphs) -> StackyPP:
    """Sum of the correspondence images of the strata, on the given graphs."""
    total = {H: EdgePolynomial.zero(H.num_edges) for H in graphs}
    for s in strata:
        for H in graphs:
            total[H] = total[H] + phi_value(H, s.graph, s.edge_exp).scale(s.coef)
    return StackyPP({H: PiecewisePolynomial.constant_on(orthant(H.num_edges), p) for H, p in total.items()})


def round_trip_ok(f: StackyPP) -> bool:
    graphs = list(f.per_graph)
    back = strata_to_pp(strict_pp_to_strata(f), graphs)
    return all(back[G].pieces[0] == f[G].pieces[0] for G in graphs)


def substitute_edge_series(coeffs) -> list[Fraction]:
    """Replace l^d by (-x)^(d-1) in sum_d coeffs[d] l^d; the constant term must vanish."""
    if coeffs and coeffs[0]:
        raise StrataError("series has a constant term")
    return [Fraction(c) * (-1) ** (d - 1) for d, c in enumerate(coeffs) if d >= 1]


def edge_factor(c, deg: int) -> list[Fraction]:
    """Coefficients in x of (1 - exp(-c x)) / x up to x^deg."""
    c = Fraction(c)
    return [-(-c) ** (j + 1) / factorial(j + 1) for j in range(deg + 1)]
