"""Exact polynomials in edge lengths and piecewise polynomials on fans."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial

from . import linalg
from .linalg import dot
from .polyhedra import RationalCone, cone_from_rays, intersect, orthant
from .rational import fmt


class PolyError(ValueError):
    pass


def _add_exp(a, b):
    return tuple(x + y for x, y in zip(a, b))


@dataclass(frozen=True)
class EdgePolynomial:
    nvars: int
    terms: tuple  # sorted ((exponent tuple, Fraction), ...)

    @staticmethod
    def from_dict(nvars: int, d: dict) -> "EdgePolynomial":
        return EdgePolynomial(nvars, tuple(sorted((k, Fraction(v)) for k, v in d.items() if v != 0)))

    @staticmethod
    def zero(nvars: int) -> "EdgePolynomial":
        return EdgePolynomial(nvars, ())

    @staticmethod
    def const(nvars: int, c) -> "EdgePolynomial":
        return EdgePolynomial.from_dict(nvars, {(0,) * nvars: c})

    @staticmethod
    def var(nvars: int, i: int) -> "EdgePolynomial":
        return EdgePolynomial.from_dict(nvars, {tuple(int(j == i) for j in range(nvars)): 1})

    @staticmethod
    def linear(form) -> "EdgePolynomial":
        n = len(form)
        return EdgePolynomial.from_dict(n, {tuple(int(j == i) for j in range(n)): c for i, c in enumerate(form)})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        if not isinstance(other, EdgePolynomial):
            other = EdgePolynomial.const(self.nvars, other)
        d = dict(self.terms)
        for k, v in other.terms:
            d[k] = d.get(k, 0) + v
        return EdgePolynomial.from_dict(self.nvars, d)

    __radd__ = __add__

    def __neg__(self):
        return EdgePolynomial(self.nvars, tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other):
        return self + (-other if isinstance(other, EdgePolynomial) else -Fraction(other))

    def scale(self, c) -> "EdgePolynomial":
        c = Fraction(c)
        if c == 0:
            return EdgePolynomial.zero(self.nvars)
        return EdgePolynomial(self.nvars, tuple((k, v * c) for k, v in self.terms))

    def __mul__(self, other):
        if not isinstance(other, EdgePolynomial):
            return self.scale(other)
        return self.mul(other)

    __rmul__ = __mul__

    def mul(self, other: "EdgePolynomial", truncate: int | None = None) -> "EdgePolynomial":
        d = {}
        for k1, v1 in self.terms:
            s1 = sum(k1)
            for k2, v2 in other.terms:
                if truncate is not None and s1 + sum(k2) > truncate:
                    continue
                k = _add_exp(k1, k2)
                d[k] = d.get(k, 0) + v1 * v2
        return EdgePolynomial.from_dict(self.nvars, d)

    def degree(self) -> int:
        return max((sum(k) for k, _ in self.terms), default=-1)

    def truncate(self, deg: int) -> "EdgePolynomial":
        return EdgePolynomial(self.nvars, tuple((k, v) for k, v in self.terms if sum(k) <= deg))

    def homogeneous(self, deg: int) -> "EdgePolynomial":
        return EdgePolynomial(self.nvars, tuple((k, v) for k, v in self.terms if sum(k) == deg))

    def coefficient(self, exp) -> Fraction:
        return dict(self.terms).get(tuple(exp), Fraction(0))

    def evaluate(self, point) -> Fraction:
        total = Fraction(0)
        for k, v in self.terms:
            t = v
            for x, e in zip(point, k):
                if e:
                    t *= Fraction(x) ** e
            total += t
        return total

    def substitute(self, forms, nvars: int | None = None) -> "EdgePolynomial":
        """Replace variable i by the linear form forms[i] in nvars new variables."""
        if nvars is None:
            nvars = len(forms[0]) if forms else 0
        lin = [EdgePolynomial.linear(f) if len(f) else EdgePolynomial.zero(nvars) for f in forms]
        powers = [[EdgePolynomial.const(nvars, 1)] for _ in forms]
        out = EdgePolynomial.zero(nvars)
        d = {}
        for k, v in self.terms:
            term = EdgePolynomial.const(nvars, v)
            for i, e in enumerate(k):
                while len(powers[i]) <= e:
                    powers[i].append(powers[i][-1] * lin[i])
                if e:
                    term = term * powers[i][e]
            for kk, vv in term.terms:
                d[kk] = d.get(kk, 0) + vv
        out = EdgePolynomial.from_dict(nvars, d)
        return out

    def rename(self, mapping, nvars: int) -> "EdgePolynomial":
        """Move variable i to position mapping[i] (None drops monomials using it)."""
        d = {}
        for k, v in self.terms:
            new = [0] * nvars
            ok = True
            for i, e in enumerate(k):
                if e:
                    if mapping[i] is None:
                        ok = False
                        break
                    new[mapping[i]] += e
            if ok:
                new = tuple(new)
                d[new] = d.get(new, 0) + v
        return EdgePolynomial.from_dict(nvars, d)

    def set_zero(self, variables) -> "EdgePolynomial":
        vs = set(variables)
        return EdgePolynomial(self.nvars, tuple((k, v) for k, v in self.terms
                                                if not any(k[i] for i in vs)))

    def vanishes_on_span(self, vectors) -> bool:
        """True if the polynomial is zero on the linear span of the vectors."""
        if self.is_zero():
            return True
        if not vectors:
            return self.coefficient((0,) * self.nvars) == 0
        forms = [[Fraction(v[i]) for v in vectors] for i in range(self.nvars)]
        return self.substitute(forms, len(vectors)).is_zero()

    def to_json(self) -> dict:
        out = {}
        for k, v in self.terms:
            name = "*".join(f"e{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(k) if e) or "1"
            out[name] = fmt(v)
        return out

    @staticmethod
    def from_json(nvars: int, d: dict) -> "EdgePolynomial":
        terms = {}
        for name, c in d.items():
            exp = [0] * nvars
            if name != "1":
                for part in name.split("*"):
                    var, _, e = part.partition("^")
                    exp[int(var[1:]) - 1] += int(e) if e else 1
            terms[tuple(exp)] = Fraction(c)
        return EdgePolynomial.from_dict(nvars, terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"{fmt(v)}*{k}" for k, v in self.terms)


def exp_series(p: EdgePolynomial, deg: int) -> EdgePolynomial:
    """exp(p) for p without constant term, truncated at total degree deg."""
    result = EdgePolynomial.const(p.nvars, 1)
    power = EdgePolynomial.const(p.nvars, 1)
    for j in range(1, deg + 1):
        power = power.mul(p, truncate=deg)
        if power.is_zero():
            break
        result = result + power.scale(Fraction(1, factorial(j)))
    return result.truncate(deg)


def monomials(nvars: int, deg: int):
    """Exponent vectors of total degree at most deg."""
    out = []
    for d in range(deg + 1):
        for combo in combinations_with_replacement(range(nvars), d):
            e = [0] * nvars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


# ---------------------------------------------------------------- piecewise

def _separated(C: RationalCone, D: RationalCone) -> bool:
    """Cheap certificate that C and D have no common interior point."""
    for a in C.ineqs:
        if all(dot(a, r) <= 0 for r in D.rays):
            return True
    for a in D.ineqs:
        if all(dot(a, r) <= 0 for r in C.rays):
            return True
    return False


@dataclass
class PiecewisePolynomial:
    sigma: RationalCone
    cones: list
    pieces: list

    @property
    def nvars(self) -> int:
        return self.sigma.dim

    @staticmethod
    def constant_on(sigma: RationalCone, poly: EdgePolynomial) -> "PiecewisePolynomial":
        return PiecewisePolynomial(sigma, [sigma], [poly])

    def piece_at(self, point) -> EdgePolynomial:
        for C, p in zip(self.cones, self.pieces):
            if C.contains(point):
                return p
        raise PolyError(f"point {point} outside the support")

    def evaluate(self, point) -> Fraction:
        return self.piece_at(point).evaluate(point)

    def map_pieces(self, fn) -> "PiecewisePolynomial":
        return PiecewisePolynomial(self.sigma, list(self.cones), [fn(p) for p in self.pieces])

    def scale(self, c) -> "PiecewisePolynomial":
        return self.map_pieces(lambda p: p.scale(c))

    def degree(self) -> int:
        return max((p.degree() for p in self.pieces), default=-1)

    def incompatibilities(self) -> list:
        """Pairs of maximal cones sharing a facet on which the pieces differ."""
        bad = []
        d = self.sigma.cone_dim
        for i in range(len(self.cones)):
            for j in range(i + 1, len(self.cones)):
                if _separated_strict(self.cones[i], self.cones[j]):
                    continue
                X = intersect(self.cones[i], self.cones[j])
                if X.cone_dim < d - 1:
                    continue
                if not (self.pieces[i] - self.pieces[j]).vanishes_on_span(list(X.rays)):
                    bad.append((i, j))
        return bad

    def is_compatible(self) -> bool:
        return not self.incompatibilities()

    def to_json(self, graph=None) -> dict:
        return {"graph": graph, "cones": [C.to_json() for C in self.cones],
                "pieces": [{"cone": i, "poly": p.to_json()} for i, p in enumerate(self.pieces)]}


def _separated_strict(C, D) -> bool:
    """Certificate that C and D meet in codimension at least two (or not at all)."""
    for a in C.ineqs:
        if all(dot(a, r) <= 0 for r in D.rays) and sum(1 for r in D.rays if dot(a, r) == 0) == 0:
            return True
    return False


def common_refinement(f: PiecewisePolynomial, g: PiecewisePolynomial):
    """Triples (cone, piece of f, piece of g) over full-dimensional overlaps."""
    if f.sigma.rays != g.sigma.rays:
        raise PolyError("support mismatch")
    d = f.sigma.cone_dim
    index = {C.rays: j for j, C in enumerate(g.cones)}
    out = []
    for i, C in enumerate(f.cones):
        j = index.get(C.rays)
        if j is not None:
            out.append((C, f.pieces[i], g.pieces[j]))
            continue
        for j, D in enumerate(g.cones):
            if _separated(C, D):
                continue
            X = intersect(C, D)
            if X.cone_dim == d:
                out.append((X, f.pieces[i], g.pieces[j]))
    return out


def pp_arith(f: PiecewisePolynomial, g: PiecewisePolynomial, op: str = "add",
             truncate: int | None = None) -> PiecewisePolynomial:
    cones, pieces = [], []
    for X, p, q in common_refinement(f, g):
        if op == "add":
            r = p + q
        elif op == "sub":
            r = p - q
        elif op == "mul":
            r = p.mul(q, truncate)
        else:
            raise PolyError(f"unknown operation {op}")
        if truncate is not None:
            r = r.truncate(truncate)
        cones.append(X)
        pieces.append(r)
    return PiecewisePolynomial(f.sigma, cones, pieces)


def pp_equal(f: PiecewisePolynomial, g: PiecewisePolynomial) -> bool:
    return all((p - q).is_zero() for _, p, q in common_refinement(f, g))


def pp_differences(f: PiecewisePolynomial, g: PiecewisePolynomial) -> list:
    return [(X, p - q) for X, p, q in common_refinement(f, g) if not (p - q).is_zero()]


def permute_pp(f: PiecewisePolynomial, edge_map) -> PiecewisePolynomial:
    """Transport f along the coordinate permutation e -> edge_map[e]."""
    n = f.nvars

    def move(v):
        out = [0] * n
        for e, x in enumerate(v):
            out[edge_map[e]] = x
        return out

    cones = [cone_from_rays(n, [move(r) for r in C.rays]) if C.rays else C for C in f.cones]
    pieces = [p.rename(list(edge_map), n) for p in f.pieces]
    return PiecewisePolynomial(f.sigma, cones, pieces)


# ---------------------------------------------------------------- stacky

@dataclass
class StackyPP:
    """Per stable graph, a piecewise polynomial on (a subdivision of) its cone."""
    per_graph: dict = field(default_factory=dict)

    def __getitem__(self, G):
        return self.per_graph[G]

    def graphs(self):
        return list(self.per_graph)

    def map_pieces(self, fn) -> "StackyPP":
        return StackyPP({G: f.map_pieces(fn) for G, f in self.per_graph.items()})

    def scale(self, c) -> "StackyPP":
        return self.map_pieces(lambda p: p.scale(c))

    def combine(self, other: "StackyPP", op: str, truncate=None) -> "StackyPP":
        return StackyPP({G: pp_arith(f, other.per_graph[G], op, truncate) for G, f in self.per_graph.items()})

    def is_zero(self) -> bool:
        return all(p.is_zero() for f in self.per_graph.values() for p in f.pieces)

    def to_json(self) -> list:
        return [f.to_json(G.to_json()) for G, f in self.per_graph.items()]


def strict_stacky(graphs, poly_of) -> StackyPP:
    """A strict piecewise polynomial given by one polynomial per graph cone."""
    return StackyPP({G: PiecewisePolynomial.constant_on(orthant(G.num_edges), poly_of(G)) for G in graphs})


@dataclass
class StackyReport:
    ok: bool
    failures: list = field(default_factory=list)


def stacky_check(f: StackyPP) -> StackyReport:
    """Face-map compatibility for single-edge contractions and automorphism invariance."""
    from .graphs import automorphisms, canonical_form, contract_edges

    rep = StackyReport(True)
    for G, pp in f.per_graph.items():
        for a in automorphisms(G):
            edge_map = [a.edge(e)[0] for e in range(G.num_edges)]
            if edge_map == list(range(G.num_edges)):
                continue
            diffs = pp_differences(pp, permute_pp(pp, edge_map))
            if diffs:
                rep.failures.append(("automorphism", G, edge_map, diffs[0][1]))
                break
        for e in range(G.num_edges):
            c = contract_edges(G, [e])
            H, rel = canonical_form(c.target)
            if H not in f.per_graph:
                rep.failures.append(("missing graph", H))
                continue
            target = f.per_graph[H]
            # coordinates of H's cone inside the face l_e = 0 of G's cone
            position = [None] * H.num_edges
            for j, src in enumerate(c.edge_injection):
                position[rel.edge(j)[0]] = src
            failure = _face_mismatch(pp, e, target, position, G.num_edges)
            if failure is not None:
                rep.failures.append(("face", G, e, H, failure))
    rep.ok = not rep.failures
    return rep


def _face_mismatch(pp, e, target, position, n):
    """Compare pp restricted to l_e = 0 with target pulled into G-coordinates."""
    d = pp.sigma.cone_dim
    for C, p in zip(pp.cones, pp.pieces):
        # the face of C on l_e = 0 must be (d-1)-dimensional to carry information
        face_rays = [r for r in C.rays if r[e] == 0]
        if (linalg.rank(face_rays, n) if face_rays else 0) < d - 1:
            continue
        face = cone_from_rays(n, face_rays) if face_rays else None
        for D, q in zip(target.cones, target.pieces):
            lifted = [[0] * n for _ in D.rays]
            for k, r in enumerate(D.rays):
                for j, x in enumerate(r):
                    lifted[k][position[j]] = x
            Dl = cone_from_rays(n, lifted) if lifted else None
            if face is None or Dl is None:
                overlap = face is None and Dl is None
                span = []
            else:
                if _separated_within(face, Dl):
                    continue
                X = intersect(face, Dl)
                overlap = X.cone_dim == d - 1
                span = list(X.rays)
            if not overlap:
                continue
            q_lifted = q.rename(position, n)
            diff = p.set_zero([e]) - q_lifted
            if not diff.vanishes_on_span(span):
                return (C, D, diff)
    return None


def _separated_within(C, D) -> bool:
    for a in C.ineqs:
        if all(dot(a, r) <= 0 for r in D.rays) and any(dot(a, r) < 0 for r in D.rays):
            return True
    for a in D.ineqs:
        if all(dot(a, r) <= 0 for r in C.rays) and any(dot(a, r) < 0 for r in C.rays):
            return True
    return False
