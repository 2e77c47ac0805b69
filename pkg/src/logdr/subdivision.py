"""Flows, Abel-Jacobi cones and the theta-subdivision of the moduli cone stack."""
from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import linalg
from .graphs import (DualGraph, QuasiStableGraph, StableGraph, automorphisms, canonical_form,
                     contract_edges, cycle_space_basis, divergence, enumerate_stable_graphs,
                     quasi_stable_models, spanning_tree, tree_path)
from .polyhedra import (RationalCone, cone_from_constraints, cone_from_rays, face_generated,
                        linear_image, orthant, verify_fan_cover)
from .rational import fmt
from .stability import StabilityCondition, nondegeneracy_certificate, stable_multidegrees


class SubdivisionError(ValueError):
    pass


def degree_vector(g: int, n: int, A, k: int, qs) -> tuple[int, ...]:
    """k(2g(v) - 2 + n(v)) - sum of a_i at v on stable vertices, 0 on exceptional ones."""
    A = tuple(A)
    if len(A) != n or sum(A) != k * (2 * g - 2 + n):
        raise SubdivisionError(f"sum of {A} must equal k(2g-2+n) = {k * (2 * g - 2 + n)}")
    G = qs.graph if isinstance(qs, QuasiStableGraph) else qs
    out = []
    for v in range(G.num_vertices):
        if G.exceptional[v]:
            out.append(0)
        else:
            out.append(k * (2 * G.genera[v] - 2 + G.valence(v)) - sum(A[i - 1] for i in G.legs[v]))
    return tuple(out)


# ---------------------------------------------------------------- flows

def tree_solution(G: DualGraph, target, fixed: dict) -> list[int]:
    """The flow with the given divergence whose non-tree values are `fixed`."""
    tree, reach = spanning_tree(G)
    flow = [0] * G.num_edges
    for e, x in fixed.items():
        flow[e] = x
    rest = [t - d for t, d in zip(target, divergence(G, flow))]
    # peel subtrees from the leaves
    order = sorted(reach, key=lambda v: -len(tree_path(G, reach, v)))
    sub = list(rest)
    for v in order:
        e, s = reach[v]
        if e == -1:
            continue
        # inflow needed by the subtree below v arrives through e
        flow[e] = s * sub[v]
        parent = G.edges[e][0] if s == 1 else G.edges[e][1]
        sub[parent] += sub[v]
    return flow


def is_acyclic(G: DualGraph, flow) -> bool:
    parent = list(range(G.num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e, (u, v) in enumerate(G.edges):
        if flow[e] == 0:
            parent[find(u)] = find(v)
    succ = {}
    for e, (u, v) in enumerate(G.edges):
        if flow[e] == 0:
            continue
        a, b = (find(u), find(v)) if flow[e] > 0 else (find(v), find(u))
        if a == b:
            return False
        succ.setdefault(a, set()).add(b)
    state = {}

    def has_cycle(x):
        state[x] = 1
        for y in succ.get(x, ()):
            s = state.get(y, 0)
            if s == 1 or (s == 0 and has_cycle(y)):
                return True
        state[x] = 2
        return False

    return not any(state.get(x, 0) == 0 and has_cycle(x) for x in list(succ))


def acyclic_flows(G: DualGraph, target) -> list[tuple[int, ...]]:
    """Every acyclic integer flow with the given divergence."""
    if sum(target) != 0:
        return []
    G = G.graph if isinstance(G, QuasiStableGraph) else G
    bound = sum(t for t in target if t > 0)
    tree, _ = spanning_tree(G)
    tset = set(tree)
    free = [e for e in range(G.num_edges) if e not in tset]
    out = set()
    for values in itertools.product(range(-bound, bound + 1), repeat=len(free)):
        fixed = dict(zip(free, values))
        if any(G.is_loop(e) and x for e, x in fixed.items()):
            continue
        flow = tree_solution(G, target, fixed)
        if any(abs(x) > bound for x in flow):
            continue
        if is_acyclic(G, flow):
            out.add(tuple(flow))
    return sorted(out)


# ---------------------------------------------------------------- cones

@dataclass(frozen=True)
class AJConeDatum:
    qs: QuasiStableGraph
    D: tuple
    I: tuple
    tau: RationalCone
    cone: RationalCone
    section: tuple  # rows: derived edges, columns: base edges

    @property
    def dim(self) -> int:
        return self.cone.cone_dim

    def hat_lengths(self) -> list[list[Fraction]]:
        return [list(r) for r in self.section]

    def is_interior(self) -> bool:
        p = self.cone.interior_point()
        return all(x > 0 for x in p)

    def to_json(self) -> dict:
        return {"qsmodel": self.qs.base.to_json(self.qs.subdivided), "D": list(self.D), "I": list(self.I),
                "cone": self.cone.to_json(), "section": [[fmt(x) for x in r] for r in self.section]}


def aj_cone(qs: QuasiStableGraph, I, D=()) -> AJConeDatum:
    G = qs.graph
    if not is_acyclic(G, I):
        raise SubdivisionError(f"flow {I} is not acyclic")
    E = G.num_edges
    eqs = [[c * x for c, x in zip(gamma, I)] for gamma in cycle_space_basis(G)]
    ineqs = [[int(i == j) for j in range(E)] for i in range(E)]
    tau = cone_from_constraints(E, eqs, ineqs)
    img = linear_image(tau, qs.projection())
    if img.section is None:
        raise SubdivisionError(f"projection is not injective on the cone of {qs}, {I}")
    return AJConeDatum(qs, tuple(D), tuple(I), tau, img.cone, tuple(tuple(r) for r in img.section))


def check_section(datum: AJConeDatum) -> bool:
    """section(pr(x)) = x on tau and pr(section(y)) = y on the image cone."""
    P = datum.qs.projection()
    S = datum.section
    for r in datum.tau.rays:
        if linalg.matvec(S, linalg.matvec(P, r)) != list(r):
            return False
    for r in datum.cone.rays:
        if linalg.matvec(P, linalg.matvec(S, r)) != list(r):
            return False
    return True


def decorated_key(G: DualGraph, D, I) -> tuple:
    """Isomorphism-invariant key of a graph with a vertex labelling and a flow."""
    verts = [(G.exceptional[v], G.genera[v], G.legs[v], D[v]) for v in range(G.num_vertices)]
    groups = {}
    for v, key in enumerate(verts):
        groups.setdefault(key, []).append(v)
    classes = [groups[k] for k in sorted(groups)]
    best = None
    for combo in itertools.product(*(itertools.permutations(c) for c in classes)):
        order = [v for part in combo for v in part]
        pos = {v: i for i, v in enumerate(order)}
        edges = []
        for e, (u, v) in enumerate(G.edges):
            a, b, x = pos[u], pos[v], I[e]
            if a > b or (a == b and x < 0):
                a, b, x = b, a, -x
            edges.append((a, b, x))
        edges = tuple(sorted(edges))
        if best is None or edges < best:
            best = edges
    return (tuple(sorted(verts)), best)


@dataclass
class ThetaSubdivision:
    g: int
    n: int
    A: tuple
    k: int
    theta: StabilityCondition
    per_graph: dict = field(default_factory=dict)  # StableGraph -> list of AJConeDatum

    def graphs(self):
        return list(self.per_graph)

    def maximal(self, G) -> list[AJConeDatum]:
        return [d for d in self.per_graph[G] if d.cone.cone_dim == G.num_edges]

    def rays(self, G) -> list[AJConeDatum]:
        return [d for d in self.per_graph[G] if d.cone.cone_dim == 1]

    def counts(self, G) -> dict:
        out = {}
        for d in self.per_graph[G]:
            out[d.cone.cone_dim] = out.get(d.cone.cone_dim, 0) + 1
        return out

    def to_json(self) -> dict:
        return {"g": self.g, "n": self.n, "A": list(self.A), "k": self.k, "theta": self.theta.to_json(),
                "graphs": [{"graph": G.to_json(), "cones": [d.to_json() for d in data]}
                           for G, data in self.per_graph.items()]}


def interior_data(G: StableGraph, g, n, A, k, theta) -> list[AJConeDatum]:
    out = []
    for qs in quasi_stable_models(G):
        deg = degree_vector(g, n, A, k, qs)
        for D in stable_multidegrees(qs, theta, 0):
            target = [a - b for a, b in zip(deg, D)]
            for I in acyclic_flows(qs.graph, target):
                datum = aj_cone(qs, I, D)
                if datum.is_interior():
                    out.append(datum)
    out.sort(key=lambda d: (d.cone.cone_dim, d.cone.rays, d.qs.key(), d.D, d.I))
    return out


def _interior_job(args):
    G, g, n, A, k, theta = args
    return interior_data(G, g, n, A, k, theta)


def theta_subdivision(g: int, n: int, A, k: int, theta: StabilityCondition, graphs=None,
                      jobs: int = 1, require_certificate: bool = True) -> ThetaSubdivision:
    A = tuple(A)
    if n < 1:
        raise SubdivisionError("need at least one marking")
    if sum(A) != k * (2 * g - 2 + n) or len(A) != n:
        raise SubdivisionError(f"sum of {A} must equal k(2g-2+n)")
    if theta.degree != 0:
        raise SubdivisionError("theta must have degree 0")
    if require_certificate and not nondegeneracy_certificate(theta).ok:
        raise SubdivisionError("theta has no nondegeneracy certificate")
    if graphs is None:
        graphs = enumerate_stable_graphs(g, n)
    graphs = list(graphs)
    args = [(G, g, n, A, k, theta) for G in graphs]
    if jobs > 1 and len(graphs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_interior_job, args))
    else:
        results = [_interior_job(a) for a in args]
    return ThetaSubdivision(g, n, A, k, theta, dict(zip(graphs, results)))


# ---------------------------------------------------------------- potentials

def alpha_pl(datum: AJConeDatum, base: int | None = None) -> list[list[Fraction]]:
    """Per vertex of the quasi-stable graph, the linear form alpha(v) in the base lengths.

    alpha(base) = 0; walking along an edge in its orientation adds I(e) times its
    length. Defaults to the vertex carrying marking 1.
    """
    qs = datum.qs
    G = qs.graph
    if base is None:
        base = G.leg_vertex.get(1, 0)
    S = datum.section
    m = qs.base.num_edges
    _, reach = spanning_tree(G, base)
    if len(reach) != G.num_vertices:
        raise SubdivisionError("graph is disconnected")
    alpha = []
    for v in range(G.num_vertices):
        form = [Fraction(0)] * m
        for e, s in tree_path(G, reach, v):
            for j in range(m):
                form[j] += s * datum.I[e] * S[e][j]
        alpha.append(form)
    return alpha


def alpha_path_independent(datum: AJConeDatum, alpha) -> bool:
    """alpha(head) - alpha(tail) = I(e) l(e) on the cone for every edge."""
    G = datum.qs.graph
    S = datum.section
    for e, (u, v) in enumerate(G.edges):
        diff = [a - b - datum.I[e] * s for a, b, s in zip(alpha[v], alpha[u], S[e])]
        if any(linalg.dot(diff, r) != 0 for r in datum.cone.rays):
            return False
    return True


def frak_L_form(datum: AJConeDatum, deg, base=None) -> list[Fraction]:
    """sum_v (D + deg)(v) alpha(v) as a linear form in the base lengths."""
    alpha = alpha_pl(datum, base)
    m = datum.qs.base.num_edges
    out = [Fraction(0)] * m
    for v, form in enumerate(alpha):
        c = datum.D[v] + deg[v]
        if c:
            out = [x + c * y for x, y in zip(out, form)]
    return out


def frak_L_flow_form(datum: AJConeDatum, deg) -> list[Fraction]:
    """sum_e (I0(e)^2 - J(e)^2) l(e) with div J = D and I0 = I + J."""
    G = datum.qs.graph
    J = tree_solution(G, datum.D, {})
    m = datum.qs.base.num_edges
    out = [Fraction(0)] * m
    for e in range(G.num_edges):
        c = (datum.I[e] + J[e]) ** 2 - J[e] ** 2
        if c:
            out = [x + c * s for x, s in zip(out, datum.section[e])]
    return out


def same_on_cone(f, h, cone: RationalCone) -> bool:
    return all(linalg.dot(f, r) == linalg.dot(h, r) for r in cone.rays)


# ---------------------------------------------------------------- validation

@dataclass
class ValidationReport:
    ok: bool = True
    failures: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def fail(self, *item):
        self.ok = False
        self.failures.append(item)


def faces(C: RationalCone) -> list[frozenset]:
    """Ray sets of all nonempty faces (including C, excluding the apex)."""
    seen = {frozenset(C.rays)}
    frontier = [frozenset(C.rays)]
    while frontier:
        nxt = []
        for F in frontier:
            for a in C.ineqs:
                sub = frozenset(r for r in F if linalg.dot(a, r) == 0)
                if sub and sub != F:
                    sub = face_generated(C, sub)
                    if sub not in seen:
                        seen.add(sub)
                        nxt.append(sub)
        frontier = nxt
    return sorted(seen, key=lambda s: (len(s), sorted(s)))


def _contract_datum(datum: AJConeDatum, face_rays):
    """Contract the derived edges of zero length on the face; return key, base data."""
    qs = datum.qs
    G = qs.graph
    zero = [e for e in range(G.num_edges)
            if all(linalg.dot(datum.section[e], r) == 0 for r in face_rays)]
    c = contract_edges(G, zero)
    D = [0] * c.target.num_vertices
    for v, w in enumerate(c.vertex_surjection):
        D[w] += datum.D[v]
    I = [datum.I[e] for e in c.edge_injection]
    return decorated_key(c.target, D, I)


def validate_subdivision(s: ThetaSubdivision, check_faces: bool = True) -> ValidationReport:
    rep = ValidationReport()
    deg_of = {}
    keyed = {}
    images = {}
    for G, data in s.per_graph.items():
        keyed[G] = {}
        for d in data:
            key = decorated_key(d.qs.graph, d.D, d.I)
            keyed[G].setdefault(key, []).append(d)
    for G, data in s.per_graph.items():
        m = G.num_edges
        sigma = orthant(m)
        # tuple invariants
        for d in data:
            deg = degree_vector(s.g, s.n, s.A, s.k, d.qs)
            if [a + b for a, b in zip(d.D, divergence(d.qs.graph, d.I))] != list(deg):
                rep.fail("divergence", G, d)
            if not check_section(d):
                rep.fail("section", G, d)
            alpha = alpha_pl(d)
            if not alpha_path_independent(d, alpha):
                rep.fail("alpha path dependence", G, d)
            L = frak_L_form(d, deg)
            for base in range(d.qs.graph.num_vertices):
                if not same_on_cone(L, frak_L_form(d, deg, base), d.cone):
                    rep.fail("base vertex dependence", G, d, base)
                    break
            if not same_on_cone(L, frak_L_flow_form(d, deg), d.cone):
                rep.fail("flow form mismatch", G, d)
        # distinct tuples give distinct cones
        raysets = [frozenset(d.cone.rays) for d in data]
        if len(set(raysets)) != len(raysets):
            rep.fail("duplicate cone", G)
        fan = verify_fan_cover(sigma, [d.cone for d in data], check_pairs="maximal") if m else None
        if fan is not None and not fan.ok:
            rep.fail("fan", G, fan.failures)
        # automorphism invariance of the decorated cone set
        pairs = {(k, frozenset(d.cone.rays)) for k, ds in keyed[G].items() for d in ds}
        for a in automorphisms(G):
            emap = [a.edge(e)[0] for e in range(m)]
            moved = set()
            for k, rs in pairs:
                moved.add((k, frozenset(tuple(_permute(r, emap)) for r in rs)))
            if moved != pairs:
                rep.fail("automorphism", G, emap)
                break
        if not check_faces:
            continue
        # every face lands in the list of the graph it lies over
        for d in data:
            for F in faces(d.cone):
                support = [e for e in range(m) if any(r[e] for r in F)]
                E0 = [e for e in range(m) if e not in support]
                c = contract_edges(G, E0)
                H, rel = canonical_form(c.target)
                if H not in s.per_graph:
                    rep.fail("missing graph", H)
                    continue
                key = _contract_datum(d, sorted(F))
                want = frozenset(F)
                found = False
                for cand in keyed[H].get(key, []):
                    lifted = frozenset(_lift(r, c, rel, m) for r in cand.cone.rays)
                    if lifted == want:
                        found = True
                        break
                if not found:
                    rep.fail("face not in contracted list", G, d, sorted(F))
        rep.stats[G] = s.counts(G)
    return rep


def _permute(r, emap):
    out = [0] * len(r)
    for e, x in enumerate(r):
        out[emap[e]] = x
    return out


def _lift(r, contraction, rel, m):
    """A ray of the canonical contracted cone, placed in the face of the source cone."""
    out = [0] * m
    for j, src in enumerate(contraction.edge_injection):
        out[src] = r[rel.edge(j)[0]]
    return tuple(out)
