"""Decorated dual graphs: stable graphs, contractions, quasi-stable models.

Edge ``i`` of a graph owns the half-edges ``2*i`` and ``2*i + 1``, attached to
``edges[i][0]`` and ``edges[i][1]``. Flows and edge orientations always point
from half-edge 0 to half-edge 1.
"""
from __future__ import annotations

import itertools
import os
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property

DEFAULT_CAP = 50_000


class GraphError(ValueError):
    pass


class CapExceeded(GraphError):
    pass


def enumeration_cap() -> int:
    env = os.environ.get("LOGDR_CAP")
    return int(env) if env else DEFAULT_CAP


@dataclass(frozen=True)
class DualGraph:
    genera: tuple[int, ...]
    legs: tuple[tuple[int, ...], ...]
    edges: tuple[tuple[int, int], ...]
    n: int
    exceptional: tuple[bool, ...] = ()

    def __post_init__(self):
        if not self.exceptional:
            object.__setattr__(self, "exceptional", (False,) * len(self.genera))
        object.__setattr__(self, "legs", tuple(tuple(sorted(l)) for l in self.legs))

    @property
    def num_vertices(self) -> int:
        return len(self.genera)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def h1(self) -> int:
        return self.num_edges - self.num_vertices + 1

    @property
    def genus(self) -> int:
        return sum(self.genera) + self.h1

    def half_vertex(self, h: int) -> int:
        return self.edges[h // 2][h % 2]

    @cached_property
    def edge_ends(self) -> tuple[int, ...]:
        ends = [0] * self.num_vertices
        for u, v in self.edges:
            ends[u] += 1
            ends[v] += 1
        return tuple(ends)

    def valence(self, v: int) -> int:
        return len(self.legs[v]) + self.edge_ends[v]

    @cached_property
    def leg_vertex(self) -> dict[int, int]:
        return {i: v for v, ls in enumerate(self.legs) for i in ls}

    def is_loop(self, e: int) -> bool:
        return self.edges[e][0] == self.edges[e][1]

    def is_connected(self) -> bool:
        if self.num_vertices == 0:
            return False
        parent = list(range(self.num_vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            parent[find(u)] = find(v)
        return len({find(v) for v in range(self.num_vertices)}) == 1

    def key(self) -> tuple:
        return (self.num_edges, self.num_vertices, self.genera, self.legs, self.exceptional, self.edges)

    def to_json(self, subdivided=()) -> dict:
        return {
            "genus": self.genus,
            "markings": self.n,
            "vertices": [{"g": g, "legs": list(l)} for g, l in zip(self.genera, self.legs)],
            "edges": [list(e) for e in self.edges],
            "subdivided": sorted(subdivided),
        }


@dataclass(frozen=True)
class StableGraph(DualGraph):
    """Connected decorated graph satisfying 2g(v) - 2 + n(v) > 0 everywhere."""

    def __post_init__(self):
        super().__post_init__()
        if any(self.exceptional):
            raise GraphError("stable graphs carry no exceptional vertices")
        if not self.is_connected():
            raise GraphError("graph is disconnected")
        marks = sorted(i for l in self.legs for i in l)
        if marks != list(range(1, self.n + 1)):
            raise GraphError(f"markings {marks} are not exactly 1..{self.n}")
        for v in range(self.num_vertices):
            if 2 * self.genera[v] - 2 + self.valence(v) <= 0:
                raise GraphError(f"vertex {v} is unstable")

    @staticmethod
    def from_json(d: dict) -> "StableGraph":
        return StableGraph(
            tuple(v["g"] for v in d["vertices"]),
            tuple(tuple(v["legs"]) for v in d["vertices"]),
            tuple(tuple(e) for e in d["edges"]),
            d["markings"],
        )


def smooth_graph(g: int, n: int) -> StableGraph:
    return StableGraph((g,), (tuple(range(1, n + 1)),), (), n)


# ---------------------------------------------------------------- isomorphisms

@dataclass(frozen=True)
class Relabeling:
    """Vertex map and half-edge map from one graph onto another."""
    vmap: tuple[int, ...]
    hmap: tuple[int, ...]

    def edge(self, e: int) -> tuple[int, bool]:
        """Image edge and whether the orientation is reversed."""
        h = self.hmap[2 * e]
        return h // 2, h % 2 == 1

    def inverse(self) -> "Relabeling":
        vinv = [0] * len(self.vmap)
        for a, b in enumerate(self.vmap):
            vinv[b] = a
        hinv = [0] * len(self.hmap)
        for a, b in enumerate(self.hmap):
            hinv[b] = a
        return Relabeling(tuple(vinv), tuple(hinv))

    def then(self, other: "Relabeling") -> "Relabeling":
        return Relabeling(tuple(other.vmap[v] for v in self.vmap),
                          tuple(other.hmap[h] for h in self.hmap))


def _vertex_classes(G: DualGraph) -> list[list[int]]:
    loops = [0] * G.num_vertices
    for u, v in G.edges:
        if u == v:
            loops[u] += 1
    base = [(G.exceptional[v], G.genera[v], G.legs[v], G.edge_ends[v], loops[v])
            for v in range(G.num_vertices)]
    nbr = [[] for _ in range(G.num_vertices)]
    for u, v in G.edges:
        if u != v:
            nbr[u].append(base[v])
            nbr[v].append(base[u])
    inv = [(base[v], tuple(sorted(nbr[v]))) for v in range(G.num_vertices)]
    groups = defaultdict(list)
    for v in range(G.num_vertices):
        groups[inv[v]].append(v)
    return [groups[k] for k in sorted(groups)]


def _orderings(classes: list[list[int]]):
    for combo in itertools.product(*(itertools.permutations(c) for c in classes)):
        order = [v for part in combo for v in part]
        perm = [0] * len(order)
        for new, old in enumerate(order):
            perm[old] = new
        yield perm


def _relabel(G: DualGraph, perm) -> tuple[tuple, Relabeling, list]:
    oriented = []
    for i, (u, v) in enumerate(G.edges):
        a, b = perm[u], perm[v]
        flip = a > b
        oriented.append(((b, a) if flip else (a, b), flip, i))
    order = sorted(range(len(oriented)), key=lambda j: (oriented[j][0], j))
    hmap = [0] * (2 * G.num_edges)
    for new, j in enumerate(order):
        _, flip, i = oriented[j]
        hmap[2 * i] = 2 * new + (1 if flip else 0)
        hmap[2 * i + 1] = 2 * new + (0 if flip else 1)
    edges = tuple(oriented[j][0] for j in order)
    return edges, Relabeling(tuple(perm), tuple(hmap)), order


def canonical_form(G: DualGraph) -> tuple[DualGraph, Relabeling]:
    """Canonical representative of the isomorphism class and a map onto it."""
    classes = _vertex_classes(G)
    best = None
    for perm in _orderings(classes):
        edges, rel, _ = _relabel(G, perm)
        if best is None or edges < best[0]:
            best = (edges, rel)
    edges, rel = best
    order = [0] * G.num_vertices
    for old, new in enumerate(rel.vmap):
        order[new] = old
    cls = StableGraph if isinstance(G, StableGraph) else DualGraph
    kwargs = {} if cls is StableGraph else {"exceptional": tuple(G.exceptional[v] for v in order)}
    canon = cls(tuple(G.genera[v] for v in order), tuple(G.legs[v] for v in order), edges, G.n, **kwargs)
    return canon, rel


def canonical(G: DualGraph) -> DualGraph:
    return canonical_form(G)[0]


def isomorphism(G: DualGraph, H: DualGraph) -> Relabeling | None:
    cg, rg = canonical_form(G)
    ch, rh = canonical_form(H)
    if cg != ch:
        return None
    return rg.then(rh.inverse())


def automorphisms(G: DualGraph) -> list[Relabeling]:
    """All vertex and half-edge permutations preserving the decorated graph."""
    classes = _vertex_classes(G)
    groups = defaultdict(list)
    for i, (u, v) in enumerate(G.edges):
        groups[(min(u, v), max(u, v))].append(i)
    edge_set = sorted(G.edges)
    result = []
    for perm in _orderings(classes):
        if sorted(tuple(sorted((perm[u], perm[v]))) for u, v in G.edges) != sorted(
                tuple(sorted(e)) for e in edge_set):
            continue
        choices = []
        for (u, v), members in sorted(groups.items()):
            a, b = perm[u], perm[v]
            target = groups[(min(a, b), max(a, b))]
            opts = []
            for images in itertools.permutations(target):
                if u == v:
                    for flips in itertools.product((False, True), repeat=len(members)):
                        opts.append(list(zip(members, images, flips)))
                else:
                    opts.append([(i, j, G.edges[j][0] != perm[G.edges[i][0]]) for i, j in zip(members, images)])
            choices.append(opts)
        for combo in itertools.product(*choices):
            hmap = [0] * (2 * G.num_edges)
            for part in combo:
                for i, j, flip in part:
                    hmap[2 * i] = 2 * j + (1 if flip else 0)
                    hmap[2 * i + 1] = 2 * j + (0 if flip else 1)
            result.append(Relabeling(tuple(perm), tuple(hmap)))
    return result


def automorphism_group(G: DualGraph) -> list[Relabeling]:
    return automorphisms(G)


def automorphism_order(G: DualGraph) -> int:
    return len(automorphisms(G))


# ---------------------------------------------------------------- contraction

@dataclass(frozen=True)
class GraphContraction:
    source: DualGraph
    contracted: frozenset
    target: DualGraph
    edge_injection: tuple[int, ...]
    vertex_surjection: tuple[int, ...]


def contract_edges(G: DualGraph, E0) -> GraphContraction:
    E0 = frozenset(E0)
    if any(not 0 <= e < G.num_edges for e in E0):
        raise GraphError(f"unknown edge in {sorted(E0)}")
    parent = list(range(G.num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    extra = defaultdict(int)
    for e in sorted(E0):
        u, v = G.edges[e]
        ru, rv = find(u), find(v)
        if ru == rv:
            extra[e] = 1
        else:
            parent[max(ru, rv)] = min(ru, rv)
    roots = sorted({find(v) for v in range(G.num_vertices)})
    index = {r: i for i, r in enumerate(roots)}
    vsur = tuple(index[find(v)] for v in range(G.num_vertices))
    genera = [0] * len(roots)
    legs = [[] for _ in roots]
    for v in range(G.num_vertices):
        genera[vsur[v]] += G.genera[v]
        legs[vsur[v]].extend(G.legs[v])
    for e in E0:
        if extra[e]:
            genera[vsur[G.edges[e][0]]] += 1
    kept = tuple(e for e in range(G.num_edges) if e not in E0)
    edges = tuple((vsur[G.edges[e][0]], vsur[G.edges[e][1]]) for e in kept)
    cls = StableGraph if isinstance(G, StableGraph) else DualGraph
    kwargs = {}
    if cls is DualGraph:
        exc = [True] * len(roots)
        for v in range(G.num_vertices):
            exc[vsur[v]] = exc[vsur[v]] and G.exceptional[v]
        kwargs["exceptional"] = tuple(exc)
    target = cls(tuple(genera), tuple(tuple(l) for l in legs), edges, G.n, **kwargs)
    return GraphContraction(G, E0, target, kept, vsur)


# ---------------------------------------------------------------- enumeration

def _splits(G: StableGraph):
    """Graphs with one more edge that contract back to G along the new edge."""
    for v in range(G.num_vertices):
        g = G.genera[v]
        if g >= 1:
            genera = list(G.genera)
            genera[v] -= 1
            yield StableGraph(tuple(genera), G.legs, G.edges + ((v, v),), G.n)
        halves = [h for h in range(2 * G.num_edges) if G.half_vertex(h) == v]
        legs = G.legs[v]
        new = G.num_vertices
        for g1 in range(g + 1):
            for lmask in range(1 << len(legs)):
                l1 = tuple(x for i, x in enumerate(legs) if lmask >> i & 1)
                l2 = tuple(x for i, x in enumerate(legs) if not lmask >> i & 1)
                for hmask in range(1 << len(halves)):
                    moved = {h for i, h in enumerate(halves) if hmask >> i & 1}
                    e1 = len(halves) - len(moved) + 1
                    e2 = len(moved) + 1
                    if 2 * g1 - 2 + len(l1) + e1 <= 0 or 2 * (g - g1) - 2 + len(l2) + e2 <= 0:
                        continue
                    edges = []
                    for i, (a, b) in enumerate(G.edges):
                        a = new if 2 * i in moved else a
                        b = new if 2 * i + 1 in moved else b
                        edges.append((a, b))
                    edges.append((v, new))
                    genera = list(G.genera) + [g - g1]
                    genera[v] = g1
                    lg = list(G.legs) + [l2]
                    lg[v] = l1
                    yield StableGraph(tuple(genera), tuple(lg), tuple(edges), G.n)


def enumerate_stable_graphs(g: int, n: int, cap: int | None = None) -> list[StableGraph]:
    """One canonical representative per isomorphism class, in canonical order."""
    if g < 0 or n < 0 or 2 * g - 2 + n <= 0:
        raise GraphError(f"no stable graphs of type ({g},{n})")
    return list(_enumerate_cached(g, n, cap if cap is not None else enumeration_cap()))


_CACHE: dict = {}


def _enumerate_cached(g, n, cap):
    if (g, n) in _CACHE:
        found = _CACHE[(g, n)]
        if len(found) > cap:
            raise CapExceeded(f"stable graphs of type ({g},{n}) exceed cap {cap}")
        return found
    layer = {canonical(smooth_graph(g, n))}
    found = set(layer)
    while layer:
        nxt = set()
        for G in layer:
            for H in _splits(G):
                c = canonical(H)
                if c not in found:
                    found.add(c)
                    nxt.add(c)
                    if len(found) > cap:
                        raise CapExceeded(f"stable graphs of type ({g},{n}) exceed cap {cap}")
        layer = nxt
    result = tuple(sorted(found, key=DualGraph.key))
    _CACHE[(g, n)] = result
    return result


# ---------------------------------------------------------------- quasi-stable

@dataclass(frozen=True)
class QuasiStableGraph:
    base: StableGraph
    subdivided: frozenset = field(default_factory=frozenset)

    @cached_property
    def _build(self):
        B = self.base
        genera = list(B.genera)
        legs = list(B.legs)
        exc = [False] * B.num_vertices
        edges, halves, of_base = [], [], []
        for i, (u, v) in enumerate(B.edges):
            if i in self.subdivided:
                x = len(genera)
                genera.append(0)
                legs.append(())
                exc.append(True)
                halves.append((len(edges), len(edges) + 1))
                edges += [(u, x), (x, v)]
                of_base += [i, i]
            else:
                halves.append((len(edges),))
                edges.append((u, v))
                of_base.append(i)
        G = DualGraph(tuple(genera), tuple(legs), tuple(edges), B.n, tuple(exc))
        return G, tuple(halves), tuple(of_base)

    @property
    def graph(self) -> DualGraph:
        return self._build[0]

    @property
    def halves(self) -> tuple[tuple[int, ...], ...]:
        """Base edge -> the derived edges it was split into."""
        return self._build[1]

    @property
    def base_edge(self) -> tuple[int, ...]:
        return self._build[2]

    @property
    def exceptional(self) -> tuple[bool, ...]:
        return self.graph.exceptional

    def projection(self) -> list[list[int]]:
        """The matrix of the map summing the two halves of each subdivided edge."""
        G = self.graph
        return [[1 if self.base_edge[j] == i else 0 for j in range(G.num_edges)]
                for i in range(self.base.num_edges)]

    def stabilization(self) -> StableGraph:
        B = self.base
        edges = []
        for i, hs in enumerate(self.halves):
            edges.append((self.graph.edges[hs[0]][0], self.graph.edges[hs[-1]][1]))
        return StableGraph(B.genera, B.legs, tuple(edges), B.n)

    def key(self):
        return (self.base.key(), tuple(sorted(self.subdivided)))


def quasi_stable_models(G: StableGraph) -> list[QuasiStableGraph]:
    """All 2^|E| subdivision patterns, ordered by bitmask."""
    return [QuasiStableGraph(G, frozenset(e for e in range(G.num_edges) if mask >> e & 1))
            for mask in range(1 << G.num_edges)]


# ---------------------------------------------------------------- cycles

def spanning_tree(G: DualGraph, root: int = 0) -> tuple[list[int], dict[int, tuple[int, int]]]:
    """Tree edges and, per vertex, the (edge, sign) used to reach it from the root."""
    adj = defaultdict(list)
    for i, (u, v) in enumerate(G.edges):
        if u != v:
            adj[u].append((i, v, 1))
            adj[v].append((i, u, -1))
    reach = {root: (-1, 0)}
    stack = [root]
    tree = []
    while stack:
        x = stack.pop(0)
        for i, y, s in adj[x]:
            if y not in reach:
                reach[y] = (i, s)
                tree.append(i)
                stack.append(y)
    return tree, reach


def tree_path(G: DualGraph, reach, v: int) -> list[tuple[int, int]]:
    """Signed edges of the tree path from the root to v."""
    path = []
    while reach[v][0] != -1:
        e, s = reach[v]
        path.append((e, s))
        v = G.edges[e][0] if s == 1 else G.edges[e][1]
    return path[::-1]


def cycle_space_basis(G: DualGraph) -> list[tuple[int, ...]]:
    """Fundamental cycles of a BFS spanning tree as integer flows."""
    tree, reach = spanning_tree(G)
    basis = []
    tset = set(tree)
    for i, (u, v) in enumerate(G.edges):
        if i in tset:
            continue
        flow = [0] * G.num_edges
        flow[i] += 1
        # back from v to u through the tree
        for e, s in tree_path(G, reach, v):
            flow[e] -= s
        for e, s in tree_path(G, reach, u):
            flow[e] += s
        basis.append(tuple(flow))
    return basis


def divergence(G: DualGraph, flow) -> tuple[int, ...]:
    """Net inflow at each vertex."""
    div = [0] * G.num_vertices
    for i, (u, v) in enumerate(G.edges):
        div[v] += flow[i]
        div[u] -= flow[i]
    return tuple(div)
