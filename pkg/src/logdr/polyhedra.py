"""Exact rational polyhedral cones.

Cones keep both descriptions: primitive integer rays (plus a lineality basis,
empty for every cone used downstream) and integer linear forms, equalities
``eq . x = 0`` and facet inequalities ``a . x >= 0``. Rays are computed by the
double description method in exact integer arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations

from . import linalg
from .linalg import dot, primitive
from .rational import fmt


class ConeError(ValueError):
    pass


def _ivec(v) -> tuple[int, ...]:
    return primitive(v)


def _double_description(m: int, ineqs: list[tuple[int, ...]]):
    """Extreme rays and lineality basis of {y in Q^m : a.y >= 0 for a in ineqs}."""
    lin = [tuple(int(i == j) for j in range(m)) for i in range(m)]
    rays: list[tuple[int, ...]] = []
    done: list[tuple[int, ...]] = []
    for a in ineqs:
        if not any(a):
            continue
        k = next((i for i, l in enumerate(lin) if dot(a, l) != 0), None)
        if k is not None:
            l0 = lin[k]
            s = dot(a, l0)
            if s < 0:
                l0 = tuple(-x for x in l0)
                s = -s
            lin = [_ivec([s * x - dot(a, l) * y for x, y in zip(l, l0)])
                   for i, l in enumerate(lin) if i != k]
            rays = [_ivec([s * x - dot(a, r) * y for x, y in zip(r, l0)]) for r in rays]
            rays.append(l0)
            done.append(a)
            continue
        vals = [dot(a, r) for r in rays]
        if all(v >= 0 for v in vals):
            done.append(a)
            continue
        zeros = [frozenset(j for j, b in enumerate(done) if dot(b, r) == 0) for r in rays]
        keep = [r for r, v in zip(rays, vals) if v >= 0]
        pos = [i for i, v in enumerate(vals) if v > 0]
        neg = [i for i, v in enumerate(vals) if v < 0]
        for p in pos:
            for q in neg:
                common = zeros[p] & zeros[q]
                if any(common <= zeros[t] for t in range(len(rays)) if t != p and t != q):
                    continue
                keep.append(_ivec([vals[p] * x - vals[q] * y for x, y in zip(rays[q], rays[p])]))
        rays = list(dict.fromkeys(keep))
        done.append(a)
    return rays, lin


@dataclass(frozen=True)
class RationalCone:
    dim: int
    rays: tuple[tuple[int, ...], ...]
    eqs: tuple[tuple[int, ...], ...]
    ineqs: tuple[tuple[int, ...], ...]
    lineality: tuple[tuple[int, ...], ...] = ()

    @cached_property
    def cone_dim(self) -> int:
        return linalg.rank(list(self.rays) + list(self.lineality), self.dim)

    @property
    def lineality_dim(self) -> int:
        return len(self.lineality)

    def contains(self, x) -> bool:
        return all(dot(e, x) == 0 for e in self.eqs) and all(dot(a, x) >= 0 for a in self.ineqs)

    def contains_cone(self, other: "RationalCone") -> bool:
        return all(self.contains(r) for r in other.rays) and all(
            self.contains(l) and self.contains([-x for x in l]) for l in other.lineality)

    def interior_point(self) -> tuple[int, ...]:
        """A point in the relative interior: the sum of the rays."""
        return tuple(sum(c) for c in zip(*self.rays)) if self.rays else (0,) * self.dim

    def is_full(self) -> bool:
        return self.cone_dim == self.dim

    def tight_rays(self, form) -> frozenset:
        return frozenset(r for r in self.rays if dot(form, r) == 0)

    def facets(self) -> list[tuple[tuple[int, ...], frozenset]]:
        return [(a, self.tight_rays(a)) for a in self.ineqs]

    def to_json(self) -> dict:
        return {"dim": self.dim, "rays": [list(r) for r in self.rays],
                "eqs": [[fmt(x) for x in e] for e in self.eqs],
                "ineqs": [[fmt(x) for x in a] for a in self.ineqs]}

    @staticmethod
    def from_json(d: dict) -> "RationalCone":
        return cone_from_constraints(d["dim"], [[Fraction(x) for x in e] for e in d["eqs"]],
                                     [[Fraction(x) for x in a] for a in d["ineqs"]])

    def __repr__(self):
        return f"Cone(rays={list(self.rays)})"


def _assemble(dim, rays, lin, candidate_ineqs) -> RationalCone:
    rays = tuple(sorted(set(rays)))
    gens = list(rays) + list(lin)
    eqs = tuple(sorted(linalg.nullspace(gens, dim))) if gens else tuple(
        tuple(int(i == j) for j in range(dim)) for i in range(dim))
    cdim = linalg.rank(gens, dim) if gens else 0
    facets = {}
    for a in candidate_ineqs:
        a = _ivec(a)
        tight = frozenset(r for r in rays if dot(a, r) == 0)
        if len(tight) == len(rays):
            continue
        r = linalg.rank(list(tight) + list(lin), dim) if (tight or lin) else 0
        if r == cdim - 1 and tight not in facets:
            facets[tight] = a
    return RationalCone(dim, rays, eqs, tuple(sorted(facets.values())), tuple(lin))


def cone_from_constraints(dim: int, equalities=(), inequalities=()) -> RationalCone:
    """{x : e.x = 0 for e in equalities, a.x >= 0 for a in inequalities}."""
    for f in list(equalities) + list(inequalities):
        if len(f) != dim:
            raise ConeError(f"form {list(f)} does not have dimension {dim}")
    eqs = [_ivec(e) for e in equalities if any(e)]
    N = linalg.nullspace(eqs, dim) if eqs else [tuple(int(i == j) for j in range(dim)) for i in range(dim)]
    # coordinates y on the solution space of the equalities, x = sum y_j N_j
    ineqs = [_ivec(a) for a in inequalities]
    reduced = [tuple(dot(a, col) for col in N) for a in ineqs]
    yrays, ylin = _double_description(len(N), [_ivec(r) if any(r) else r for r in reduced])

    def lift(y):
        return _ivec([sum(c * col[i] for c, col in zip(y, N)) for i in range(dim)])

    rays = [lift(y) for y in yrays]
    lin = [lift(y) for y in ylin]
    return _assemble(dim, rays, lin, ineqs)


def cone_from_rays(dim: int, rays) -> RationalCone:
    rays = [_ivec(r) for r in rays if any(r)]
    if not rays:
        return RationalCone(dim, (), tuple(tuple(int(i == j) for j in range(dim)) for i in range(dim)), ())
    normals, _ = _double_description(dim, rays)
    eqs = linalg.nullspace(rays, dim)
    C = cone_from_constraints(dim, eqs, normals)
    return C


def orthant(dim: int) -> RationalCone:
    return cone_from_constraints(dim, (), [tuple(int(i == j) for j in range(dim)) for i in range(dim)])


def intersect(C: RationalCone, D: RationalCone) -> RationalCone:
    return cone_from_constraints(C.dim, list(C.eqs) + list(D.eqs), list(C.ineqs) + list(D.ineqs))


def face_generated(C: RationalCone, rays) -> frozenset:
    """Rays of the smallest face of C containing the given points."""
    tight = [a for a in C.ineqs if all(dot(a, r) == 0 for r in rays)]
    return frozenset(r for r in C.rays if all(dot(a, r) == 0 for a in tight))


def is_face(F: RationalCone, C: RationalCone) -> bool:
    if not C.contains_cone(F):
        return False
    return face_generated(C, F.rays) == frozenset(F.rays)


@dataclass(frozen=True)
class ImageResult:
    cone: RationalCone
    section: list | None


def linear_image(C: RationalCone, M) -> ImageResult:
    """Image M(C) and, when M is injective on span(C), a left inverse on it.

    The section S satisfies S (M x) = x for x in span(C); rows index the source
    coordinates, columns the target coordinates.
    """
    target_dim = len(M)
    images = [linalg.matvec(M, r) for r in C.rays]
    cone = cone_from_rays(target_dim, images)
    basis = []
    for r in C.rays:
        if linalg.rank(basis + [list(r)], C.dim) > len(basis):
            basis.append(list(r))
    if not basis:
        return ImageResult(cone, [[Fraction(0)] * target_dim for _ in range(C.dim)])
    P = [linalg.matvec(M, b) for b in basis]  # rows: images of basis vectors
    if linalg.rank(P, target_dim) < len(basis):
        return ImageResult(cone, None)
    # section = R (P^T P)^{-1} P^T with R, P having basis vectors as columns
    gram = linalg.matmul(P, linalg.transpose(P))
    ginv = linalg.inverse(gram)
    coef = linalg.matmul(ginv, P)  # len(basis) x target_dim
    Rcols = linalg.transpose(basis)  # C.dim x len(basis)
    section = linalg.matmul(Rcols, coef)
    return ImageResult(cone, section)


# ---------------------------------------------------------------- volumes

def triangulate(C: RationalCone) -> list[tuple[tuple[int, ...], ...]]:
    """Placing triangulation by the lexicographically least ray."""
    if not C.rays:
        return []
    if len(C.rays) == C.cone_dim:
        return [C.rays]
    r0 = min(C.rays)
    out = []
    for a, tight in C.facets():
        if r0 in tight:
            continue
        F = cone_from_rays(C.dim, sorted(tight))
        for simplex in triangulate(F):
            out.append((r0,) + simplex)
    return out


def slice_volume(C: RationalCone) -> Fraction:
    """Normalized volume of C intersected with {sum x = 1}; zero unless full-dimensional."""
    if not C.is_full():
        return Fraction(0)
    if C.dim == 0:
        return Fraction(1)
    total = Fraction(0)
    for S in triangulate(C):
        d = abs(linalg.det(S))
        den = 1
        for r in S:
            den *= sum(r)
        total += Fraction(d) / den
    return total


@dataclass
class FanReport:
    ok: bool
    failures: list = field(default_factory=list)
    volume: Fraction = Fraction(0)
    target_volume: Fraction = Fraction(0)

    def summary(self) -> str:
        if self.ok:
            return f"fan ok, volume {self.volume}"
        return "; ".join(str(f) for f in self.failures[:5])


def _separated_pair_ok(C: RationalCone, D: RationalCone) -> bool:
    """True when a facet hyperplane of one cone certifies that C and D meet in a common face.

    If a >= 0 on C and a <= 0 on D, then C and D meet inside {a = 0}, where they
    reduce to the faces spanned by their tight rays. The intersection is {0} when
    either face is trivial and the face itself when both have the same rays.
    """
    for P, Q in ((C, D), (D, C)):
        for a in P.ineqs:
            if all(dot(a, r) <= 0 for r in Q.rays):
                fp = [r for r in P.rays if dot(a, r) == 0]
                fq = [r for r in Q.rays if dot(a, r) == 0]
                if not fp or not fq or set(fp) == set(fq):
                    return True
    return False


def verify_fan_cover(sigma: RationalCone, cones, check_pairs="all") -> FanReport:
    """Face-intersection and volume checks for a family of cones covering sigma.

    With check_pairs="maximal" only pairs of full-dimensional cones are
    intersected, and every lower-dimensional cone must be a face of one of them.
    """
    cones = list(cones)
    rep = FanReport(True)
    for i, C in enumerate(cones):
        if not sigma.contains_cone(C):
            rep.failures.append(("outside", i))
    full = [i for i, C in enumerate(cones) if C.cone_dim == sigma.cone_dim]
    if check_pairs == "all":
        pairs = combinations(range(len(cones)), 2)
    else:
        pairs = combinations(full, 2)
        for i, C in enumerate(cones):
            if i not in full and not any(is_face(C, cones[j]) for j in full):
                rep.failures.append(("not a face of a maximal cone", i))
    for i, j in pairs:
        if _separated_pair_ok(cones[i], cones[j]):
            continue
        X = intersect(cones[i], cones[j])
        if not (is_face(X, cones[i]) and is_face(X, cones[j])):
            rep.failures.append(("bad intersection", i, j))
    rep.volume = sum((slice_volume(cones[i]) for i in full), Fraction(0))
    rep.target_volume = slice_volume(sigma)
    if rep.volume != rep.target_volume:
        rep.failures.append(("volume deficit", rep.target_volume - rep.volume))
    rep.ok = not rep.failures
    return rep
