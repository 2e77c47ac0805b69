"""Small exact linear algebra over the rationals.

Matrices are lists of rows. Everything stays in Fraction or int.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd


def as_fractions(rows):
    return [[Fraction(x) for x in r] for r in rows]


def rref(rows, ncols=None):
    M = as_fractions(rows)
    if ncols is None:
        ncols = len(M[0]) if M else 0
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c]
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def rank(rows, ncols=None) -> int:
    if not rows:
        return 0
    return len(rref(rows, ncols)[1])


def primitive(v) -> tuple[int, ...]:
    """Positive rescaling of a rational vector to a primitive integer vector."""
    if all(type(x) is int for x in v):
        g = 0
        for x in v:
            g = gcd(g, x)
        return tuple(v) if g in (0, 1) else tuple(x // g for x in v)
    v = [Fraction(x) for x in v]
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    return tuple(x // g for x in ints)


def nullspace(rows, ncols: int) -> list[tuple[int, ...]]:
    """Integer basis (primitive vectors) of {x : rows x = 0}."""
    if not rows:
        return [tuple(1 if i == j else 0 for i in range(ncols)) for j in range(ncols)]
    R, piv = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for i, p in enumerate(piv):
            x[p] = -R[i][f]
        basis.append(primitive(x))
    return basis


def det(M) -> Fraction:
    A = as_fractions(M)
    n = len(A)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c] != 0:
                f = A[i][c] / A[c][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return d


def inverse(M):
    n = len(M)
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(as_fractions(M))]
    R, piv = rref(aug, n)
    if piv != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [r[n:] for r in R]


def matmul(A, B):
    Bt = list(zip(*B)) if B else []
    return [[sum(a * b for a, b in zip(r, c)) for c in Bt] for r in A]


def transpose(A):
    return [list(r) for r in zip(*A)]


def matvec(A, v):
    return [sum(a * b for a, b in zip(r, v)) for r in A]


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def solve_in_span(columns, v):
    """Coefficients c with sum_i c_i columns[i] = v, or None if v is not in the span."""
    n = len(columns)
    if n == 0:
        return [] if all(x == 0 for x in v) else None
    aug = [[columns[j][i] for j in range(n)] + [v[i]] for i in range(len(v))]
    R, piv = rref(aug, n + 1)
    if n in piv:
        return None
    c = [Fraction(0)] * n
    for i, p in enumerate(piv):
        c[p] = R[i][n]
    return c
