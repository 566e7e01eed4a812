"""Exact rational linear algebra on small dense matrices.

Everything here works on lists of lists of ``fractions.Fraction`` and is
meant for desk-scale problems (dimensions in the tens), where naive
Gaussian elimination is perfectly adequate and exact.
"""

from __future__ import annotations

from fractions import Fraction

Matrix = list  # list[list[Fraction]]


def zeros(nrows: int, ncols: int) -> Matrix:
    return [[Fraction(0)] * ncols for _ in range(nrows)]


def identity(n: int) -> Matrix:
    out = zeros(n, n)
    for i in range(n):
        out[i][i] = Fraction(1)
    return out


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    n, k = len(a), len(b)
    m = len(b[0]) if b else 0
    assert all(len(row) == k for row in a)
    out = zeros(n, m)
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            c = ai[t]
            if c:
                bt = b[t]
                for j in range(m):
                    if bt[j]:
                        oi[j] += c * bt[j]
    return out


def mat_add(a: Matrix, b: Matrix, sign: int = 1) -> Matrix:
    return [[x + sign * y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _rref(mat: Matrix):
    """Row-reduce in place (on a copy); return (rref, pivot column list)."""
    m = [row[:] for row in mat]
    nrows = len(m)
    ncols = len(m[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, nrows):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return m, pivots


def rank(mat: Matrix) -> int:
    if not mat or not mat[0]:
        return 0
    return len(_rref(mat)[1])


def solve(a: Matrix, b: list) -> list | None:
    """One exact solution of a x = b, or None if inconsistent.

    ``a`` is (m x n), ``b`` a length-m vector; free variables are set to 0.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    aug = [a[i][:] + [b[i]] for i in range(m)]
    red, pivots = _rref(aug)
    for row in red:
        if all(x == 0 for x in row[:-1]) and row[-1] != 0:
            return None
    x = [Fraction(0)] * n
    for r, c in enumerate(pivots):
        if c == n:  # pivot in the augmented column: inconsistent
            return None
        x[c] = red[r][n]
    return x


def nullspace(mat: Matrix) -> list:
    """Basis of the right nullspace, as a list of column vectors."""
    m = len(mat)
    n = len(mat[0]) if m else 0
    if n == 0:
        return []
    if m == 0:
        return [[Fraction(1) if i == j else Fraction(0) for i in range(n)]
                for j in range(n)]
    red, pivots = _rref(mat)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis
