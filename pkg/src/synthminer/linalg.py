"""Exact Gaussian elimination over the rationals.

Matrices are sequences of rows; entries may be ints or Fractions. Nothing
here rounds, so dependence answers are algebraic facts, not approximations.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Matrix = Sequence[Sequence]


def _copy(rows: Matrix) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in rows]


def transpose(rows: Matrix, ncols: int | None = None) -> list[list]:
    if not rows:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*rows)]


def rref(rows: Matrix, ncols: int | None = None):
    """Reduced row echelon form. Returns ``(reduced_rows, pivot_columns)``;
    zero rows are dropped."""
    a = _copy(rows)
    if not a:
        return [], []
    n = len(a[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def rank(rows: Matrix) -> int:
    return len(rref(rows)[1])


def solve(a: Matrix, b: Sequence) -> list[Fraction] | None:
    """One solution ``x`` of ``a @ x == b`` or None when inconsistent."""
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} rows vs rhs of length {len(b)}")
    ncols = len(a[0]) if a else 0
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    if not aug:
        return []
    reduced, pivots = rref(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for row, c in zip(reduced, pivots):
        x[c] = row[ncols]
    return x


def null_space(rows: Matrix, ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : rows @ x == 0}``."""
    reduced, pivots = rref(rows, ncols) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, c in zip(reduced, pivots):
            v[c] = -row[f]
        basis.append(v)
    return basis


def left_null_space(rows: Matrix, ncols: int) -> list[list[Fraction]]:
    """Basis of ``{y : y @ rows == 0}``."""
    return null_space(transpose(rows, ncols), len(rows))


def in_row_space(rows: Matrix, vec: Sequence) -> bool:
    """True iff ``vec`` is a rational combination of ``rows``."""
    if rows and len(rows[0]) != len(vec):
        raise ValueError(f"dimension mismatch: rows of length {len(rows[0])}, vector of length {len(vec)}")
    if not rows:
        return all(x == 0 for x in vec)
    return solve(transpose(rows), list(vec)) is not None


def in_column_space(rows: Matrix, vec: Sequence) -> bool:
    if len(rows) != len(vec):
        raise ValueError(f"dimension mismatch: {len(rows)} rows, vector of length {len(vec)}")
    if not rows or not rows[0]:
        return all(x == 0 for x in vec)
    return solve(rows, list(vec)) is not None


def orthogonal_to_all(basis: Sequence[Sequence], vec: Sequence) -> bool:
    return all(sum(b * v for b, v in zip(bv, vec) if v) == 0 for bv in basis)
