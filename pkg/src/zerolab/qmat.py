"""Dense exact-rational matrix helpers shared by the analysis modules.

Matrices are plain tuples of tuples of Fractions; every function is pure.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

from .ratpoly import DomainError, as_fraction

QMatrix = tuple[tuple[Fraction, ...], ...]


def qmat(rows) -> QMatrix:
    """Build an exact matrix from any nested iterable of scalars/strings."""
    out = tuple(tuple(as_fraction(x) for x in row) for row in rows)
    if out and any(len(r) != len(out[0]) for r in out):
        raise DomainError("ragged matrix")
    return out


def shape(m: QMatrix) -> tuple[int, int]:
    return (len(m), len(m[0]) if m else 0)


def eye(n: int) -> QMatrix:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n))
        for i in range(n)
    )


def zeros(rows: int, cols: int) -> QMatrix:
    return tuple((Fraction(0),) * cols for _ in range(rows))


def transpose(m: QMatrix) -> QMatrix:
    return tuple(zip(*m)) if m else ()


def add(a: QMatrix, b: QMatrix) -> QMatrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def sub(a: QMatrix, b: QMatrix) -> QMatrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def neg(a: QMatrix) -> QMatrix:
    return tuple(tuple(-x for x in row) for row in a)


def scale(a: QMatrix, c) -> QMatrix:
    c = as_fraction(c)
    return tuple(tuple(c * x for x in row) for row in a)


def matmul(a: QMatrix, b: QMatrix) -> QMatrix:
    n, k = shape(a)
    k2, m = shape(b)
    if k != k2:
        raise DomainError(f"matmul shape mismatch {shape(a)} x {shape(b)}")
    bt = transpose(b)
    return tuple(
        tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt)
        for row in a
    )


def matvec(a: QMatrix, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def hstack(*mats: QMatrix) -> QMatrix:
    rows = len(mats[0])
    return tuple(tuple(x for m in mats for x in m[i]) for i in range(rows))


def vstack(*mats: QMatrix) -> QMatrix:
    return tuple(row for m in mats for row in m)


def submatrix(m: QMatrix, rows: Sequence[int], cols: Sequence[int]) -> QMatrix:
    return tuple(tuple(m[i][j] for j in cols) for i in rows)


def is_zero(m: QMatrix) -> bool:
    return all(x == 0 for row in m for x in row)


def _echelon(m: QMatrix):
    """Row echelon by exact Gaussian elimination; returns (rows, pivots)."""
    a = [list(row) for row in m]
    nr, nc = shape(m)
    pivots = []
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nr):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nr:
            break
    return a, pivots


def rank(m: QMatrix) -> int:
    if not m or not m[0]:
        return 0
    return len(_echelon(m)[1])


def solve(a: QMatrix, b: QMatrix) -> QMatrix:
    """Exact solve a @ x = b for square nonsingular a."""
    n, nc = shape(a)
    if n != nc:
        raise DomainError("solve needs a square matrix")
    aug = hstack(a, b)
    ech, pivots = _echelon(aug)
    if len([p for p in pivots if p < n]) != n:
        raise DomainError("singular matrix in solve")
    width = shape(b)[1]
    return tuple(tuple(ech[i][n : n + width]) for i in range(n))


def inv(a: QMatrix) -> QMatrix:
    return solve(a, eye(len(a)))


def nullspace(m: QMatrix) -> list[tuple[Fraction, ...]]:
    """Basis of the exact right null space."""
    nr, nc = shape(m)
    ech, pivots = _echelon(m)
    free = [c for c in range(nc) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * nc
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -ech[r][fc]
        basis.append(tuple(v))
    return basis


def to_float(m: QMatrix) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in m], dtype=float)


def from_float_exact(m: np.ndarray) -> QMatrix:
    return qmat([[Fraction(repr(float(x))) for x in row] for row in m])
