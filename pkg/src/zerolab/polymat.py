"""Polynomial and rational-function matrices.

Exact rank over the function field, minors by fraction-free expansion,
unimodular elementary operations, the Smith form with both transformation
matrices, invariant polynomials, and the Smith-McMillan form of a rational
matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .ratpoly import (
    DomainError,
    Poly,
    RatFn,
    as_fraction,
    poly_gcd,
    poly_gcd_many,
    poly_lcm_many,
)

#: minor enumeration refuses matrices whose smaller dimension exceeds this
MINOR_DIM_CAP = 8


class SizeError(DomainError):
    """Raised when combinatorial minor enumeration would blow up."""


def _as_poly(x) -> Poly:
    if isinstance(x, Poly):
        return x
    return Poly.const(as_fraction(x))


class PolyMatrix:
    """Immutable rectangular matrix of exact polynomials."""

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[Iterable]):
        rows = tuple(tuple(_as_poly(e) for e in row) for row in entries)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise DomainError("ragged polynomial matrix")
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, *a):
        raise AttributeError("PolyMatrix is immutable")

    # -- constructors ---------------------------------------------------
    @staticmethod
    def identity(n: int) -> "PolyMatrix":
        one, zero = Poly([1]), Poly()
        return PolyMatrix(
            [[one if i == j else zero for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zero(rows: int, cols: int) -> "PolyMatrix":
        z = Poly()
        return PolyMatrix([[z] * cols for _ in range(rows)])

    @staticmethod
    def from_scalar(m) -> "PolyMatrix":
        """Constant matrix from any nested iterable of exact scalars."""
        return PolyMatrix([[Poly.const(as_fraction(x)) for x in row] for row in m])

    @staticmethod
    def diag(polys: Sequence[Poly], rows: int | None = None, cols: int | None = None):
        k = len(polys)
        rows = k if rows is None else rows
        cols = k if cols is None else cols
        m = [[Poly() for _ in range(cols)] for _ in range(rows)]
        for i, p in enumerate(polys):
            m[i][i] = _as_poly(p)
        return PolyMatrix(m)

    # -- structure --------------------------------------------------------
    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def max_degree(self) -> int:
        return max((e.degree for row in self.entries for e in row), default=-1)

    # -- arithmetic --------------------------------------------------------
    def __add__(self, other: "PolyMatrix"):
        return PolyMatrix(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other: "PolyMatrix"):
        return PolyMatrix(
            [
                [a - b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.entries, other.entries)
            ]
        )

    def __neg__(self):
        return PolyMatrix([[-a for a in row] for row in self.entries])

    def __mul__(self, other):
        if isinstance(other, PolyMatrix):
            if self.cols != other.rows:
                raise DomainError("polynomial matrix shape mismatch")
            cols = list(zip(*other.entries))
            return PolyMatrix(
                [
                    [
                        sum((a * b for a, b in zip(row, col)), Poly())
                        for col in cols
                    ]
                    for row in self.entries
                ]
            )
        p = _as_poly(other)
        return PolyMatrix([[e * p for e in row] for row in self.entries])

    __rmul__ = __mul__

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(list(zip(*self.entries))) if self.entries else self

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "PolyMatrix":
        return PolyMatrix([[self.entries[i][j] for j in cols] for i in rows])

    def hstack(self, other: "PolyMatrix") -> "PolyMatrix":
        return PolyMatrix(
            [list(a) + list(b) for a, b in zip(self.entries, other.entries)]
        )

    def vstack(self, other: "PolyMatrix") -> "PolyMatrix":
        return PolyMatrix(list(self.entries) + list(other.entries))

    def eval(self, x):
        """Numeric evaluation; returns a nested list."""
        return [[e(x) for e in row] for row in self.entries]

    def eval_exact(self, x: Fraction):
        from . import qmat

        return qmat.qmat([[e(as_fraction(x)) for e in row] for row in self.entries])

    def __repr__(self):
        body = "; ".join(
            ", ".join(str(e) for e in row) for row in self.entries
        )
        return f"PolyMatrix[{body}]"


def determinant(P: PolyMatrix) -> Poly:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Intermediate quotients are genuine minors, so every division is exact
    over the polynomial ring.
    """
    n, m = P.shape
    if n != m:
        raise DomainError("determinant of a non-square matrix")
    if n == 0:
        return Poly([1])
    a = [list(row) for row in P.entries]
    sign = 1
    prev = Poly([1])
    for k in range(n - 1):
        if a[k][k].is_zero():
            piv = next((i for i in range(k + 1, n) if not a[i][k].is_zero()), None)
            if piv is None:
                return Poly()
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num.exact_div(prev)
            a[i][k] = Poly()
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return -det if sign < 0 else det


def cofactor_determinant(P: PolyMatrix) -> Poly:
    """Plain cofactor expansion; independent cross-check for small matrices."""
    n, m = P.shape
    if n != m:
        raise DomainError("determinant of a non-square matrix")
    if n == 0:
        return Poly([1])
    if n == 1:
        return P[0, 0]
    acc = Poly()
    cols = list(range(1, n))
    for i in range(n):
        if P[i, 0].is_zero():
            continue
        minor_rows = [r for r in range(n) if r != i]
        sub = P.submatrix(minor_rows, cols)
        term = P[i, 0] * cofactor_determinant(sub)
        acc = acc + term if i % 2 == 0 else acc - term
    return acc


def adjugate(P: PolyMatrix) -> PolyMatrix:
    """Classical adjugate; P * adj(P) = det(P) * I exactly."""
    n, m = P.shape
    if n != m:
        raise DomainError("adjugate of a non-square matrix")
    if n == 1:
        return PolyMatrix([[Poly([1])]])
    out = [[Poly() for _ in range(n)] for _ in range(n)]
    idx = list(range(n))
    for i in range(n):
        rows = [r for r in idx if r != i]
        for j in range(n):
            cols = [c for c in idx if c != j]
            c = determinant(P.submatrix(rows, cols))
            out[j][i] = c if (i + j) % 2 == 0 else -c
    return PolyMatrix(out)


def minor(P: PolyMatrix, rows: Sequence[int], cols: Sequence[int]) -> Poly:
    """Exact minor for the selected (equal-size) row/column index sets."""
    rows, cols = list(rows), list(cols)
    if len(rows) != len(cols):
        raise DomainError("minor needs equally many rows and columns")
    if any(i < 0 or i >= P.rows for i in rows) or any(
        j < 0 or j >= P.cols for j in cols
    ):
        raise IndexError("minor index out of range")
    return determinant(P.submatrix(rows, cols))


def normal_rank(P: PolyMatrix) -> int:
    """Rank over the rational-function field by fraction-free elimination."""
    nr, nc = P.shape
    if nr == 0 or nc == 0:
        return 0
    a = [list(row) for row in P.entries]
    prev = Poly([1])
    rank = 0
    row = 0
    for col in range(nc):
        piv = next((i for i in range(row, nr) if not a[i][col].is_zero()), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        for i in range(row + 1, nr):
            for j in range(col + 1, nc):
                num = a[i][j] * a[row][col] - a[i][col] * a[row][j]
                a[i][j] = num.exact_div(prev)
            a[i][col] = Poly()
        prev = a[row][col]
        rank += 1
        row += 1
        if row == nr:
            break
    return rank


def all_minors(P: PolyMatrix, order: int) -> list[Poly]:
    """Every ``order``-sized minor; capped to keep enumeration at desk scale."""
    if min(P.shape) > MINOR_DIM_CAP:
        raise SizeError(
            f"minor enumeration capped at min-dimension {MINOR_DIM_CAP}"
        )
    out = []
    for rows in combinations(range(P.rows), order):
        for cols in combinations(range(P.cols), order):
            out.append(determinant(P.submatrix(rows, cols)))
    return out


def gcd_of_minors(P: PolyMatrix, order: int) -> Poly:
    """Monic gcd d_k of the non-identically-zero order-k minors (0 if all zero)."""
    nonzero = [m for m in all_minors(P, order) if not m.is_zero()]
    if not nonzero:
        return Poly()
    return poly_gcd_many(nonzero)


@dataclass(frozen=True)
class SmithDecomposition:
    """S = U_L * P * U_R with unimodular U_L, U_R and diagonal S."""

    U_L: PolyMatrix
    S: PolyMatrix
    U_R: PolyMatrix
    invariant_polys: tuple[Poly, ...]

    @property
    def rank(self) -> int:
        return len(self.invariant_polys)


class _Reducer:
    """Mutable worker carrying the matrix plus both transformation factors."""

    def __init__(self, P: PolyMatrix):
        self.a = [list(row) for row in P.entries]
        self.nr, self.nc = P.shape
        self.L = [list(row) for row in PolyMatrix.identity(self.nr).entries]
        self.R = [list(row) for row in PolyMatrix.identity(self.nc).entries]

    def swap_rows(self, i, j):
        if i != j:
            self.a[i], self.a[j] = self.a[j], self.a[i]
            self.L[i], self.L[j] = self.L[j], self.L[i]

    def swap_cols(self, i, j):
        if i != j:
            for row in self.a:
                row[i], row[j] = row[j], row[i]
            for row in self.R:
                row[i], row[j] = row[j], row[i]

    def add_row(self, dst, src, q: Poly):
        """row_dst += q * row_src"""
        self.a[dst] = [x + q * y for x, y in zip(self.a[dst], self.a[src])]
        self.L[dst] = [x + q * y for x, y in zip(self.L[dst], self.L[src])]

    def add_col(self, dst, src, q: Poly):
        for row in self.a:
            row[dst] = row[dst] + q * row[src]
        for row in self.R:
            row[dst] = row[dst] + q * row[src]

    def scale_row(self, i, c: Fraction):
        self.a[i] = [x * c for x in self.a[i]]
        self.L[i] = [x * c for x in self.L[i]]

    def pivot(self, t):
        """Nonzero entry of minimal degree in the trailing block, ties by
        smallest (row, col)."""
        best = None
        for i in range(t, self.nr):
            for j in range(t, self.nc):
                e = self.a[i][j]
                if e.is_zero():
                    continue
                key = (e.degree, i, j)
                if best is None or key < best[0]:
                    best = (key, i, j)
        return None if best is None else (best[1], best[2])


def smith_form(P: PolyMatrix) -> SmithDecomposition:
    """Smith canonical form with transformation matrices.

    Returns diagonal S = U_L * P * U_R whose nonzero diagonal entries are the
    monic invariant polynomials, each dividing the next.
    """
    w = _Reducer(P)
    n = min(w.nr, w.nc)
    t = 0
    while t < n:
        pos = w.pivot(t)
        if pos is None:
            break
        w.swap_rows(t, pos[0])
        w.swap_cols(t, pos[1])
        # clear row and column t, shrinking the pivot degree on remainders
        while True:
            dirty = False
            for i in range(t + 1, w.nr):
                if not w.a[i][t].is_zero():
                    q = w.a[i][t] // w.a[t][t]
                    w.add_row(i, t, -q)
                    if not w.a[i][t].is_zero():
                        # remainder of lower degree becomes the new pivot
                        w.swap_rows(t, i)
                        dirty = True
                        break
            if dirty:
                continue
            for j in range(t + 1, w.nc):
                if not w.a[t][j].is_zero():
                    q = w.a[t][j] // w.a[t][t]
                    w.add_col(j, t, -q)
                    if not w.a[t][j].is_zero():
                        w.swap_cols(t, j)
                        dirty = True
                        break
            if dirty:
                continue
            # pivot must divide the whole trailing block
            offender = None
            for i in range(t + 1, w.nr):
                for j in range(t + 1, w.nc):
                    if not w.a[i][j].is_zero() and not w.a[t][t].divides(w.a[i][j]):
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            w.add_row(t, offender, Poly([1]))
        lead = w.a[t][t].lead
        if lead != 1:
            w.scale_row(t, 1 / lead)
        t += 1
    S = PolyMatrix(w.a)
    inv = tuple(w.a[i][i] for i in range(n) if not w.a[i][i].is_zero())
    return SmithDecomposition(PolyMatrix(w.L), S, PolyMatrix(w.R), inv)


def invariant_polynomials(P: PolyMatrix) -> tuple[Poly, ...]:
    return smith_form(P).invariant_polys


def invariant_polynomials_by_minors(P: PolyMatrix) -> tuple[Poly, ...]:
    """Quotient definition: eps_k = d_k / d_{k-1} over the minor gcds.

    Brute-force oracle for the Smith form; subject to the enumeration cap.
    """
    out = []
    prev = Poly([1])
    for k in range(1, min(P.shape) + 1):
        dk = gcd_of_minors(P, k)
        if dk.is_zero():
            break
        out.append(dk.exact_div(prev).monic())
        prev = dk
    return tuple(out)


class RatMatrix:
    """Immutable rectangular matrix of rational functions."""

    __slots__ = ("entries",)

    def __init__(self, entries: Iterable[Iterable]):
        rows = tuple(
            tuple(e if isinstance(e, RatFn) else RatFn(_as_poly(e)) for e in row)
            for row in entries
        )
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise DomainError("ragged rational matrix")
        object.__setattr__(self, "entries", rows)

    def __setattr__(self, *a):
        raise AttributeError("RatMatrix is immutable")

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0]) if self.entries else 0

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.entries == other.entries

    def submatrix(self, rows, cols) -> "RatMatrix":
        return RatMatrix([[self.entries[i][j] for j in cols] for i in rows])

    def lcd(self) -> Poly:
        """Monic least common denominator of all entries."""
        return poly_lcm_many(
            [e.den for row in self.entries for e in row if not e.is_zero()]
        )

    def clear_denominators(self) -> tuple[Poly, PolyMatrix]:
        """Return (phi, T) with T = phi * W a polynomial matrix."""
        phi = self.lcd()
        T = PolyMatrix(
            [
                [e.num * phi.exact_div(e.den) if not e.is_zero() else Poly() for e in row]
                for row in self.entries
            ]
        )
        return phi, T

    def normal_rank(self) -> int:
        _, T = self.clear_denominators()
        return normal_rank(T)

    def determinant(self) -> RatFn:
        n, m = self.shape
        if n != m:
            raise DomainError("determinant of a non-square matrix")
        if n == 0:
            return RatFn(Poly([1]))
        phi, T = self.clear_denominators()
        det_t = determinant(T)
        den = Poly([1])
        for _ in range(n):
            den = den * phi
        return RatFn(det_t, den)

    def minor(self, rows, cols) -> RatFn:
        return self.submatrix(rows, cols).determinant()

    def all_minors(self, order: int) -> list[RatFn]:
        if min(self.shape) > MINOR_DIM_CAP:
            raise SizeError(
                f"minor enumeration capped at min-dimension {MINOR_DIM_CAP}"
            )
        out = []
        for rows in combinations(range(self.rows), order):
            for cols in combinations(range(self.cols), order):
                out.append(self.minor(rows, cols))
        return out

    def __repr__(self):
        body = "; ".join(", ".join(str(e) for e in row) for row in self.entries)
        return f"RatMatrix[{body}]"


@dataclass(frozen=True)
class SmithMcMillanDecomposition:
    """Diagonal eps_i / psi_i data of a rational matrix plus the unimodular
    factors of the underlying Smith reduction of phi * W."""

    eps: tuple[Poly, ...]
    psi: tuple[Poly, ...]
    U_L: PolyMatrix
    U_R: PolyMatrix
    phi: Poly

    def diagonal(self) -> list[RatFn]:
        return [RatFn(e, p) for e, p in zip(self.eps, self.psi)]


def smith_mcmillan(W: RatMatrix) -> SmithMcMillanDecomposition:
    """Smith-McMillan canonical form of a rational matrix.

    Clears denominators with the monic least common denominator phi, Smith
    reduces the polynomial matrix, then cancels phi against each diagonal.
    """
    phi, T = W.clear_denominators()
    dec = smith_form(T)
    eps, psi = [], []
    for st in dec.invariant_polys:
        f = RatFn(st, phi)
        eps.append(f.num.monic())
        psi.append(f.den)
    return SmithMcMillanDecomposition(
        tuple(eps), tuple(psi), dec.U_L, dec.U_R, phi
    )


def unimodular_inverse(U: PolyMatrix) -> PolyMatrix:
    """Exact polynomial inverse of a unimodular matrix."""
    det = determinant(U)
    if det.is_zero() or det.degree != 0:
        raise DomainError("matrix is not unimodular")
    c = 1 / det.coeffs[0]
    adj = adjugate(U)
    return PolyMatrix([[e * c for e in row] for row in adj.entries])
