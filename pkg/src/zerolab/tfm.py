"""Transfer-function matrices: construction, poles, transmission zeros by
three independent routes, and the right factorization G = C(s) * A2(s)^-1
built from the block companion form.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from . import qmat
from .canon import CanonicalDecomposition, to_asseo
from .polymat import (
    PolyMatrix,
    RatMatrix,
    adjugate,
    determinant,
    smith_form,
    smith_mcmillan,
)
from .ratpoly import (
    DomainError,
    Poly,
    RatFn,
    RootSet,
    poly_gcd_many,
    poly_lcm_many,
    roots,
)
from .statespace import StateSpace, StructuralError


class TransferMatrix(RatMatrix):
    """Rational matrix G(s) = C (sI - A)^-1 B + D with entries in lowest terms."""

    def __init__(self, entries, source: StateSpace | None = None):
        super().__init__(entries)
        object.__setattr__(self, "source", source)

    __slots__ = ("source",)


def transfer_matrix(sys: StateSpace) -> TransferMatrix:
    """Exact symbolic TFM via the polynomial adjugate of sI - A."""
    phi = sys.char_poly()
    adj = adjugate(sys.si_minus_a())
    Cp = PolyMatrix.from_scalar(sys.C)
    Bp = PolyMatrix.from_scalar(sys.B)
    num = Cp * adj * Bp
    entries = [
        [
            RatFn(num[i, j], phi) + RatFn(Poly.const(sys.D[i][j]))
            for j in range(sys.r)
        ]
        for i in range(sys.l)
    ]
    return TransferMatrix(entries, source=sys)


def poles(G: RatMatrix) -> tuple[Poly, RootSet]:
    """Pole polynomial: monic least common denominator of every nonzero minor
    of every order; its roots (with multiplicity) are the poles."""
    dens = []
    for k in range(1, min(G.shape) + 1):
        for m in G.all_minors(k):
            if not m.is_zero():
                dens.append(m.den)
    if not dens:
        return Poly([1]), RootSet([])
    p = poly_lcm_many(dens)
    return p, roots(p)


def tz_smith_mcmillan(G: RatMatrix) -> tuple[Poly, RootSet]:
    """Transmission zeros: roots of all numerator polynomials eps_i of the
    Smith-McMillan form, taken together."""
    dec = smith_mcmillan(G)
    z = Poly([1])
    for e in dec.eps:
        z = z * e
    z = z.monic()
    return z, roots(z) if z.degree >= 1 else RootSet([])


def tz_minors(G: RatMatrix) -> tuple[Poly, RootSet]:
    """Transmission zeros from the maximal-order minors of G.

    All minors are rescaled to the common least denominator; the monic gcd of
    the rescaled numerators is the zero polynomial.
    """
    rho = min(G.shape)
    if G.normal_rank() != rho:
        raise StructuralError(
            "minor method needs full normal rank min(r, l); "
            f"got {G.normal_rank()} < {rho}"
        )
    minors = [m for m in G.all_minors(rho) if not m.is_zero()]
    p = poly_lcm_many([m.den for m in minors])
    numerators = [m.num * p.exact_div(m.den) for m in minors]
    z = poly_gcd_many(numerators)
    return z, roots(z) if z.degree >= 1 else RootSet([])


@dataclass(frozen=True)
class Factorization:
    """Right factorization G(s) = Cpoly(s) * A2(s)^-1 of degree (nu-1, nu)."""

    Cpoly: PolyMatrix
    A2: PolyMatrix
    coprime: bool
    decomposition: CanonicalDecomposition


def factorize(sys: StateSpace) -> Factorization:
    """Factor the TFM through the block companion form (needs n = r * nu)."""
    sys.require_strictly_proper("factorization")
    dec = to_asseo(sys)  # raises with a pointer to the staircase branch
    n, r, nu = sys.n, sys.r, dec.nu
    C_blocks = dec.output_blocks(sys.C)
    Cpoly = _poly_from_blocks_full(C_blocks)
    # bottom blocks of A*: row block gives [-A21, -A22, ..., -A2nu]
    bottoms = dec.bottom_blocks
    A2_blocks = [qmat.neg(b) for b in bottoms]  # A*_{2,i}, each r x r
    entries = [[Poly.monomial(nu) if i == j else Poly() for j in range(r)] for i in range(r)]
    for k, blk in enumerate(A2_blocks):  # multiplies s^k
        for i in range(r):
            for j in range(r):
                if blk[i][j]:
                    entries[i][j] = entries[i][j] + Poly.monomial(k, blk[i][j])
    A2 = PolyMatrix(entries)
    coprime = sys.is_observable()
    return Factorization(Cpoly=Cpoly, A2=A2, coprime=coprime, decomposition=dec)


def _poly_from_blocks_full(blocks) -> PolyMatrix:
    """C_1 + C_2 s + ... + C_nu s^{nu-1} for full-width (Asseo) blocks."""
    rows = len(blocks[0])
    cols = len(blocks[0][0])
    entries = [[Poly() for _ in range(cols)] for _ in range(rows)]
    for k, blk in enumerate(blocks):
        for i in range(rows):
            for j in range(cols):
                if blk[i][j]:
                    entries[i][j] = entries[i][j] + Poly.monomial(k, blk[i][j])
    return PolyMatrix(entries)


def factorization_product(f: Factorization) -> RatMatrix:
    """Evaluate Cpoly(s) * A2(s)^-1 symbolically."""
    det = determinant(f.A2)
    adj = adjugate(f.A2)
    num = f.Cpoly * adj
    return RatMatrix(
        [
            [RatFn(num[i, j], det) for j in range(num.cols)]
            for i in range(num.rows)
        ]
    )


def tz_numerator(sys: StateSpace) -> tuple[Poly, RootSet]:
    """Transmission zeros as the zeros of all invariant polynomials of the
    numerator C(s) of the factorization (product of its Smith diagonal)."""
    if not sys.is_controllable():
        raise StructuralError("numerator method needs a controllable pair")
    if not sys.is_observable():
        info = sys.observability()
        raise StructuralError(
            "numerator method needs an observable pair "
            f"(observability rank {info.rank_Y} < {sys.n})"
        )
    f = factorize(sys)
    z = Poly([1])
    for e in smith_form(f.Cpoly).invariant_polys:
        z = z * e
    z = z.monic()
    return z, roots(z) if z.degree >= 1 else RootSet([])


def minimal_realization(sys: StateSpace) -> StateSpace:
    """Controllable-observable subsystem by exact subspace restriction."""
    A, B, C = sys.A, sys.B, sys.C
    A, B, C = _controllable_part(A, B, C)
    At, Ct, Bt = _controllable_part(
        qmat.transpose(A), qmat.transpose(C), qmat.transpose(B)
    )
    return StateSpace(qmat.transpose(At), qmat.transpose(Bt), qmat.transpose(Ct))


def _controllable_part(A, B, C):
    """Restrict to the controllable subspace (invariant under A)."""
    n = len(A)
    Y = StateSpace(A, B, qmat.eye(n)).controllability_matrix()
    basis = _independent_columns(Y)
    m = len(basis)
    if m == n:
        return A, B, C
    # complete the basis with unit vectors
    cols = [tuple(Y[i][j] for i in range(n)) for j in basis]
    for k in range(n):
        if len(cols) == n:
            break
        unit = tuple(1 if i == k else 0 for i in range(n))
        trial = cols + [unit]
        if qmat.rank(qmat.qmat(trial)) == len(trial):
            cols = trial
    T = qmat.qmat(list(zip(*cols)))  # columns are the basis vectors
    T_inv = qmat.inv(T)
    Ah = qmat.matmul(qmat.matmul(T_inv, A), T)
    Bh = qmat.matmul(T_inv, B)
    Ch = qmat.matmul(C, T)
    keep = range(m)
    A1 = qmat.submatrix(Ah, keep, keep)
    B1 = qmat.submatrix(Bh, keep, range(len(Bh[0])))
    C1 = qmat.submatrix(Ch, range(len(Ch)), keep)
    return A1, B1, C1


def _independent_columns(M: qmat.QMatrix) -> list[int]:
    """Indices of a maximal independent column subset (leftmost-greedy)."""
    rows = len(M)
    chosen: list[tuple] = []
    idx = []
    for j in range(len(M[0])):
        col = tuple(M[i][j] for i in range(rows))
        trial = chosen + [col]
        if qmat.rank(qmat.qmat(trial)) == len(trial):
            chosen = trial
            idx.append(j)
    return idx
