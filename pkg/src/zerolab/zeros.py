"""The zero engine.

Rosenbrock system matrix, the five zero sets and their set relations, the
matrix-polynomial zero polynomial, zero-count bounds, reduced pencils, and
the numeric computation routes (pencil, high gain, interpolation).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import qmat
from .canon import CanonicalDecomposition, to_yokoyama
from .polymat import PolyMatrix, determinant, smith_form
from .ratpoly import (
    DomainError,
    Poly,
    RootSet,
    cluster_match,
    multiset_difference,
    multiset_intersect,
    poly_gcd_many,
    roots,
)
from .statespace import StateSpace, StructuralError

#: tolerance for matching roots across methods: |z1 - z2| <= tol * (1 + |z1|)
MATCH_TOL = 1e-6


class DegenerateSystemError(DomainError):
    """The zero polynomial vanishes identically (zeros fill the whole plane)."""


@dataclass(frozen=True)
class SystemMatrix:
    """P(s) = [[sI - A, -B], [C, O]] as an exact polynomial matrix."""

    P: PolyMatrix
    n: int
    r: int
    l: int


def system_matrix(sys: StateSpace) -> SystemMatrix:
    sys.require_strictly_proper("the system matrix zero analysis")
    top = sys.si_minus_a().hstack(PolyMatrix.from_scalar(qmat.neg(sys.B)))
    bottom = PolyMatrix.from_scalar(sys.C).hstack(
        PolyMatrix.zero(sys.l, sys.r)
    )
    return SystemMatrix(top.vstack(bottom), sys.n, sys.r, sys.l)


def invariant_zeros(sys: StateSpace) -> tuple[Poly, RootSet]:
    """Invariant zero polynomial: product of the invariant polynomials of the
    Smith form of P(s)."""
    sm = system_matrix(sys)
    psi = Poly([1])
    for e in smith_form(sm.P).invariant_polys:
        psi = psi * e
    psi = psi.monic()
    return psi, roots(psi) if psi.degree >= 1 else RootSet([])


def system_zeros(sys: StateSpace) -> tuple[Poly, RootSet]:
    """System zero polynomial: monic gcd of the special maximal-order minors
    of P(s) that retain every state row and column."""
    sm = system_matrix(sys)
    n, r, l = sm.n, sm.r, sm.l
    for delta in range(min(r, l), 0, -1):
        minors = []
        state = list(range(n))
        for add_rows in combinations(range(l), delta):
            rows = state + [n + i for i in add_rows]
            for add_cols in combinations(range(r), delta):
                cols = state + [n + j for j in add_cols]
                m = determinant(sm.P.submatrix(rows, cols))
                if not m.is_zero():
                    minors.append(m)
        if minors:
            psi = poly_gcd_many(minors)
            return psi, roots(psi) if psi.degree >= 1 else RootSet([])
    raise DegenerateSystemError(
        "every structured minor of the system matrix vanishes identically"
    )


def decoupling_zeros(sys: StateSpace):
    """(input, output, io) decoupling zero polynomials and root sets.

    Input (output) decoupling zeros are the roots of the invariant
    polynomials of [sI - A, B] (resp. [sI - A; C]); the input-output set is
    derived from the multiset identity with system and transmission zeros.
    """
    P_i = sys.si_minus_a().hstack(PolyMatrix.from_scalar(sys.B))
    P_o = sys.si_minus_a().vstack(PolyMatrix.from_scalar(sys.C))
    z_in = Poly([1])
    for e in smith_form(P_i).invariant_polys:
        z_in = z_in * e
    z_out = Poly([1])
    for e in smith_form(P_o).invariant_polys:
        z_out = z_out * e
    z_in, z_out = z_in.monic(), z_out.monic()
    return (
        (z_in, roots(z_in) if z_in.degree >= 1 else RootSet([])),
        (z_out, roots(z_out) if z_out.degree >= 1 else RootSet([])),
    )


@dataclass(frozen=True)
class ZeroReport:
    """All five zero sets of one model plus exact polynomials and provenance."""

    system_zeros: tuple[complex, ...]
    invariant_zeros: tuple[complex, ...]
    transmission_zeros: tuple[complex, ...]
    input_decoupling: tuple[complex, ...]
    output_decoupling: tuple[complex, ...]
    io_decoupling: tuple[complex, ...]
    zero_poly: Poly
    invariant_poly: Poly
    method_tags: dict = field(default_factory=dict)

    def inclusions_hold(self, tol: float = MATCH_TOL) -> bool:
        """{p} within {i} within {n} as multisets."""
        return _multiset_contains(
            self.invariant_zeros, self.transmission_zeros, tol
        ) and _multiset_contains(self.system_zeros, self.invariant_zeros, tol)

    def identity_holds(self, tol: float = MATCH_TOL) -> bool:
        """{n} + {i.o.d.} = {p} + {o.d.} + {i.d.} as multisets."""
        left = list(self.system_zeros) + list(self.io_decoupling)
        right = (
            list(self.transmission_zeros)
            + list(self.output_decoupling)
            + list(self.input_decoupling)
        )
        return cluster_match(left, right, tol)


def _multiset_contains(big, small, tol):
    return len(multiset_intersect(small, big, tol)) == len(small)


def zero_report(sys: StateSpace) -> ZeroReport:
    """Complete taxonomy via the exact routes; the i.o.d. set is derived from
    the multiset identity (flagged in the method tags)."""
    from .tfm import transfer_matrix, tz_minors, tz_smith_mcmillan

    psi_n, rs_n = system_zeros(sys)
    psi_i, rs_i = invariant_zeros(sys)
    (z_in, rs_in), (z_out, rs_out) = decoupling_zeros(sys)
    G = transfer_matrix(sys)
    try:
        z_p, rs_p = tz_minors(G)
        tz_tag = "tfm-minors"
    except StructuralError:
        z_p, rs_p = tz_smith_mcmillan(G)
        tz_tag = "smith-mcmillan"
    # io = i.d. + o.d. + p - n  (exact polynomial quotient when it divides)
    prod = (z_in * z_out * z_p).monic()
    io_poly, rem = prod.divmod(psi_n.monic())
    if rem.is_zero():
        io = tuple(roots(io_poly).expanded()) if io_poly.degree >= 1 else ()
    else:
        io = tuple(
            multiset_difference(
                list(rs_in.expanded()) + list(rs_out.expanded()) + list(rs_p.expanded()),
                rs_n.expanded(),
            )
        )
    return ZeroReport(
        system_zeros=tuple(rs_n.expanded()),
        invariant_zeros=tuple(rs_i.expanded()),
        transmission_zeros=tuple(rs_p.expanded()),
        input_decoupling=tuple(rs_in.expanded()),
        output_decoupling=tuple(rs_out.expanded()),
        io_decoupling=io,
        zero_poly=psi_n,
        invariant_poly=psi_i,
        method_tags={
            "system": "structured-minors",
            "invariant": "smith-form",
            "transmission": tz_tag,
            "io_decoupling": "identity-derived",
        },
    )


# ---------------------------------------------------------------------------
# matrix-polynomial route


def output_matrix_polynomial(
    dec: CanonicalDecomposition, C: qmat.QMatrix
) -> PolyMatrix:
    """C~(s) = [O, C_1] + [O, C_2] s + ... + C_nu s^{nu-1} from the staircase
    blocks of C N^-1 (blocks padded on the left to width r)."""
    blocks = dec.output_blocks(C)
    r = dec.l_list[-1]
    rows = len(C)
    entries = [[Poly() for _ in range(r)] for _ in range(rows)]
    for k, blk in enumerate(blocks):
        width = dec.l_list[k]
        pad = r - width
        for i in range(rows):
            for j in range(width):
                if blk[i][j]:
                    entries[i][pad + j] = entries[i][pad + j] + Poly.monomial(
                        k, blk[i][j]
                    )
    return PolyMatrix(entries)


def zero_poly_matrix_polynomial(sys: StateSpace) -> Poly:
    """Zero polynomial from the staircase-form matrix polynomial.

    Square: psi = det(C~(s)) / s^{r*nu - n}.  More outputs than inputs: monic
    gcd of the order-r minors, each carrying the same monomial correction.
    Fewer outputs: duality on the transposed model.
    """
    sys.require_strictly_proper("matrix-polynomial zeros")
    if sys.l < sys.r:
        dual = StateSpace(
            qmat.transpose(sys.A), qmat.transpose(sys.C), qmat.transpose(sys.B)
        )
        return zero_poly_matrix_polynomial(dual)
    dec = to_yokoyama(sys)
    Ct = output_matrix_polynomial(dec, sys.C)
    shift = sys.r * dec.nu - sys.n  # >= 0
    if sys.l == sys.r:
        det = determinant(Ct)
        if det.is_zero():
            raise DegenerateSystemError("det C~(s) vanishes identically")
        return _shift_down(det, shift).monic()
    minors = []
    for rows in combinations(range(sys.l), sys.r):
        m = determinant(Ct.submatrix(rows, range(sys.r)))
        if not m.is_zero():
            minors.append(_shift_down(m, shift))
    if not minors:
        raise DegenerateSystemError("all order-r minors of C~(s) vanish")
    return poly_gcd_many(minors)


def _shift_down(p: Poly, k: int) -> Poly:
    """Exact division by s^k."""
    if k == 0:
        return p
    if any(c != 0 for c in p.coeffs[:k]):
        raise DomainError("polynomial is not divisible by the monomial shift")
    return Poly(p.coeffs[k:])


def markov_matrix_polynomial(sys: StateSpace) -> PolyMatrix:
    """C~(s) rebuilt from the Markov parameters CB, CAB, ... and the staircase
    bottom blocks; equals the transformation-based construction exactly."""
    dec = to_yokoyama(sys)
    nu, l_list = dec.nu, dec.l_list
    r = sys.r
    G_nu = dec.G_nu
    Gbar = qmat.matmul(G_nu, qmat.transpose(dec.M))
    Gbar_inv = qmat.inv(Gbar)
    bottoms = dec.bottom_blocks  # F_{nu,1} ... F_{nu,nu}
    # [O, F_{nu,i}] padded to r x r
    def padded(i):
        blk = bottoms[i]
        width = l_list[i]
        return qmat.qmat(
            [
                [Fraction(0)] * (r - width) + list(blk[row])
                for row in range(r)
            ]
        )

    powers = [qmat.matmul(sys.C, sys.B)]
    cur = sys.B
    for _ in range(nu - 1):
        cur = qmat.matmul(sys.A, cur)
        powers.append(qmat.matmul(sys.C, cur))  # C A^k B
    blocks_rxr = [None] * nu
    blocks_rxr[nu - 1] = qmat.matmul(powers[0], Gbar_inv)  # C_nu = C B Gbar^-1
    for step in range(1, nu):
        # C-block for s^{nu-1-step}:
        # C A^step B Gbar^-1 - sum over earlier blocks times padded bottoms
        term = qmat.matmul(powers[step], Gbar_inv)
        for j in range(1, step + 1):
            # subtract C A^{step-j} B Gbar^-1 [O, F_{nu, nu-j+1}]
            term = qmat.sub(
                term,
                qmat.matmul(
                    qmat.matmul(powers[step - j], Gbar_inv), padded(nu - j)
                ),
            )
        blocks_rxr[nu - 1 - step] = term
    # restrict block k to its last l_{k+1} columns, pad back with zeros
    entries = [[Poly() for _ in range(r)] for _ in range(sys.l)]
    for k in range(nu):
        width = l_list[k]
        pad = r - width
        blk = blocks_rxr[k]
        for i in range(sys.l):
            for j in range(width):
                v = blk[i][pad + j]
                if v:
                    entries[i][pad + j] = entries[i][pad + j] + Poly.monomial(k, v)
    return PolyMatrix(entries)


# ---------------------------------------------------------------------------
# zero-count bounds


@dataclass(frozen=True)
class ZeroCountBound:
    kind: str  # "exact" | "upper" | "degenerate"
    value: int

    @property
    def is_exact(self) -> bool:
        return self.kind == "exact"


def zero_count_bound(sys: StateSpace) -> ZeroCountBound:
    """Count/bound the system zeros from the ranks of CB, CAB, ...

    Square full-rank CB gives exactly n - r zeros; rank-deficient leading
    Markov parameters lower the bound; all-zero parameters up to the
    controllability index flag a degenerate system.
    """
    if sys.l < sys.r:
        # duality: zeros of the transposed model share the count structure
        dual = StateSpace(
            qmat.transpose(sys.A), qmat.transpose(sys.C), qmat.transpose(sys.B)
        )
        return zero_count_bound(dual)
    info = sys.controllability()
    if not info.controllable:
        raise StructuralError("zero-count bounds assume a controllable pair")
    if qmat.rank(sys.B) != sys.r:
        raise StructuralError("zero-count bounds assume full-rank B")
    n, r, l = sys.n, sys.r, sys.l
    nu, l_list = info.nu, info.l_list
    CB = qmat.matmul(sys.C, sys.B)
    rank_cb = qmat.rank(CB)
    square = r == l
    if rank_cb == r:
        return ZeroCountBound("exact" if square else "upper", n - r)
    if rank_cb > 0:
        return ZeroCountBound("upper", max(n - r - (r - rank_cb), 0))
    # CB = O: inspect CAB
    markov = [CB]
    cur = sys.B
    all_zero = qmat.is_zero(CB)
    for _ in range(nu - 1):
        cur = qmat.matmul(sys.A, cur)
        markov.append(qmat.matmul(sys.C, cur))
        all_zero = all_zero and qmat.is_zero(markov[-1])
    if all_zero:
        return ZeroCountBound("degenerate", 0)
    CAB = markov[1] if len(markov) > 1 else qmat.zeros(l, r)
    rank_cab = qmat.rank(CAB)
    l_prev = l_list[nu - 2] if nu >= 2 else r
    if l_prev == r:
        if rank_cab == r:
            return ZeroCountBound(
                "exact" if square else "upper", max(n - 2 * r, 0)
            )
        return ZeroCountBound("upper", max(n - 2 * r - (r - rank_cab), 0))
    if rank_cab == l_prev:
        return ZeroCountBound("upper", max(n - 3 * r + l_prev, 0))
    return ZeroCountBound(
        "upper", max(n - 3 * r + l_prev - (l_prev - rank_cab), 0)
    )


# ---------------------------------------------------------------------------
# reduced pencil route


@dataclass(frozen=True)
class Pencil:
    """One-parameter family s * D + L of square real matrices."""

    Dmat: qmat.QMatrix
    Lmat: qmat.QMatrix
    description: str = ""

    def det_poly(self) -> Poly:
        n = len(self.Dmat)
        s = Poly.x()
        entries = [
            [
                s * Poly.const(self.Dmat[i][j]) + Poly.const(self.Lmat[i][j])
                for j in range(n)
            ]
            for i in range(n)
        ]
        return determinant(PolyMatrix(entries))

    def is_regular(self) -> bool:
        return not self.det_poly().is_zero()


def _stair_E(l_list, total_cols, drop_last=0, widen_last=False):
    """Staircase rows: blocks E_{i,i+1} = [O, I_{l_i}] for i ranging over the
    reduced chain.  ``widen_last`` right-pads the final block to width r."""
    nu = len(l_list)
    r = l_list[-1]
    use = l_list[: nu - 1 - drop_last]  # chain l_1 .. l_{nu-1-drop}
    heights = use[:-1] if use else []
    rows = sum(heights)
    out = [[Fraction(0)] * total_cols for _ in range(rows)]
    col_starts = [0]
    for li in use[:-1]:
        col_starts.append(col_starts[-1] + li)
    row0 = 0
    for i, li in enumerate(heights):
        lnext = use[i + 1]
        width = lnext
        base = col_starts[i + 1]
        off = width - li
        if widen_last and i == len(heights) - 1:
            # last block laid out as [O, E] inside width r
            base = total_cols - r
            off = r - li
        for k in range(li):
            out[row0 + k][base + off + k] = Fraction(1)
        row0 += li
    return qmat.qmat(out) if rows else tuple()


def reduced_pencil(sys: StateSpace) -> tuple[Pencil, Poly, RootSet]:
    """Zeros of a square system from a reduced-order matrix or pencil.

    Nonsingular CB: plain eigenproblem of an (n-r) x (n-r) matrix.  Singular
    CB: regular pencil of order n - l_{nu-1} whose spurious generalized
    eigenvalues at the origin are divided out.
    """
    sys.require_strictly_proper("reduced-pencil zeros")
    if sys.r != sys.l:
        raise StructuralError("reduced pencil needs r = l")
    dec = to_yokoyama(sys)
    nu, l_list = dec.nu, dec.l_list
    n, r = sys.n, sys.r
    blocks = dec.output_blocks(sys.C)
    C_nu = blocks[-1]
    CB = qmat.matmul(sys.C, sys.B)
    l_prev = l_list[nu - 2] if nu >= 2 else r
    if nu == 1:
        psi = Poly([1])
        return (
            Pencil(qmat.eye(0), qmat.eye(0), "order-0"),
            psi,
            RootSet([]),
        )
    if qmat.rank(CB) == r:
        C_nu_inv = qmat.inv(C_nu)
        C_head = qmat.hstack(*blocks[:-1])  # r x (n - r)
        T_full = qmat.neg(qmat.matmul(C_nu_inv, C_head))
        if l_prev == r:
            T_hat = T_full
        else:
            T_hat = tuple(T_full[r - l_prev + i] for i in range(l_prev))
        E = _stair_E(l_list, n - r)
        Z = qmat.vstack(E, T_hat) if len(E) else T_hat
        pencil = Pencil(qmat.eye(n - r), qmat.neg(Z), "eigen (CB nonsingular)")
        psi = pencil.det_poly().monic()
        return pencil, psi, roots(psi) if psi.degree >= 1 else RootSet([])
    # singular CB branch
    size = n - l_prev
    beta = size - r
    Dmat = [[Fraction(0)] * size for _ in range(size)]
    for i in range(beta):
        Dmat[i][i] = Fraction(1)
    for i in range(r):
        for j in range(r):
            Dmat[beta + i][beta + j] = C_nu[i][j]
    Ebar = _stair_E(l_list, size, widen_last=True)
    C_head = qmat.hstack(*blocks[:-2]) if nu > 2 else qmat.zeros(r, 0)
    C_prev = blocks[-2]  # r x l_{nu-1}
    C_prev_pad = qmat.qmat(
        [[Fraction(0)] * (r - l_prev) + list(C_prev[i]) for i in range(r)]
    )
    bottom = qmat.hstack(C_head, C_prev_pad) if beta else C_prev_pad
    Lrows = []
    if len(Ebar):
        Lrows.append(qmat.neg(Ebar))
    Lrows.append(bottom)
    Lmat = qmat.vstack(*Lrows)
    pencil = Pencil(qmat.qmat(Dmat), Lmat, "pencil (CB singular)")
    det = pencil.det_poly()
    if det.is_zero():
        raise DegenerateSystemError("reduced pencil is singular")
    psi = _shift_down(det, r - l_prev).monic()
    return pencil, psi, roots(psi) if psi.degree >= 1 else RootSet([])


# ---------------------------------------------------------------------------
# full-size pencil route (generalized eigenvalues of P(s))


def _random_full_rank(
    rng: random.Random, rows: int, cols: int, lo=-5, hi=5
) -> qmat.QMatrix:
    for _ in range(100):
        m = qmat.qmat(
            [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]
        )
        if qmat.rank(m) == min(rows, cols):
            return m
    raise StructuralError("failed to sample a full-rank matrix")


def zeros_pencil(sys: StateSpace, seed: int = 1) -> tuple[Poly | None, list[complex]]:
    """System zeros as generalized eigenvalues of s*D + L built from P(s).

    Square systems give the exact determinant polynomial; non-square systems
    are squared down twice with random full-rank maps and the root multisets
    intersected.
    """
    sys.require_strictly_proper("pencil zeros")
    if sys.r == sys.l:
        sm = system_matrix(sys)
        det = determinant(sm.P)
        if det.is_zero():
            raise DegenerateSystemError("det P(s) vanishes identically")
        psi = det.monic()
        rs = roots(psi) if psi.degree >= 1 else RootSet([])
        return psi, rs.expanded()
    rng = random.Random(seed)
    for attempt in range(2):
        try:
            sets = []
            for _ in range(2):
                if sys.l > sys.r:
                    E = _random_full_rank(rng, sys.r, sys.l)
                    squared = StateSpace(sys.A, sys.B, qmat.matmul(E, sys.C))
                else:
                    E = _random_full_rank(rng, sys.r, sys.l)
                    squared = StateSpace(sys.A, qmat.matmul(sys.B, E), sys.C)
                psi, rs = zeros_pencil(squared)
                sets.append(rs)
            return None, multiset_intersect(sets[0], sets[1], MATCH_TOL)
        except DegenerateSystemError:
            if attempt == 1:
                raise
            rng = random.Random(seed + 1)
    raise AssertionError("unreachable")


def build_output_feedback_pencil(
    sys: StateSpace, K: qmat.QMatrix, variant: str = "decoupling"
) -> Pencil:
    """The (n+r+l)-size pencils used for separating and computing zeros.

    ``decoupling``: identity blocks on both auxiliary diagonals (the finite
    generalized eigenvalues are the closed-loop output-feedback eigenvalues).
    ``square-down-outputs`` / ``square-down-inputs``: one identity block
    dropped, giving the zeros of the squared-down system.
    """
    n, r, l = sys.n, sys.r, sys.l
    size = n + r + l
    D = [[Fraction(0)] * size for _ in range(size)]
    for i in range(n):
        D[i][i] = Fraction(1)
    L = [[Fraction(0)] * size for _ in range(size)]
    for i in range(n):
        for j in range(n):
            L[i][j] = -sys.A[i][j]
        for j in range(r):
            L[i][n + l + j] = sys.B[i][j]
    for i in range(l):
        for j in range(n):
            L[n + i][j] = -sys.C[i][j]
    # middle identity I_l unless squaring down outputs
    if variant != "square-down-outputs":
        for i in range(l):
            L[n + i][n + i] = Fraction(1)
    # K block (r x l) in the bottom middle
    for i in range(r):
        for j in range(l):
            L[n + l + i][n + j] = K[i][j]
    # bottom-right identity I_r unless squaring down inputs
    if variant != "square-down-inputs":
        for i in range(r):
            L[n + l + i][n + l + i] = Fraction(1)
    return Pencil(qmat.qmat(D), qmat.qmat(L), f"aux pencil ({variant})")


# ---------------------------------------------------------------------------
# high-gain route


def zeros_highgain(
    sys: StateSpace,
    k: float = 1e8,
    K1: qmat.QMatrix | None = None,
    K2: qmat.QMatrix | None = None,
    seed: int = 1,
):
    """Zeros from the finite eigenvalues of A + k B K C at large gain.

    Returns (all_zeros, decoupling, transmission): the intersection over two
    gain directions isolates the decoupling zeros; the rest transmit.
    """
    sys.require_strictly_proper("high-gain zeros")
    if sys.r != sys.l:
        raise StructuralError("high-gain route needs r = l")
    rng = random.Random(seed)
    if K1 is None:
        K1 = _random_full_rank(rng, sys.r, sys.l)
    if K2 is None:
        K2 = _random_full_rank(rng, sys.r, sys.l)
    cutoff = k ** 0.5

    def finite_eigs(K):
        a = qmat.to_float(sys.A) + k * qmat.to_float(sys.B) @ qmat.to_float(
            K
        ) @ qmat.to_float(sys.C)
        lam = np.linalg.eigvals(a)
        return [complex(z) for z in lam if abs(z) < cutoff]

    om1 = finite_eigs(K1)
    om2 = finite_eigs(K2)
    decoupling = multiset_intersect(om1, om2, 1e-4)
    transmission = multiset_difference(om1, decoupling, 1e-4)
    return om1, decoupling, transmission


# ---------------------------------------------------------------------------
# interpolation route


def zeros_interpolation(sys: StateSpace) -> Poly:
    """Zero polynomial by exact evaluation/interpolation.

    Evaluates psi(s_i) = det(s_i I - A) det G(s_i) at rational sample points
    clear of the eigenvalues and solves the Vandermonde system exactly.
    """
    sys.require_strictly_proper("interpolation zeros")
    if sys.r != sys.l:
        raise StructuralError("interpolation route needs r = l")
    try:
        bound = zero_count_bound(sys)
        if bound.kind == "degenerate":
            raise DegenerateSystemError(
                "degenerate system has no zero polynomial"
            )
        mu = max(bound.value, 0)
    except StructuralError:
        mu = max(sys.n - sys.r, 0)
    chi = sys.char_poly()
    pts: list[Fraction] = []
    cand = Fraction(1, 2)
    while len(pts) < mu + 1:
        attempts = 0
        while chi(cand) == 0:
            cand += Fraction(1, 3)
            attempts += 1
            if attempts > 100:
                raise StructuralError("could not avoid eigenvalue collisions")
        pts.append(cand)
        cand += 1
    bvals = []
    for s in pts:
        sI_A = qmat.qmat(
            [
                [
                    (s if i == j else Fraction(0)) - sys.A[i][j]
                    for j in range(sys.n)
                ]
                for i in range(sys.n)
            ]
        )
        X = qmat.solve(sI_A, sys.B)
        Gs = qmat.matmul(sys.C, X)
        bvals.append(chi(s) * _qdet(Gs))
    V = qmat.qmat([[s**j for j in range(mu + 1)] for s in pts])
    coeffs = qmat.solve(V, tuple((b,) for b in bvals))
    psi = Poly([c[0] for c in coeffs])
    if psi.is_zero():
        raise DegenerateSystemError("interpolated zero polynomial is zero")
    psi = psi.monic()
    # rank cross-check of each candidate root on the system matrix
    sm = system_matrix(sys)
    kept = psi
    for root, _mult in roots(psi):
        if not _rank_drops(sm, root):
            # spurious root: divide it out (cannot occur with exact data)
            kept = kept.exact_div(Poly([-Fraction(repr(root.real)), 1]))
    return kept.monic()


def _qdet(m: qmat.QMatrix) -> Fraction:
    a = [list(row) for row in m]
    n = len(a)
    det = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        det *= a[c][c]
        inv = 1 / a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] * inv
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def _rank_drops(sm: SystemMatrix, z: complex) -> bool:
    P = np.array(
        [[complex(e(complex(z))) for e in row] for row in sm.P.entries]
    )
    sv = np.linalg.svd(P, compute_uv=False)
    full = sm.n + min(sm.r, sm.l)
    tau = sv[0] * max(P.shape) * 1e-9 if sv.size else 0.0
    return int(np.sum(sv > tau)) < full
