"""Canonical transformations with a companion-type dynamics matrix.

Covers the single-input companion form, the block companion form for
``n = r * nu`` (Asseo), and the generalized block companion staircase form
(Yokoyama), each with the full transformation matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from . import qmat
from .polymat import PolyMatrix, determinant
from .ratpoly import DomainError, Poly
from .statespace import StateSpace, StructuralError


@dataclass(frozen=True)
class CanonicalDecomposition:
    """Result of a canonical state (and input) transformation.

    ``F = N A N^-1`` and ``G = N B M`` follow the staircase block companion
    structure; ``M`` is an input permutation (identity unless the staircase
    branch needs one).  ``C_blocks`` partitions ``C N^-1`` by the stair sizes.
    """

    kind: str
    N: qmat.QMatrix
    M: qmat.QMatrix
    F: qmat.QMatrix
    G: qmat.QMatrix
    nu: int
    l_list: tuple[int, ...]

    @property
    def N_inv(self) -> qmat.QMatrix:
        return qmat.inv(self.N)

    @property
    def bottom_blocks(self) -> tuple[qmat.QMatrix, ...]:
        """F_{nu,1} ... F_{nu,nu}: the designable bottom block row of F."""
        n = len(self.F)
        r = self.l_list[-1]
        out = []
        start = 0
        for li in self.l_list:
            out.append(
                tuple(tuple(self.F[i][start + j] for j in range(li)) for i in range(n - r, n))
            )
            start += li
        return tuple(out)

    @property
    def G_nu(self) -> qmat.QMatrix:
        n = len(self.F)
        r = self.l_list[-1]
        return tuple(tuple(self.G[i][j] for j in range(r)) for i in range(n - r, n))

    def output_blocks(self, C: qmat.QMatrix) -> tuple[qmat.QMatrix, ...]:
        """Partition C N^-1 into l x l_i blocks by the stair sizes."""
        CN = qmat.matmul(C, self.N_inv)
        out = []
        start = 0
        for li in self.l_list:
            out.append(tuple(tuple(row[start + j] for j in range(li)) for row in CN))
            start += li
        return tuple(out)


@dataclass(frozen=True)
class BlockCompanion:
    """Block companion data of a monic matrix polynomial.

    For coefficients restricted to ``T_i = [O, T_hat_i]`` the generalized
    (staircase) variant of total size ``sum(l_list)`` applies.
    """

    r: int
    degree: int
    T_blocks: tuple[qmat.QMatrix, ...]  # T_1 ... T_p, each r x r


def block_companion_matrix(bc: BlockCompanion) -> qmat.QMatrix:
    """P* with identity super-diagonal blocks and -T_p ... -T_1 at the bottom."""
    r, p = bc.r, bc.degree
    n = r * p
    m = [[Fraction(0)] * n for _ in range(n)]
    for blk in range(p - 1):
        for i in range(r):
            m[blk * r + i][(blk + 1) * r + i] = Fraction(1)
    for j, T in enumerate(reversed(bc.T_blocks)):  # T_p first
        for i in range(r):
            for k in range(r):
                m[n - r + i][j * r + k] = -T[i][k]
    return tuple(tuple(row) for row in m)


def generalized_block_companion_matrix(
    T_hats: tuple[qmat.QMatrix, ...], l_list: tuple[int, ...]
) -> qmat.QMatrix:
    """Staircase form: sizes l_1 <= ... <= l_p = r, identity blocks
    E_{i,i+1} = [O, I_{l_i}], bottom row blocks -T_hat_p ... -T_hat_1."""
    p = len(l_list)
    r = l_list[-1]
    n = sum(l_list)
    starts = [0]
    for li in l_list[:-1]:
        starts.append(starts[-1] + li)
    m = [[Fraction(0)] * n for _ in range(n)]
    for blk in range(p - 1):
        li, lnext = l_list[blk], l_list[blk + 1]
        for i in range(li):
            m[starts[blk] + i][starts[blk + 1] + (lnext - li) + i] = Fraction(1)
    # bottom blocks: T_hat_i is r x l_{p-i+1}; laid out left to right as
    # -T_hat_p (width l_1), ..., -T_hat_1 (width l_p)
    col = 0
    for j in range(p):
        T = T_hats[p - 1 - j]  # T_hat_{p-j}
        width = l_list[j]
        for i in range(r):
            for k in range(width):
                m[n - r + i][col + k] = -T[i][k]
        col += width
    return tuple(tuple(row) for row in m)


def matrix_polynomial_det(
    T_blocks: tuple[qmat.QMatrix, ...], r: int, degree: int
) -> Poly:
    """det(I_r s^p + T_1 s^{p-1} + ... + T_p) as an exact polynomial."""
    entries = [[Poly() for _ in range(r)] for _ in range(r)]
    for i in range(r):
        entries[i][i] = Poly.monomial(degree)
    for k, T in enumerate(T_blocks):  # T_{k+1} multiplies s^{p-k-1}
        power = degree - 1 - k
        for i in range(r):
            for j in range(r):
                if T[i][j]:
                    entries[i][j] = entries[i][j] + Poly.monomial(power, T[i][j])
    return determinant(PolyMatrix(entries))


def _char_poly(M: qmat.QMatrix) -> Poly:
    s = Poly.x()
    n = len(M)
    return determinant(
        PolyMatrix(
            [
                [(s if i == j else Poly()) - Poly.const(M[i][j]) for j in range(n)]
                for i in range(n)
            ]
        )
    )


def to_companion(sys: StateSpace) -> CanonicalDecomposition:
    """Single-input companion form; N is built from the controllability
    matrix and the characteristic coefficients."""
    if sys.r != 1:
        raise StructuralError("companion form needs a single input")
    info = sys.controllability()
    if not info.controllable:
        raise StructuralError(
            f"pair (A, b) uncontrollable: rank {info.rank_Y} < {sys.n}"
        )
    n = sys.n
    chi = sys.char_poly()  # s^n + a_1 s^{n-1} + ... + a_n
    a = [chi.coeffs[n - k] for k in range(1, n + 1)]  # a_1 ... a_n
    # inverse controllability matrix of the target pair: Hankel of a_i
    hank = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n - i):
            k = n - 1 - i - j  # coefficient index: a_{k}, a_0 = 1
            hank[i][j] = Fraction(1) if k == 0 else a[k - 1]
    Y = sys.controllability_matrix()
    N_inv = qmat.matmul(Y, tuple(tuple(r) for r in hank))
    N = qmat.inv(N_inv)
    F = qmat.matmul(qmat.matmul(N, sys.A), N_inv)
    G = qmat.matmul(N, sys.B)
    return CanonicalDecomposition(
        kind="companion",
        N=N,
        M=qmat.eye(1),
        F=F,
        G=G,
        nu=n,
        l_list=(1,) * n,
    )


def to_asseo(sys: StateSpace) -> CanonicalDecomposition:
    """Block companion form for ``n = r * nu`` with B* = [O; I_r]."""
    info = sys.controllability()
    if not info.controllable:
        raise StructuralError(
            f"pair (A, B) uncontrollable: rank {info.rank_Y} < {sys.n}"
        )
    if qmat.rank(sys.B) != sys.r:
        raise StructuralError("input matrix must have full column rank")
    n, r, nu = sys.n, sys.r, info.nu
    if n != r * nu:
        raise StructuralError(
            f"n = {n} != r * nu = {r * nu}: use the staircase form instead"
        )
    blocks = [sys.B]
    for _ in range(nu - 1):
        blocks.append(qmat.matmul(sys.A, blocks[-1]))
    Ynu = qmat.hstack(*blocks)
    Ynu_inv = qmat.inv(Ynu)
    N_nu = tuple(Ynu_inv[n - r + i] for i in range(r))
    rows = [N_nu]
    for _ in range(nu - 1):
        rows.append(qmat.matmul(rows[-1], sys.A))
    N = qmat.vstack(*rows)
    N_inv = qmat.inv(N)
    F = qmat.matmul(qmat.matmul(N, sys.A), N_inv)
    G = qmat.matmul(N, sys.B)
    return CanonicalDecomposition(
        kind="asseo",
        N=N,
        M=qmat.eye(r),
        F=F,
        G=G,
        nu=nu,
        l_list=(r,) * nu,
    )


def _stair_blocks(sys: StateSpace, M: qmat.QMatrix, nu: int, l_list):
    """V_1 ... V_nu: V_i keeps the last l_{nu-i+1} columns of A^{i-1} B M."""
    BM = qmat.matmul(sys.B, M)
    r = sys.r
    Vs = [BM]
    power = BM
    for i in range(2, nu + 1):
        power = qmat.matmul(sys.A, power)
        keep = l_list[nu - i]
        Vs.append(qmat.submatrix(power, range(sys.n), range(r - keep, r)))
    return Vs


def _choose_permutation(sys: StateSpace, nu: int, l_list) -> qmat.QMatrix:
    """First column permutation (lexicographic, identity first) for which the
    stacked stair columns are independent."""
    r = sys.r
    for perm in permutations(range(r)):
        M = tuple(
            tuple(Fraction(1) if perm[j] == i else Fraction(0) for j in range(r))
            for i in range(r)
        )
        V = qmat.hstack(*_stair_blocks(sys, M, nu, l_list))
        if qmat.rank(V) == sys.n:
            return M
    raise StructuralError("no input permutation yields independent stair columns")


def to_yokoyama(sys: StateSpace) -> CanonicalDecomposition:
    """Generalized block companion (staircase) form for any controllable pair
    with full-rank B.  Free entries of the defining equation are set to zero,
    which keeps the construction deterministic."""
    info = sys.controllability()
    if not info.controllable:
        raise StructuralError(
            f"pair (A, B) uncontrollable: rank {info.rank_Y} < {sys.n}"
        )
    if qmat.rank(sys.B) != sys.r:
        raise StructuralError("input matrix must have full column rank")
    n, r, nu = sys.n, sys.r, info.nu
    l_list = info.l_list
    if n == r * nu:
        return to_asseo(sys)
    M = _choose_permutation(sys, nu, l_list)
    Vs = _stair_blocks(sys, M, nu, l_list)
    V = qmat.hstack(*Vs)
    V_inv = qmat.inv(V)

    # right-hand side rows for [P_nu; P_{nu-1}; ...; P_1]:
    # the block for P_{nu-k} has height l_{k+1} - l_k and carries an identity
    # left-aligned in the (k+1)-th block column from the right; free entries
    # to the right of it are zeroed.
    widths = [l_list[nu - 1 - j] for j in range(nu)]  # l_nu, ..., l_1
    col_start = [0]
    for wdt in widths[:-1]:
        col_start.append(col_start[-1] + wdt)
    P_rows: list[list[Fraction]] = []
    heights = []
    l_prev = 0
    for k in range(nu):
        h = l_list[k] - l_prev
        l_prev = l_list[k]
        heights.append(h)
        if h == 0:
            continue
        block_j = nu - 1 - k  # 0-based block column (from the left)
        base = col_start[block_j]
        for i in range(h):
            row = [Fraction(0)] * n
            row[base + i] = Fraction(1)
            P_rows.append(row)
    rhs = tuple(tuple(row) for row in P_rows)
    P_stack = qmat.matmul(rhs, V_inv)  # r x n: [P_nu; P_{nu-1}; ...; P_1]

    # assemble N = [N_nu; ...; N_1], N_{nu-k} = [P_{nu-k}; N_{nu-k+1} A]
    offsets = []
    pos = 0
    for h in heights:
        offsets.append(pos)
        pos += h
    def p_block(k):  # P_{nu-k}
        return tuple(P_stack[offsets[k] + i] for i in range(heights[k]))

    N_blocks: list[qmat.QMatrix] = []
    prev = None
    for k in range(nu):
        pk = p_block(k)
        if prev is None:
            blk = pk
        else:
            tail = qmat.matmul(prev, sys.A)
            blk = qmat.vstack(pk, tail) if heights[k] else tail
        N_blocks.append(blk)
        prev = blk
    N = qmat.vstack(*N_blocks)
    N_inv = qmat.inv(N)
    F = qmat.matmul(qmat.matmul(N, sys.A), N_inv)
    G = qmat.matmul(qmat.matmul(N, sys.B), M)
    return CanonicalDecomposition(
        kind="yokoyama",
        N=N,
        M=M,
        F=F,
        G=G,
        nu=nu,
        l_list=l_list,
    )


def staircase_structure_ok(dec: CanonicalDecomposition) -> bool:
    """Check F has the staircase identity blocks and G = [O; G_nu] with a
    unit lower-triangular G_nu."""
    l_list = dec.l_list
    nu = len(l_list)
    n = sum(l_list)
    r = l_list[-1]
    starts = [0]
    for li in l_list[:-1]:
        starts.append(starts[-1] + li)
    F, G = dec.F, dec.G
    for blk in range(nu - 1):
        li, lnext = l_list[blk], l_list[blk + 1]
        for i in range(li):
            for j in range(n):
                expect = Fraction(0)
                if j == starts[blk + 1] + (lnext - li) + i:
                    expect = Fraction(1)
                if F[starts[blk] + i][j] != expect:
                    return False
    for i in range(n - r):
        if any(G[i][j] != 0 for j in range(r)):
            return False
    for i in range(r):
        if G[n - r + i][i] != 1:
            return False
        if any(G[n - r + i][j] != 0 for j in range(i + 1, r)):
            return False
    return True
