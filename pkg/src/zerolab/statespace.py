"""State-space model container and controllability/observability analysis.

The model matrices are exact rationals; analyses cache lazily and are
idempotent, so concurrent first calls may duplicate work but always agree.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import qmat
from .polymat import PolyMatrix, determinant
from .ratpoly import DomainError, Poly, RootSet, roots, squarefree_decompose

#: relative tolerance factor for numeric rank decisions at non-rational
#: eigenvalues: tau = sigma_max * max(m, n) * PBH_RANK_RTOL
PBH_RANK_RTOL = 1e-10


class StructuralError(DomainError):
    """A structural precondition (controllability, rank, squareness) fails."""


@dataclass(frozen=True)
class ControllabilityInfo:
    """Rank data of the nested controllability (or observability) matrices."""

    rank_Y: int
    nu: int
    l_list: tuple[int, ...]
    controllable: bool

    @property
    def rank_deficiency(self) -> int:
        return self._n - self.rank_Y

    _n: int = 0


@dataclass(frozen=True)
class EigenStructure:
    eigenvalues: RootSet
    pbh_input_ranks: tuple[int, ...]
    pbh_output_ranks: tuple[int, ...]


def _staircase_ranks(A: qmat.QMatrix, B: qmat.QMatrix) -> list[int]:
    """ranks of [B], [B, AB], ..., [B, ..., A^{n-1}B]."""
    n = len(A)
    blocks = [B]
    for _ in range(n - 1):
        blocks.append(qmat.matmul(A, blocks[-1]))
    ranks = []
    acc = None
    for blk in blocks:
        acc = blk if acc is None else qmat.hstack(acc, blk)
        ranks.append(qmat.rank(acc))
    return ranks


def _ctrb_info(A: qmat.QMatrix, B: qmat.QMatrix) -> ControllabilityInfo:
    n = len(A)
    ranks = _staircase_ranks(A, B)
    rank_Y = ranks[-1]
    nu = next(k + 1 for k, r in enumerate(ranks) if r == rank_Y)
    # l_1 <= ... <= l_nu, summing to rank_Y, with l_nu = rank B
    lst = []
    prev = 0
    for k in range(nu):
        lst.append(ranks[k] - prev)
        prev = ranks[k]
    lst.reverse()
    return ControllabilityInfo(
        rank_Y=rank_Y,
        nu=nu,
        l_list=tuple(lst),
        controllable=(rank_Y == n),
        _n=n,
    )


class StateSpace:
    """Linear time-invariant model  x' = A x + B u,  y = C x (+ D u).

    All matrices are exact rationals.  The zeros machinery assumes a strictly
    proper plant; a nonzero D is carried but rejected by those algorithms.
    """

    def __init__(self, A, B, C, D=None, name: str = ""):
        self.A = qmat.qmat(A)
        self.B = qmat.qmat(B)
        self.C = qmat.qmat(C)
        n = len(self.A)
        if qmat.shape(self.A) != (n, n):
            raise DomainError("A must be square")
        if len(self.B) != n:
            raise DomainError("B must have as many rows as A")
        if qmat.shape(self.C)[1] != n:
            raise DomainError("C must have as many columns as A")
        r = qmat.shape(self.B)[1]
        l = len(self.C)
        self.D = qmat.qmat(D) if D is not None else qmat.zeros(l, r)
        if qmat.shape(self.D) != (l, r):
            raise DomainError("D must be l x r")
        self.name = name
        self._cache: dict = {}

    # -- dimensions ------------------------------------------------------
    @property
    def n(self) -> int:
        return len(self.A)

    @property
    def r(self) -> int:
        return qmat.shape(self.B)[1]

    @property
    def l(self) -> int:
        return len(self.C)

    def is_strictly_proper(self) -> bool:
        return qmat.is_zero(self.D)

    def require_strictly_proper(self, what: str):
        if not self.is_strictly_proper():
            raise StructuralError(
                f"{what} assumes a strictly proper model (D = 0); "
                "got a nonzero feedthrough"
            )

    def __repr__(self):
        tag = f" {self.name!r}" if self.name else ""
        return f"StateSpace{tag}(n={self.n}, r={self.r}, l={self.l})"

    def _memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    # -- characteristic data ----------------------------------------------
    def si_minus_a(self) -> PolyMatrix:
        s = Poly.x()
        return PolyMatrix(
            [
                [
                    (s if i == j else Poly()) - Poly.const(self.A[i][j])
                    for j in range(self.n)
                ]
                for i in range(self.n)
            ]
        )

    def char_poly(self) -> Poly:
        """det(sI - A), exact and monic."""
        return self._memo("char", lambda: determinant(self.si_minus_a()))

    def eigenvalues(self) -> RootSet:
        return self._memo("eig", lambda: roots(self.char_poly()))

    def rational_eigenvalues(self) -> list[Fraction]:
        """Exactly-known rational eigenvalues (from degree-1 squarefree parts
        and rational-root extraction)."""

        def compute():
            out = []
            for f, _m in squarefree_decompose(self.char_poly()):
                out.extend(_rational_roots(f))
            return out

        return self._memo("rational_eig", compute)

    # -- controllability / observability ----------------------------------
    def controllability(self) -> ControllabilityInfo:
        return self._memo("ctrb", lambda: _ctrb_info(self.A, self.B))

    def observability(self) -> ControllabilityInfo:
        return self._memo(
            "obsv",
            lambda: _ctrb_info(qmat.transpose(self.A), qmat.transpose(self.C)),
        )

    def is_controllable(self) -> bool:
        return self.controllability().controllable

    def is_observable(self) -> bool:
        return self.observability().controllable

    def controllability_matrix(self) -> qmat.QMatrix:
        blocks = [self.B]
        for _ in range(self.n - 1):
            blocks.append(qmat.matmul(self.A, blocks[-1]))
        return qmat.hstack(*blocks)

    def observability_matrix(self) -> qmat.QMatrix:
        dual = StateSpace(
            qmat.transpose(self.A), qmat.transpose(self.C), qmat.eye(self.n)
        )
        return qmat.transpose(dual.controllability_matrix())

    # -- eigenvalue-wise PBH structure --------------------------------------
    def eigenstructure(self) -> EigenStructure:
        def compute():
            eig = self.eigenvalues()
            in_ranks, out_ranks = [], []
            for lam, _m in eig:
                in_ranks.append(self._pbh_rank(lam, input_side=True))
                out_ranks.append(self._pbh_rank(lam, input_side=False))
            return EigenStructure(eig, tuple(in_ranks), tuple(out_ranks))

        return self._memo("eigstruct", compute)

    def _pbh_rank(self, lam: complex, input_side: bool) -> int:
        rat = self._as_rational_eigenvalue(lam)
        if rat is not None:
            lam_i = tuple(
                tuple((rat if i == j else Fraction(0)) - self.A[i][j] for j in range(self.n))
                for i in range(self.n)
            )
            if input_side:
                return qmat.rank(qmat.hstack(lam_i, self.B))
            return qmat.rank(qmat.vstack(lam_i, self.C))
        a = qmat.to_float(self.A)
        if input_side:
            m = np.hstack([lam * np.eye(self.n) - a, qmat.to_float(self.B)])
        else:
            m = np.vstack([lam * np.eye(self.n) - a, qmat.to_float(self.C)])
        sv = np.linalg.svd(m.astype(complex), compute_uv=False)
        tau = sv[0] * max(m.shape) * PBH_RANK_RTOL if sv.size else 0.0
        return int(np.sum(sv > tau))

    def _as_rational_eigenvalue(self, lam: complex):
        if abs(lam.imag) > 1e-9 * (1 + abs(lam)):
            return None
        for rat in self.rational_eigenvalues():
            if abs(lam - float(rat)) <= 1e-7 * (1 + abs(lam)):
                return rat
        return None

    def is_stabilizable(self) -> bool:
        """PBH test over every eigenvalue with nonnegative real part."""
        for lam, _m in self.eigenvalues():
            if lam.real >= -1e-12 and self._pbh_rank(lam, True) < self.n:
                return False
        return True

    def is_detectable(self) -> bool:
        for lam, _m in self.eigenvalues():
            if lam.real >= -1e-12 and self._pbh_rank(lam, False) < self.n:
                return False
        return True

    # -- transformations -----------------------------------------------------
    def transformed(self, N: qmat.QMatrix) -> "StateSpace":
        """Similarity transform x -> N x."""
        Ninv = qmat.inv(N)
        return StateSpace(
            qmat.matmul(qmat.matmul(N, self.A), Ninv),
            qmat.matmul(N, self.B),
            qmat.matmul(self.C, Ninv),
            self.D,
        )

    def to_float(self):
        return (
            qmat.to_float(self.A),
            qmat.to_float(self.B),
            qmat.to_float(self.C),
            qmat.to_float(self.D),
        )


def controllability(sys: StateSpace) -> ControllabilityInfo:
    return sys.controllability()


def observability(sys: StateSpace) -> ControllabilityInfo:
    return sys.observability()


def stabilizable(sys: StateSpace) -> bool:
    return sys.is_stabilizable()


def detectable(sys: StateSpace) -> bool:
    return sys.is_detectable()


def _rational_roots(p: Poly) -> list[Fraction]:
    """All rational roots of an exact nonzero polynomial."""
    if p.degree < 1:
        return []
    den = 1
    for c in p.coeffs:
        den = den * c.denominator // _gcd(den, c.denominator)
    ints = [int(c * den) for c in p.coeffs]
    out: list[Fraction] = []
    k = 0
    while ints[k] == 0:
        k += 1
    if k > 0:
        out.append(Fraction(0))
        ints = ints[k:]
    if len(ints) <= 1:
        return out
    a0, an = abs(ints[0]), abs(ints[-1])
    for pdiv in _divisors(a0):
        for qdiv in _divisors(an):
            for cand in (Fraction(pdiv, qdiv), Fraction(-pdiv, qdiv)):
                if p(cand) == 0 and cand not in out:
                    out.append(cand)
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a) if a else 1


def _divisors(x: int) -> list[int]:
    if x == 0:
        return [1]
    out = []
    d = 1
    while d * d <= x:
        if x % d == 0:
            out.append(d)
            if d != x // d:
                out.append(x // d)
        d += 1
    return sorted(out)
