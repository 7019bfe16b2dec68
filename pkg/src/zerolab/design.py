"""Zero assignment and servo-tracking design.

Assignment redesigns the output (or squaring-down) matrix so the system
zeros land on prescribed locations, either analytically through the
staircase canonical form or by gradient descent on a least-squares
criterion.  The servo side decides solvability of PI / polynomial /
internal-model tracking problems and synthesizes the regulators by exact
eigenvalue placement.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import qmat
from .canon import CanonicalDecomposition, to_yokoyama
from .polymat import PolyMatrix, determinant
from .ratpoly import DomainError, Poly, as_fraction, roots
from .statespace import StateSpace, StructuralError
from .zeros import system_zeros, zero_count_bound


class InfeasibleError(DomainError):
    """The design problem has no solution under the stated hypotheses."""


class ConvergenceError(DomainError):
    def __init__(self, message, final_cost=None, C=None):
        super().__init__(message)
        self.final_cost = final_cost
        self.C = C


# ---------------------------------------------------------------------------
# analytical zero assignment


def _check_targets(sys: StateSpace, targets):
    targets = [as_fraction(t) for t in targets]
    if len(set(targets)) != len(targets):
        raise InfeasibleError("assigned zeros must be pairwise distinct")
    chi = sys.char_poly()
    for t in targets:
        if chi(t) == 0:
            raise InfeasibleError(
                f"assigned zero {t} coincides with an eigenvalue of A"
            )
    return targets


def _selector_chain(dec: CanonicalDecomposition):
    """Derivative chains of the staircase form.

    Each staircase row carries a single unit; following the units yields r
    disjoint chains covering the state indices.  Returns the chains ordered
    by head index.
    """
    l_list = dec.l_list
    nu = len(l_list)
    n = sum(l_list)
    r = l_list[-1]
    starts = [0]
    for li in l_list[:-1]:
        starts.append(starts[-1] + li)
    succ = {}
    for blk in range(nu - 1):
        li, lnext = l_list[blk], l_list[blk + 1]
        for i in range(li):
            succ[starts[blk] + i] = starts[blk + 1] + (lnext - li) + i
    heads = [i for i in range(n) if i not in succ.values()]
    chains = []
    for h in sorted(heads):
        chain = [h]
        while chain[-1] in succ:
            chain.append(succ[chain[-1]])
        chains.append(chain)
    assert len(chains) == r and sum(len(c) for c in chains) == n
    return chains


def _companion_rows_for(dec: CanonicalDecomposition, phi: Poly) -> qmat.QMatrix:
    """Design the bottom r rows of the staircase matrix so its characteristic
    polynomial equals the monic ``phi`` of degree n.

    The r derivative chains are linked into one long chain; the first r - 1
    designable rows carry unit selectors and the last carries the
    coefficients of ``phi`` in the chain-permuted basis.
    """
    l_list = dec.l_list
    n = sum(l_list)
    r = l_list[-1]
    if phi.degree != n or phi.lead != 1:
        raise DomainError("target polynomial must be monic of degree n")
    chains = _selector_chain(dec)
    order: list[int] = []
    for c in chains:
        order.extend(c)
    rows = {}
    for k in range(len(chains) - 1):
        tail = chains[k][-1]
        head = chains[k + 1][0]
        row = [Fraction(0)] * n
        row[head] = Fraction(1)
        rows[tail] = row
    last_tail = chains[-1][-1]
    row = [Fraction(0)] * n
    for j, state in enumerate(order):
        # companion last row: -a_{n-j} at chain position j (0-based)
        row[state] = -phi.coeffs[j]
    rows[last_tail] = row
    bottom = [rows[n - r + i] for i in range(r)]
    return qmat.qmat(bottom)


def place_poles(
    A: qmat.QMatrix, B: qmat.QMatrix, phi: Poly
) -> qmat.QMatrix:
    """State-feedback gain K with char(A + B K) = phi, exactly.

    Works through the staircase canonical form; for a single input this is
    the classical companion-form placement.  Requires a controllable pair
    with full-rank B.
    """
    n = len(A)
    sys = StateSpace(A, B, qmat.eye(n))
    dec = to_yokoyama(sys)
    bottom = _companion_rows_for(dec, phi)
    r = qmat.shape(B)[1]
    F_bottom = qmat.qmat([dec.F[n - r + i] for i in range(r)])
    delta = qmat.sub(bottom, F_bottom)
    Kz = qmat.matmul(qmat.inv(dec.G_nu), delta)
    K = qmat.matmul(qmat.matmul(dec.M, Kz), dec.N)
    # verify the placement exactly
    closed = qmat.add(A, qmat.matmul(B, K))
    chi = StateSpace(closed, B, qmat.eye(n)).char_poly()
    if chi != phi:
        raise InfeasibleError("eigenvalue placement failed verification")
    return K


def poly_from_poles(poles) -> Poly:
    """Monic real polynomial from a conjugation-closed pole list.

    Poles are (re, im) pairs or plain reals; conjugate pairs are combined
    exactly as s^2 - 2*re*s + (re^2 + im^2).
    """
    pending = []
    for p in poles:
        if isinstance(p, tuple):
            re, im = as_fraction(p[0]), as_fraction(p[1])
        elif isinstance(p, complex):
            re, im = as_fraction(repr(p.real)), as_fraction(repr(p.imag))
        else:
            re, im = as_fraction(p), Fraction(0)
        pending.append((re, im))
    phi = Poly([1])
    used = [False] * len(pending)
    for i, (re, im) in enumerate(pending):
        if used[i]:
            continue
        if im == 0:
            phi = phi * Poly([-re, 1])
            used[i] = True
            continue
        mate = next(
            (
                j
                for j in range(i + 1, len(pending))
                if not used[j]
                and pending[j][0] == re
                and pending[j][1] == -im
            ),
            None,
        )
        if mate is None:
            raise DomainError("complex poles must come in conjugate pairs")
        phi = phi * Poly([re * re + im * im, -2 * re, 1])
        used[i] = used[mate] = True
    return phi


def assign_analytical(sys: StateSpace, targets, C_nu=None) -> qmat.QMatrix:
    """Output matrix C placing the n - r system zeros at the given distinct
    real targets, with rank(C B) = r by construction.

    The designable block row of the reduced zero matrix is filled with the
    unit-selector pattern; remaining freedom is zeroed.
    """
    info = sys.controllability()
    if not info.controllable:
        raise StructuralError("analytical assignment needs a controllable pair")
    if qmat.rank(sys.B) != sys.r:
        raise StructuralError("analytical assignment needs full-rank B")
    targets = _check_targets(sys, targets)
    n, r = sys.n, sys.r
    if len(targets) != n - r:
        raise InfeasibleError(f"need exactly n - r = {n - r} targets")
    dec = to_yokoyama(StateSpace(sys.A, sys.B, qmat.eye(n)))
    C_nu = qmat.eye(r) if C_nu is None else qmat.qmat(C_nu)
    if qmat.rank(C_nu) != r:
        raise InfeasibleError("C_nu block must have full rank")
    if n == r:
        return qmat.matmul(C_nu, dec.N)
    psi = Poly([1])
    for t in targets:
        psi = psi * Poly([-t, 1])
    # reuse the chain construction on the reduced (n - r) staircase
    red = _ReducedStair(dec)
    T_rows = red.design_rows(psi)
    # C N^-1 = C_nu [T*, I_r]  ->  C = C_nu [T*, I_r] N
    block = qmat.hstack(T_rows, qmat.eye(r))
    C = qmat.matmul(qmat.matmul(C_nu, block), dec.N)
    return C


class _ReducedStair:
    """The (n - r)-state staircase left after stripping the top of the chain;
    used to design the zero-placing rows."""

    def __init__(self, dec: CanonicalDecomposition):
        self.l_list = dec.l_list
        self.nu = len(self.l_list)
        self.r = self.l_list[-1]
        self.n = sum(self.l_list)

    def design_rows(self, psi: Poly) -> qmat.QMatrix:
        """r x (n - r) block T* with the zero polynomial realized by the
        reduced matrix [E; selected rows of T*]."""
        l_list = self.l_list[:-1]  # chain l_1 .. l_{nu-1}
        m = sum(l_list)  # = n - r
        if psi.degree != m:
            raise DomainError("zero polynomial degree mismatch")
        l_prev = self.l_list[-2] if self.nu >= 2 else self.r
        # chains of the reduced staircase
        starts = [0]
        for li in l_list[:-1]:
            starts.append(starts[-1] + li)
        succ = {}
        for blk in range(len(l_list) - 1):
            li, lnext = l_list[blk], l_list[blk + 1]
            for i in range(li):
                succ[starts[blk] + i] = starts[blk + 1] + (lnext - li) + i
        heads = [i for i in range(m) if i not in succ.values()]
        chains = []
        for h in sorted(heads):
            chain = [h]
            while chain[-1] in succ:
                chain.append(succ[chain[-1]])
            chains.append(chain)
        order = [s for c in chains for s in c]
        rows = {}
        for k in range(len(chains) - 1):
            tail = chains[k][-1]
            head = chains[k + 1][0]
            row = [Fraction(0)] * m
            row[head] = Fraction(1)
            rows[tail] = row
        last_tail = chains[-1][-1]
        row = [Fraction(0)] * m
        for j, state in enumerate(order):
            row[state] = -psi.coeffs[j]
        rows[last_tail] = row
        # designable rows sit at the tails (the last l_{nu-1} reduced states);
        # the reduced zero matrix is [E; W] with W the l_prev bottom rows.
        # The output blocks carry -W; upper freedom is zeroed.
        T_hat = [[-x for x in rows[m - l_prev + i]] for i in range(l_prev)]
        T_star = [[Fraction(0)] * m for _ in range(self.r - l_prev)] + T_hat
        return qmat.qmat(T_star)


# ---------------------------------------------------------------------------
# gradient zero assignment


@dataclass
class AssignmentProblem:
    """Data for the gradient zero-assignment iteration."""

    sys: StateSpace
    targets: list
    measured: int | None = None  # structural case C = [C_m, O]
    q: float = 0.25
    alpha: float = 0.05
    eps: float = 0.02
    max_iter: int = 50000
    use_observability_weight: bool = True
    seed: int = 1


@dataclass
class GradientResult:
    C: np.ndarray
    cost: float
    grad_norm: float
    iterations: int
    achieved: list


def _adjugate(M: np.ndarray) -> np.ndarray:
    """Classical adjugate by cofactors; well defined for singular input."""
    n = M.shape[0]
    if n == 1:
        return np.ones((1, 1))
    if n == 2:
        return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]])
    out = np.empty_like(M)
    idx = list(range(n))
    for i in range(n):
        rows = [k for k in idx if k != i]
        for j in range(n):
            cols = [k for k in idx if k != j]
            out[j, i] = (-1) ** (i + j) * np.linalg.det(M[np.ix_(rows, cols)])
    return out


class _ZeroObjective:
    """J = J1 + q * J2 for an output (or squaring-down) design variable."""

    def __init__(self, sys: StateSpace, targets, q, use_obs_weight, post=None):
        self.sys = sys
        dec = to_yokoyama(StateSpace(sys.A, sys.B, qmat.eye(sys.n)))
        self.dec = dec
        n, r, nu = sys.n, sys.r, dec.nu
        self.shift = n - r * nu  # <= 0
        N_inv = qmat.to_float(dec.N_inv)
        l_list = dec.l_list
        # padded blocks [O, P_t] of N^-1 (n x r each)
        self.P_pad = []
        start = 0
        for li in l_list:
            blk = np.zeros((n, r))
            blk[:, r - li :] = N_inv[:, start : start + li]
            self.P_pad.append(blk)
            start += li
        self.targets = [float(t) for t in targets]
        self.q = float(q)
        self.use_obs_weight = use_obs_weight
        self.A_f = qmat.to_float(sys.A)
        self.gamma = max(sys.n // sys.r, 1)
        self.post = post  # fixed matrix right-multiplying the variable (D C0)

    def _effective(self, X):
        return X if self.post is None else X @ self.post

    def _lin(self, s):
        m = np.zeros_like(self.P_pad[0])
        p = 1.0
        for blk in self.P_pad:
            m = m + blk * p
            p *= s
        return m

    def psi_at(self, X, s):
        C = self._effective(X)
        val = np.linalg.det(C @ self._lin(s))
        return val * s**self.shift

    def achieved_zeros(self, X):
        """Roots of the zero polynomial of the current design (numeric)."""
        C = self._effective(X)
        n, r = self.sys.n, self.sys.r
        mu = n - r
        # sample-and-interpolate the zero polynomial
        pts = [1.5 + 0.25 * k for k in range(mu + 1)]
        eig = np.linalg.eigvals(self.A_f)
        pts = [p for p in pts if min(abs(p - eig)) > 1e-6] or pts
        while len(pts) < mu + 1:
            pts.append(pts[-1] + 0.37)
        V = np.vander(np.array(pts[: mu + 1]), mu + 1, increasing=True)
        b = np.array([self.psi_at(X, s) for s in pts[: mu + 1]])
        coeffs = np.linalg.solve(V, b)
        lead = np.max(np.abs(coeffs))
        if lead < 1e-12:
            return []
        scaled = coeffs / lead
        keep = len(scaled)
        while keep > 0 and abs(scaled[keep - 1]) < 1e-9:
            keep -= 1
        if keep <= 1:
            return []
        return list(np.roots(scaled[:keep][::-1]))

    def cost_grad(self, X):
        C = self._effective(X)
        r, n = C.shape
        J1 = 0.0
        g1 = np.zeros_like(C)
        for s in self.targets:
            M = self._lin(s)
            CM = C @ M
            det = np.linalg.det(CM)
            psi = det * s**self.shift
            J1 += 0.5 * psi * psi
            adj = _adjugate(CM)  # stays finite when CM is singular
            g1 += psi * (s**self.shift) * (M @ adj).T
        if self.q:
            # a full-rank Gram needs gamma * l >= n; otherwise the row Gram
            # of C itself keeps the design full rank
            if self.use_obs_weight and self.gamma * r >= n:
                Z = np.zeros((n, n))
                Ak = np.eye(n)
                terms = []
                for _ in range(self.gamma):
                    terms.append(Ak)
                    Z += Ak.T @ (C.T @ C) @ Ak
                    Ak = Ak @ self.A_f
                detZ = np.linalg.det(Z)
                Zinv = np.linalg.inv(Z)
                J2 = 1.0 / detZ
                g2 = np.zeros_like(C)
                for Ak in terms:
                    g2 += -2.0 / detZ * (C @ Ak @ Zinv @ Ak.T)
            else:
                W = C @ C.T
                detW = np.linalg.det(W)
                J2 = 1.0 / detW
                g2 = -2.0 / detW * (np.linalg.inv(W) @ C)
        else:
            J2, g2 = 0.0, np.zeros_like(C)
        J = J1 + self.q * J2
        g = g1 + self.q * g2
        if self.post is not None:
            g = g @ self.post.T
        return J, g


def gradient_check(sys: StateSpace, C, targets, q=0.25, measured=None,
                   use_observability_weight=True, h=1e-6):
    """Relative error between the analytic criterion gradient and central
    finite differences, entrywise maximum."""
    obj = _ZeroObjective(sys, targets, q, use_observability_weight)
    X = np.array(C, dtype=float)
    _, g = obj.cost_grad(X)
    fd = np.zeros_like(X)
    for i in range(X.shape[0]):
        for j in range(X.shape[1]):
            Xp, Xm = X.copy(), X.copy()
            Xp[i, j] += h
            Xm[i, j] -= h
            fd[i, j] = (obj.cost_grad(Xp)[0] - obj.cost_grad(Xm)[0]) / (2 * h)
    floor = 1e-6 * (1.0 + float(np.max(np.abs(g))) + float(np.max(np.abs(fd))))
    scale = np.maximum(np.abs(fd), np.maximum(np.abs(g), floor))
    rel = np.abs(g - fd) / scale
    return float(np.max(rel)), g, fd


def _descend(obj: _ZeroObjective, X, alpha, eps, max_iter, mask=None):
    J, g = obj.cost_grad(X)
    it = 0
    while it < max_iter:
        gm = g if mask is None else g * mask
        norm = np.sum(np.abs(gm))
        if norm <= eps:
            return X, J, norm, it
        step = alpha
        for _ in range(60):
            Xn = X - step * gm
            Jn, gn = obj.cost_grad(Xn)
            if np.isfinite(Jn) and Jn < J:
                X, J, g = Xn, Jn, gn
                break
            step /= 2
        else:
            return X, J, norm, it
        it += 1
    raise ConvergenceError(
        f"gradient iteration budget exhausted (J = {J:.3e})", final_cost=J
    )


def assign_gradient(problem: AssignmentProblem) -> GradientResult:
    """Gradient descent on the assignment criterion.

    Returns the new output matrix; the structural case optimizes only the
    measured columns and requires more measured states than inputs.
    """
    sys = problem.sys
    info = sys.controllability()
    if not info.controllable:
        raise StructuralError("gradient assignment needs a controllable pair")
    targets = _check_targets(sys, problem.targets)
    n, r = sys.n, sys.r
    m = problem.measured
    if m is not None and m <= r:
        raise InfeasibleError(
            "structural assignment with measured states <= inputs has no solution"
        )
    obj = _ZeroObjective(
        sys, targets, problem.q, problem.use_observability_weight
    )
    X0 = qmat.to_float(sys.C)
    mask = None
    if m is not None:
        mask = np.zeros_like(X0)
        mask[:, :m] = 1.0
        X0 = X0 * mask
    X, J, norm, it = _descend(
        obj, X0, problem.alpha, problem.eps, problem.max_iter, mask
    )
    return GradientResult(
        C=X, cost=J, grad_norm=norm, iterations=it, achieved=obj.achieved_zeros(X)
    )


def assign_squaring_down(
    sys: StateSpace,
    targets,
    q: float = 0.25,
    alpha: float = 0.05,
    eps: float = 0.02,
    max_iter: int = 50000,
    D0=None,
    seed: int = 1,
) -> GradientResult:
    """Squaring-down matrix D (r x l) placing the introduced zeros.

    Existing zeros of the tall system are invariant under any full-rank D;
    only the new ones are assigned.
    """
    if sys.l <= sys.r:
        raise StructuralError("squaring down requires more outputs than inputs")
    info = sys.controllability()
    if not info.controllable:
        raise StructuralError("squaring down assignment needs a controllable pair")
    existing, _ = system_zeros(sys)
    mu = existing.degree
    eta = len(list(targets))
    if mu + eta > sys.n - sys.r:
        raise InfeasibleError(
            f"too many targets: {mu} existing + {eta} new > n - r = {sys.n - sys.r}"
        )
    targets = _check_targets(sys, targets)
    post = qmat.to_float(sys.C)
    obj = _ZeroObjective(sys, targets, q, False, post=post)
    rng = random.Random(seed)
    if D0 is None:
        while True:
            D0 = np.array(
                [[rng.randint(-3, 3) for _ in range(sys.l)] for _ in range(sys.r)],
                dtype=float,
            )
            if np.linalg.matrix_rank(D0) == sys.r:
                break
    X, J, norm, it = _descend(obj, np.array(D0, dtype=float), alpha, eps, max_iter)
    return GradientResult(
        C=X, cost=J, grad_norm=norm, iterations=it, achieved=obj.achieved_zeros(X)
    )


# ---------------------------------------------------------------------------
# servo solvability and synthesis


@dataclass(frozen=True)
class SolvabilityReport:
    stabilizable: bool
    io_count_ok: bool
    zero_condition_ok: bool
    detail: dict = field(default_factory=dict)

    @property
    def solvable(self) -> bool:
        return self.stabilizable and self.io_count_ok and self.zero_condition_ok

    @property
    def verdict(self) -> str:
        return "solvable (sufficient conditions met)" if self.solvable else "not established"


def pi_solvable(A, B, D) -> SolvabilityReport:
    """Step tracking with integral action: stabilizable pair, enough inputs,
    and no system zero at the origin for (A, B, D)."""
    A, B, D = qmat.qmat(A), qmat.qmat(B), qmat.qmat(D)
    n = len(A)
    d = len(D)
    r = qmat.shape(B)[1]
    plant = StateSpace(A, B, D)
    stab = plant.is_stabilizable()
    count_ok = d <= r
    test = qmat.vstack(
        qmat.hstack(qmat.neg(A), qmat.neg(B)),
        qmat.hstack(D, qmat.zeros(d, r)),
    )
    rank0 = qmat.rank(test)
    return SolvabilityReport(
        stabilizable=stab,
        io_count_ok=count_ok,
        zero_condition_ok=(rank0 == n + d),
        detail={"origin_rank": rank0, "required": n + d},
    )


def pi_observer_solvable(A, E, H, F) -> SolvabilityReport:
    """Observer side: detectability of (A, H), enough measurements, and no
    origin zero for the disturbance channel (A, E, H, F)."""
    A, E, H, F = qmat.qmat(A), qmat.qmat(E), qmat.qmat(H), qmat.qmat(F)
    n = len(A)
    p = qmat.shape(E)[1]
    l = len(H)
    dual = StateSpace(qmat.transpose(A), qmat.transpose(H), qmat.eye(n))
    stab = dual.is_stabilizable()
    count_ok = l >= p
    test = qmat.vstack(
        qmat.hstack(qmat.neg(A), qmat.neg(E)),
        qmat.hstack(H, F),
    )
    rank0 = qmat.rank(test)
    return SolvabilityReport(
        stabilizable=stab,
        io_count_ok=count_ok,
        zero_condition_ok=(rank0 == n + p),
        detail={"origin_rank": rank0, "required": n + p},
    )


def servo_solvable(A, B, D, ref_poly: Poly, tol: float = 1e-6) -> SolvabilityReport:
    """Internal-model tracking: stabilizable pair, enough inputs, and the
    transmission zeros of (A, B, D) clear of the reference roots."""
    from .tfm import transfer_matrix, tz_minors, tz_smith_mcmillan

    A, B, D = qmat.qmat(A), qmat.qmat(B), qmat.qmat(D)
    plant = StateSpace(A, B, D)
    stab = plant.is_stabilizable()
    count_ok = len(D) <= qmat.shape(B)[1]
    G = transfer_matrix(plant)
    try:
        _z, rs = tz_minors(G)
    except StructuralError:
        _z, rs = tz_smith_mcmillan(G)
    zero_vals = rs.expanded()
    ref_roots = roots(ref_poly).expanded() if ref_poly.degree >= 1 else []
    clash = any(
        abs(z - w) <= tol * (1 + abs(z)) for z in zero_vals for w in ref_roots
    )
    return SolvabilityReport(
        stabilizable=stab,
        io_count_ok=count_ok,
        zero_condition_ok=not clash,
        detail={
            "transmission_zeros": zero_vals,
            "reference_roots": ref_roots,
        },
    )


def internal_model_blocks(ref_poly: Poly, d: int):
    """Block-diagonal internal model: d copies of the companion matrix of the
    reference polynomial, each driven through the last unit vector."""
    beta = ref_poly.degree
    mono = ref_poly.monic()
    Fi = [[Fraction(0)] * beta for _ in range(beta)]
    for i in range(beta - 1):
        Fi[i][i + 1] = Fraction(1)
    for j in range(beta):
        Fi[beta - 1][j] = -mono.coeffs[j]
    gamma_i = [[Fraction(0)] for _ in range(beta)]
    gamma_i[beta - 1][0] = Fraction(1)
    F = qmat.zeros(d * beta, d * beta)
    F = [list(row) for row in F]
    G = [[Fraction(0)] * d for _ in range(d * beta)]
    for k in range(d):
        for i in range(beta):
            for j in range(beta):
                F[k * beta + i][k * beta + j] = Fi[i][j]
            G[k * beta + i][k] = gamma_i[i][0]
    return qmat.qmat(F), qmat.qmat(G)


@dataclass(frozen=True)
class RegulatorRealization:
    """Synthesized tracking regulator.

    ``K1`` acts on the plant state (or its estimate), ``K2`` on the regulator
    state.  Observer problems carry the estimator gain ``L`` and the
    augmented observer matrices.  ``closed_loop`` is the error dynamics used
    for verification and simulation.
    """

    kind: str
    K1: qmat.QMatrix
    K2: qmat.QMatrix
    plant: StateSpace
    closed_loop: qmat.QMatrix
    F: qmat.QMatrix | None = None
    Gamma: qmat.QMatrix | None = None
    L: qmat.QMatrix | None = None
    observer_A: qmat.QMatrix | None = None
    observer_B: qmat.QMatrix | None = None
    observer_C: qmat.QMatrix | None = None
    extras: dict = field(default_factory=dict)


def synthesize_pi_regulator(
    A, B, D, poles, observer=None, observer_poles=None
) -> RegulatorRealization:
    """PI regulator u = K1 x + K2 q, q' = z - z_ref, with exact placement.

    ``observer`` is an optional (E, H, F) triple; the full-order estimator of
    [x; w] is then placed at ``observer_poles``.
    """
    A, B, D = qmat.qmat(A), qmat.qmat(B), qmat.qmat(D)
    rep = pi_solvable(A, B, D)
    if not rep.solvable:
        raise InfeasibleError(f"PI problem not solvable: {rep}")
    n, d = len(A), len(D)
    r = qmat.shape(B)[1]
    At = qmat.vstack(
        qmat.hstack(A, qmat.zeros(n, d)),
        qmat.hstack(D, qmat.zeros(d, d)),
    )
    Bt = qmat.vstack(B, qmat.zeros(d, r))
    phi = poly_from_poles(poles)
    K = place_poles(At, Bt, phi)
    K1 = qmat.submatrix(K, range(r), range(n))
    K2 = qmat.submatrix(K, range(r), range(n, n + d))
    closed = qmat.add(At, qmat.matmul(Bt, K))
    kwargs = {}
    if observer is not None:
        E, H, Fo = (qmat.qmat(m) for m in observer)
        rep_o = pi_observer_solvable(A, E, H, Fo)
        if not rep_o.solvable:
            raise InfeasibleError(f"observer side not solvable: {rep_o}")
        p = qmat.shape(E)[1]
        Abar = qmat.vstack(
            qmat.hstack(A, E),
            qmat.zeros(p, n + p),
        )
        Hbar = qmat.hstack(H, Fo)
        phi_o = poly_from_poles(observer_poles)
        Lt = place_poles(
            qmat.transpose(Abar), qmat.transpose(Hbar), phi_o
        )
        L = qmat.neg(qmat.transpose(Lt))  # observer gain: Abar - L Hbar stable
        kwargs = dict(
            L=L,
            observer_A=Abar,
            observer_B=qmat.vstack(B, qmat.zeros(p, r)),
            observer_C=Hbar,
        )
    return RegulatorRealization(
        kind="pi",
        K1=K1,
        K2=K2,
        plant=StateSpace(A, B, D),
        closed_loop=closed,
        **kwargs,
    )


def synthesize_servo_regulator(A, B, D, ref_poly: Poly, poles) -> RegulatorRealization:
    """Internal-model servo regulator q' = F q + Gamma (z - z_ref),
    u = K1 x + K2 q, placed exactly at the given closed-loop poles."""
    A, B, D = qmat.qmat(A), qmat.qmat(B), qmat.qmat(D)
    rep = servo_solvable(A, B, D, ref_poly)
    if not rep.solvable:
        raise InfeasibleError(f"servo problem not established: {rep.verdict}")
    n, d = len(A), len(D)
    r = qmat.shape(B)[1]
    F, Gamma = internal_model_blocks(ref_poly, d)
    m = len(F)
    At = qmat.vstack(
        qmat.hstack(A, qmat.zeros(n, m)),
        qmat.hstack(qmat.matmul(Gamma, D), F),
    )
    Bt = qmat.vstack(B, qmat.zeros(m, r))
    phi = poly_from_poles(poles)
    K = place_poles(At, Bt, phi)
    K1 = qmat.submatrix(K, range(r), range(n))
    K2 = qmat.submatrix(K, range(r), range(n, n + m))
    closed = qmat.add(At, qmat.matmul(Bt, K))
    return RegulatorRealization(
        kind="servo",
        K1=K1,
        K2=K2,
        plant=StateSpace(A, B, D),
        closed_loop=closed,
        F=F,
        Gamma=Gamma,
    )


def synthesize_polynomial_tracker(A, B, D, eta: int, poles) -> RegulatorRealization:
    """Chain-of-integrators tracker for polynomial references of degree
    eta - 1; reduces to the PI design for eta = 1."""
    A, B, D = qmat.qmat(A), qmat.qmat(B), qmat.qmat(D)
    rep = pi_solvable(A, B, D)
    if not rep.solvable:
        raise InfeasibleError(f"tracking problem not solvable: {rep}")
    n, d = len(A), len(D)
    r = qmat.shape(B)[1]
    m = d * eta
    At = [[Fraction(0)] * (n + m) for _ in range(n + m)]
    for i in range(n):
        for j in range(n):
            At[i][j] = A[i][j]
    for i in range(d):
        for j in range(n):
            At[n + i][j] = D[i][j]
    for k in range(1, eta):
        for i in range(d):
            At[n + k * d + i][n + (k - 1) * d + i] = Fraction(1)
    Bt = qmat.vstack(B, qmat.zeros(m, r))
    phi = poly_from_poles(poles)
    K = place_poles(qmat.qmat(At), Bt, phi)
    K1 = qmat.submatrix(K, range(r), range(n))
    K2 = qmat.submatrix(K, range(r), range(n, n + m))
    closed = qmat.add(qmat.qmat(At), qmat.matmul(Bt, K))
    return RegulatorRealization(
        kind="polynomial",
        K1=K1,
        K2=K2,
        plant=StateSpace(A, B, D),
        closed_loop=closed,
        extras={"eta": eta},
    )


# ---------------------------------------------------------------------------
# maximal accuracy classification


@dataclass(frozen=True)
class AccuracyClassification:
    kind: str  # "unlimited" | "limited"
    reason: str
    riccati_trend: list = field(default_factory=list)

    @property
    def unlimited(self) -> bool:
        return self.kind == "unlimited"


def _lyap_solve(Acl: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Solve Acl' P + P Acl + Q = 0 by the Kronecker linear system."""
    n = Acl.shape[0]
    M = np.kron(np.eye(n), Acl.T) + np.kron(Acl.T, np.eye(n))
    vec = np.linalg.solve(M, -Q.reshape(-1, order="F"))
    P = vec.reshape((n, n), order="F")
    return (P + P.T) / 2


def care_kleinman(A, B, Q, R, K0=None, tol=1e-10, max_iter=200) -> np.ndarray:
    """Stabilizing solution of A'P + PA - P B R^-1 B' P + Q = 0 by
    Newton-Kleinman iteration from a stabilizing gain."""
    A = np.array(A, dtype=float)
    B = np.array(B, dtype=float)
    Q = np.array(Q, dtype=float)
    R = np.array(R, dtype=float)
    n = A.shape[0]
    if K0 is None:
        K0 = _stabilizing_gain(A, B)
    K = np.array(K0, dtype=float)
    P = None
    for _ in range(max_iter):
        Acl = A - B @ K
        if np.max(np.linalg.eigvals(Acl).real) >= 0:
            raise ConvergenceError("iteration left the stabilizing set")
        Pn = _lyap_solve(Acl, Q + K.T @ R @ K)
        Kn = np.linalg.solve(R, B.T @ Pn)
        if P is not None and np.max(np.abs(Pn - P)) <= tol * (1 + np.max(np.abs(Pn))):
            return Pn
        P, K = Pn, Kn
    raise ConvergenceError("Riccati iteration did not converge", final_cost=None)


def _stabilizing_gain(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Any gain K with A - B K stable, from the exact placement routine."""
    n = A.shape[0]
    Aq = qmat.from_float_exact(A)
    Bq = qmat.from_float_exact(B)
    phi = poly_from_poles([-(i + 1) for i in range(n)])
    K = place_poles(Aq, qmat.neg(Bq), phi)
    return qmat.to_float(K)


def max_accuracy_class(
    sys: StateSpace, rho_schedule=(1.0, 1e-2, 1e-4), corroborate=True,
    final_rho=1e-6,
) -> AccuracyClassification:
    """Cheap-control accuracy class of a controllable, observable plant.

    More outputs than inputs is always limited; otherwise the class is
    decided by the half-plane of the transmission zeros.  Optionally
    corroborated by the steady Riccati solution trend as the control weight
    vanishes.
    """
    from .tfm import transfer_matrix, tz_minors, tz_smith_mcmillan

    if not (sys.is_controllable() and sys.is_observable()):
        raise StructuralError("accuracy classification needs a minimal model")
    if sys.l > sys.r:
        kind, reason = "limited", "more regulated outputs than inputs"
        zero_based = False
    else:
        G = transfer_matrix(sys)
        try:
            _z, rs = tz_minors(G)
        except StructuralError:
            _z, rs = tz_smith_mcmillan(G)
        bad = [z for z in rs.expanded() if z.real >= -1e-12]
        if bad:
            kind = "limited"
            reason = f"transmission zeros with nonnegative real part: {bad}"
        else:
            kind, reason = "unlimited", "all transmission zeros strictly stable"
        zero_based = True
    trend = []
    if corroborate:
        A = qmat.to_float(sys.A)
        B = qmat.to_float(sys.B)
        Q = qmat.to_float(sys.C).T @ qmat.to_float(sys.C)
        K = None
        try:
            for rho in list(rho_schedule) + [final_rho]:
                R = rho * np.eye(sys.r)
                P = care_kleinman(A, B, Q, R, K0=K)
                K = np.linalg.solve(R, B.T @ P)
                trend.append((rho, P))
        except ConvergenceError:
            trend = trend or []
    return AccuracyClassification(kind=kind, reason=reason, riccati_trend=trend)
