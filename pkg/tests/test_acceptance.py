"""Acceptance suite.

Every numbered check prints one PASS/FAIL line (run with ``pytest -s``).
Desk scale throughout: fixtures have n <= 6 and each criterion finishes in
seconds.  Three sub-checks (10c, 11b, 12c) assert reference values that are
inconsistent with their own stated inputs; the analysis lives in the
project notes, and the checks are kept faithful rather than loosened.
"""
import json
import random
from fractions import Fraction

import numpy as np
import pytest

from zerolab import qmat
from zerolab.canon import to_yokoyama
from zerolab.design import (
    AssignmentProblem,
    ConvergenceError,
    assign_analytical,
    assign_gradient,
    assign_squaring_down,
    gradient_check,
    max_accuracy_class,
    pi_observer_solvable,
    pi_solvable,
    servo_solvable,
    synthesize_pi_regulator,
    synthesize_polynomial_tracker,
    synthesize_servo_regulator,
)
from zerolab.polymat import PolyMatrix, RatMatrix, smith_form, smith_mcmillan
from zerolab.ratpoly import Poly, RatFn, cluster_match, roots
from zerolab.sim import (
    blocking_scenario,
    rk4_order_ratio,
    simulate_blocking,
    simulate_tracking,
)
from zerolab.statespace import StateSpace
from zerolab.tfm import (
    factorization_product,
    factorize,
    transfer_matrix,
    tz_minors,
)
from zerolab.zeros import (
    system_zeros,
    invariant_zeros,
    decoupling_zeros,
    zero_count_bound,
    zero_poly_matrix_polynomial,
    zero_report,
    zeros_interpolation,
    zeros_pencil,
    reduced_pencil,
    DegenerateSystemError,
)

s = Poly.x()


def _line(tag: str, ok: bool, detail: str = ""):
    suffix = f" - {detail}" if detail else ""
    print(f"ACCEPTANCE {tag}: {'PASS' if ok else 'FAIL'}{suffix}")
    return ok


# -- 1: Smith form ------------------------------------------------------------


def test_criterion_01_smith_form():
    P = PolyMatrix([[s, Poly(), Poly()], [Poly(), s, s + 1], [s, s - 1, Poly()]])
    dec = smith_form(P)
    ok = [dec.S[i, i] for i in range(3)] == [
        Poly([1]),
        Poly([1]),
        s * (s * s - 1),
    ]
    ok = ok and (dec.U_L * P * dec.U_R == dec.S)
    assert _line("01", ok, "Smith diagonal and exact reconstruction")
    assert ok


# -- 2: Smith-McMillan ---------------------------------------------------------


def tall_rational_fixture():
    p1 = s * (s + 1) ** 2
    return RatMatrix(
        [
            [RatFn(Poly([1]), p1), RatFn(Poly([-1, 2, 1]), p1), RatFn(s + 2, s + 1)],
            [RatFn(Poly()), RatFn(s + 2, (s + 1) ** 2), RatFn(Poly())],
            [RatFn(Poly()), RatFn(Poly()), RatFn(3 * (s + 2), s + 1)],
            [RatFn(s + 3, p1), RatFn(Poly([-3, 3, 2]), p1), RatFn(s + 2, s + 1)],
        ]
    )


def test_criterion_02_smith_mcmillan():
    dec = smith_mcmillan(tall_rational_fixture())
    ok = dec.eps == (Poly([1]), (s + 2).monic(), (s + 2).monic()) and dec.psi == (
        (s * (s + 1) ** 2).monic(),
        ((s + 1) ** 2).monic(),
        (s + 1).monic(),
    )
    assert _line("02", ok, "diagonal 1/(s(s+1)^2), (s+2)/(s+1)^2, (s+2)/(s+1)")


# -- 3: minors method ------------------------------------------------------------


def test_criterion_03_transmission_minors():
    z, _ = tz_minors(tall_rational_fixture())
    ok = z == (s + 2) ** 2
    assert _line("03", ok, "z(s) = (s+2)^2 exactly")


# -- 4: factorization --------------------------------------------------------------


def test_criterion_04_factorization():
    sysd = StateSpace(
        [[2, 1, 0, 1], [1, 0, 1, 1], [1, 1, 0, 0], [0, 0, 1, 0]],
        [[1, 0], [0, 0], [0, 0], [0, 1]],
        [[1, 0, 0, 0], [0, 1, 1, 0]],
    )
    f = factorize(sysd)
    ok = f.Cpoly.entries == ((s - 1, Poly([-1])), (Poly([2]), Poly([1])))
    ok = ok and f.A2.entries == (
        (s * s - 3 * s + 1, -2 * s),
        (Poly([-1]), s * s + s),
    )
    ok = ok and factorization_product(f).entries == transfer_matrix(sysd).entries
    from zerolab.polymat import determinant

    ok = ok and determinant(f.Cpoly) == s + 1
    assert _line("04", ok, "C(s), A2(s), product identity, det C = s + 1")


# -- 5: taxonomy --------------------------------------------------------------------


def test_criterion_05_taxonomy():
    sysd = StateSpace(
        [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -5, 0], [0, 0, 0, 7]],
        [[0], [-1], [-1], [-1]],
        [[1, 0, 2, 1], [0, 0, 2, 1]],
    )
    rep = zero_report(sysd)
    ok = cluster_match(rep.system_zeros, [1, -1, 3])
    ok = ok and cluster_match(rep.transmission_zeros, [3])
    ok = ok and cluster_match(rep.input_decoupling, [1])
    ok = ok and cluster_match(rep.output_decoupling, [-1])
    # invariant set from the defining maximal minors of the system matrix:
    # gcd((s-1)(s+1)(s-3), s(s+1)(s-3)-type minors) = (s+1)(s-3)
    ok = ok and rep.invariant_poly == ((s + 1) * (s - 3)).monic()
    ok = ok and cluster_match(rep.invariant_zeros, [-1, 3])
    ok = ok and rep.inclusions_hold() and rep.identity_holds()
    assert _line(
        "05",
        ok,
        "five sets with invariant = {-1, 3} from the defining minors; "
        "inclusions and multiset identity hold",
    )


# -- 6: matrix polynomial and reduced pencils ------------------------------------------


def test_criterion_06_matrix_polynomial_and_pencils():
    A = [[2, 1, 0, 0], [0, 1, 0, 1], [0, 2, 0, 0], [1, 1, 0, 0]]
    B = [[1, 0], [0, 0], [0, 0], [0, 1]]
    s71 = StateSpace(A, B, [[1, -1, 1, 0], [1, 1, 0, 1]])
    s72 = StateSpace(
        [[2, 1, 0, 1], [1, 0, 1, 1], [1, 1, 0, 0], [0, 0, 1, 0]],
        [[0, 0], [1, 0], [0, 1], [0, 0]],
        [[1, 1, 0, 0], [0, 0, 1, 1]],
    )
    s73 = StateSpace(A, B, [[1, 0, 0, 0], [0, 0, 1, 1]])
    s74 = StateSpace(A, B, [[1, -1, 1, 0], [1, 0, 0, 0]])
    ok = zero_poly_matrix_polynomial(s71) == s * s + s - 2
    ok = ok and zero_poly_matrix_polynomial(s72) == s * s - 1
    ok = ok and reduced_pencil(s73)[1] == s * s - s + 2
    ok = ok and reduced_pencil(s74)[1] == (s - 2).monic()
    assert _line("06", ok, "s^2+s-2, s^2-1, s^2-s+2, s-2, all exact")


# -- 7: cross-method agreement ------------------------------------------------------


def _random_minimal_square(rng, n_max=6, r_max=2):
    while True:
        n = rng.randint(2, n_max)
        r = rng.randint(1, min(r_max, n - 1) if n > 1 else 1)
        A = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        B = [[rng.randint(-2, 2) for _ in range(r)] for _ in range(n)]
        C = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(r)]
        sysd = StateSpace(A, B, C)
        if qmat.rank(sysd.B) != r or qmat.rank(sysd.C) != r:
            continue
        if not (sysd.is_controllable() and sysd.is_observable()):
            continue
        return sysd


def test_criterion_07_cross_method_agreement():
    rng = random.Random(2024)
    count = 0
    ok = True
    while count < 50:
        sysd = _random_minimal_square(rng)
        try:
            psi_minors, rs = system_zeros(sysd)
            psi_pencil, roots_pencil = zeros_pencil(sysd)
            psi_mp = zero_poly_matrix_polynomial(sysd)
            psi_int = zeros_interpolation(sysd)
        except DegenerateSystemError:
            continue
        count += 1
        same_poly = psi_minors == psi_pencil == psi_mp == psi_int
        ok = ok and same_poly
        if psi_minors.degree >= 1:
            ok = ok and cluster_match(
                rs.expanded(), roots(psi_int).expanded(), 1e-6
            )
    assert _line("07", ok, "50 random minimal square systems, 4 methods")


# -- 8: invariance suite --------------------------------------------------------------


def _rand_nonsingular(rng, n):
    while True:
        N = qmat.qmat([[rng.randint(-3, 3) for _ in range(n)] for _ in range(n)])
        if qmat.rank(N) == n:
            return N


def test_criterion_08_invariance_suite():
    rng = random.Random(4096)
    bases = [
        StateSpace(
            [[2, 1, 0, 1], [1, 0, 1, 1], [1, 1, 0, 0], [0, 0, 1, 0]],
            [[1, 0], [0, 0], [0, 0], [0, 1]],
            [[1, 0, 0, 0], [0, 1, 1, 0]],
        ),
        StateSpace(
            [[1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -5, 0], [0, 0, 0, 7]],
            [[0], [-1], [-1], [-1]],
            [[1, 0, 2, 1], [0, 0, 2, 1]],
        ),
        StateSpace(
            [[1, 0, 0], [0, -1, 0], [0, 0, -3]],
            [[0], [-1], [-1]],
            [[1, -1, 0], [0, 2, 0]],
        ),
        StateSpace(
            [[2, 1, 0, 0], [0, 1, 0, 1], [0, 2, 0, 0], [1, 1, 0, 0]],
            [[1, 0], [0, 0], [0, 0], [0, 1]],
            [[1, -1, 1, 0], [1, 0, 0, 0]],
        ),
        StateSpace([[2, 0], [1, 1]], [[1], [0]], [[1, 1]]),
    ]
    transforms = 0
    ok = True
    for sysd in bases:
        psi, _ = system_zeros(sysd)
        n, r, l = sysd.n, sysd.r, sysd.l
        for _ in range(5):
            N = _rand_nonsingular(rng, n)
            ok = ok and system_zeros(sysd.transformed(N))[0] == psi
            M = _rand_nonsingular(rng, r)
            ok = ok and system_zeros(
                StateSpace(sysd.A, qmat.matmul(sysd.B, M), sysd.C)
            )[0] == psi
            T = _rand_nonsingular(rng, l)
            ok = ok and system_zeros(
                StateSpace(sysd.A, sysd.B, qmat.matmul(T, sysd.C))
            )[0] == psi
            K = qmat.qmat(
                [[rng.randint(-3, 3) for _ in range(n)] for _ in range(r)]
            )
            ok = ok and system_zeros(
                StateSpace(qmat.add(sysd.A, qmat.matmul(sysd.B, K)), sysd.B, sysd.C)
            )[0] == psi
            transforms += 4
    # cascade fixture with the squared-down head link
    cascade = StateSpace(
        [[1, 0, 0, 0], [0, 2, 0, 0], [1, 1, 2, 0], [0, 0, 1, 1]],
        [[1], [1], [0], [0]],
        [[0, 0, 1, 2]],
    )
    _, rs = system_zeros(cascade)
    ok = ok and cluster_match(rs.expanded(), [1.5, -1])
    # dynamic output feedback fixture: plant zero plus regulator pole
    closed = StateSpace(
        [[-2, -1, -1], [1, 2, 0], [1, 1, 2]], [[1], [0], [0]], [[1, 1, 0]]
    )
    _, rs2 = system_zeros(closed)
    ok = ok and cluster_match(rs2.expanded(), [2, 1])
    assert transforms >= 100
    assert _line("08", ok, f"{transforms} transforms plus the two fixtures")


# -- 9: blocking -----------------------------------------------------------------------


def test_criterion_09_blocking():
    ok = True
    fixtures = [
        (
            StateSpace(
                [[0, 1, 0], [0, 0, 1], [-6, -11, -6]],
                [[-1, 0], [0, 0], [0, -1]],
                [[0, -1, 1], [-1, -1, 0]],
            ),
            1.0,
        ),
        (StateSpace([[2, 0], [1, 1]], [[1], [0]], [[1, 1]]), 0.0),
        (
            StateSpace(
                [[1, 4, 0], [0, -1, 0], [0, 2, -3]],
                [[0], [-1], [-1]],
                [[-1, -1, 0]],
            ),
            -3.0,
        ),
    ]
    for sysd, zero in fixtures:
        sc = blocking_scenario(sysd, zero)
        traj = simulate_blocking(sysd, sc, horizon=5.0, step=1e-3)
        ok = ok and traj.max_output_norm() <= 1e-6 * (1 + np.linalg.norm(sc.u0))
    rng = random.Random(555)
    done = 0
    while done < 20:
        n, r = rng.randint(2, 4), rng.randint(1, 2)
        A = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        B = [[rng.randint(-2, 2) for _ in range(r)] for _ in range(n)]
        sysd = StateSpace(A, B, qmat.eye(n))
        if not sysd.is_controllable() or qmat.rank(sysd.B) != r or n == r:
            continue
        targets = []
        t = rng.choice([-3, -2, -1, Fraction(1, 2), 1, 2])
        while len(targets) < n - r:
            if sysd.char_poly()(Fraction(t)) != 0 and t not in targets:
                targets.append(Fraction(t))
            t = t - 1
        try:
            C = assign_analytical(sysd, targets)
        except Exception:
            continue
        plant = StateSpace(A, B, C)
        done += 1
        for zero in targets:
            sc = blocking_scenario(plant, float(zero))
            traj = simulate_blocking(plant, sc, horizon=5.0, step=1e-3)
            bound = 1e-6 * (1 + np.linalg.norm(sc.u0))
            ok = ok and traj.max_output_norm() <= bound
    assert _line("09", ok, "3 fixtures + 20 random systems, max|y| <= 1e-6*(1+|u0|)")


# -- 10: assignment ---------------------------------------------------------------------


A_STAIR = [[2, 1, 0, 0], [0, 1, 0, 1], [0, 2, 0, 0], [1, 1, 0, 0]]
A91 = [["-2", "0.9374", "-2.062"], ["2", "-0.4375", "2.562"], ["-1", "-1.563", "-1.562"]]
B91 = [["1", "0"], ["-1", "1"], ["1", "1"]]
A92 = [
    ["14.39", "-62.43", "-30.81", "10.33"],
    ["3.752", "-19.39", "-10.0", "2.997"],
    ["1", "1", "1", "0"],
    ["-0.867", "-1.267", "-1.8", "-0.6"],
]
B92 = [["3", "-1"], ["1", "0"], ["0", "0"], ["0", "-1"]]


def test_criterion_10a_analytic_assignments():
    from zerolab.polymat import determinant
    from zerolab.zeros import system_matrix

    ok = True
    for B in ([[1, 0], [0, 0], [0, 1], [0, 1]], [[1, 0], [0, 0], [0, 0], [0, 1]]):
        sysd = StateSpace(A_STAIR, B, [[1, 0, 0, 0], [0, 1, 0, 0]])
        C = assign_analytical(sysd, [-1, -2])
        det = determinant(system_matrix(StateSpace(A_STAIR, B, C)).P)
        ok = ok and det.monic() == s * s + 3 * s + 2
    assert _line("10a", ok, "both branches give det P(s) ~ s^2 + 3s + 2 exactly")


def test_criterion_10b_gradient_first_fixture():
    sysd = StateSpace(A91, B91, [["1", "0", "0"], ["1", "1", "0"]])
    res = assign_gradient(
        AssignmentProblem(sys=sysd, targets=["-1"], q=0.25, eps=1e-3)
    )
    err = abs(complex(res.achieved[0]) - (-1))
    ok = err <= 2e-3
    assert _line("10b", ok, f"achieved zero off by {err:.2e}")


def test_criterion_10c_gradient_structural_fixture():
    sysd = StateSpace(A92, B92, [["1", "1", "0", "0"], ["1", "0", "0", "0"]])
    try:
        res = assign_gradient(
            AssignmentProblem(
                sys=sysd, targets=["-1", "-2"], measured=3, q=0.5,
                eps=1e-3, max_iter=120000,
            )
        )
        errs = []
        for t in (-1.0, -2.0):
            errs.append(min(abs(complex(z) - t) for z in res.achieved))
        worst = max(errs)
    except ConvergenceError:
        worst = float("inf")
    ok = worst <= 2e-3
    _line("10c", ok, f"worst target miss {worst:.2e} (structural fixture)")
    assert ok, (
        "structural fixture cannot reach the published targets: the model "
        "data pin an immovable zero near -1.939 (see decisions ledger)"
    )


def test_criterion_10d_squaring_down_fixture():
    s95 = StateSpace(A91, B91, [["1", "0", "0"], ["1", "1", "0"], ["0", "0", "1"]])
    res = assign_squaring_down(
        s95, ["-1"], q=0.25, D0=[[1, 0, 0], [0, 1, 0]], eps=1e-3
    )
    err = abs(complex(res.achieved[0]) - (-1))
    ok = err <= 2e-3
    assert _line("10d", ok, f"squared-down zero off by {err:.2e}")


def test_criterion_10e_analytic_gradient_consistency():
    rng = random.Random(321)
    ok = True
    done = 0
    while done < 10:
        n, r = rng.randint(3, 4), 2
        A = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        B = [[rng.randint(-2, 2) for _ in range(r)] for _ in range(n)]
        sysd = StateSpace(A, B, qmat.eye(n))
        if not sysd.is_controllable() or qmat.rank(sysd.B) != r:
            continue
        targets = []
        t = -1
        while len(targets) < n - r:
            if sysd.char_poly()(t) != 0:
                targets.append(t)
            t -= 1
        C_exact = assign_analytical(sysd, targets)
        exact_zeros = [complex(t) for t in targets]
        start = StateSpace(
            A, B,
            qmat.add(
                C_exact,
                qmat.qmat([[rng.choice([0, 1]) for _ in range(n)] for _ in range(r)]),
            ),
        )
        done += 1
        try:
            res = assign_gradient(
                AssignmentProblem(
                    sys=start, targets=targets, q=1e-8, alpha=0.1,
                    eps=1e-10, max_iter=250000,
                )
            )
        except ConvergenceError:
            ok = False
            continue
        ok = ok and cluster_match(res.achieved, exact_zeros, 1e-4)
    assert _line("10e", ok, "10 random problems, same zero multiset to 1e-4")


def test_criterion_10f_gradient_finite_difference():
    sys91 = StateSpace(A91, B91, [["1", "0", "0"], ["1", "1", "0"]])
    rel1, _, _ = gradient_check(sys91, [[1, 0, 0], [1, 1, 0]], [-1], q=0.25)
    sys92 = StateSpace(A92, B92, [["1", "1", "0", "0"], ["1", "0", "0", "0"]])
    rel2, _, _ = gradient_check(
        sys92, [[1, 1, 0, 0], [1, 0, 0, 0]], [-1, -2], q=0.5
    )
    rel3, _, _ = gradient_check(
        sys91, [[1.0, 0.2, -0.4], [0.3, 1.0, 0.5]], [-1], q=0.25,
        use_observability_weight=False,
    )
    worst = max(rel1, rel2, rel3)
    ok = worst <= 1e-4
    assert _line("10f", ok, f"worst relative gradient error {worst:.2e}")


# -- 11: servo -----------------------------------------------------------------------


ANTENNA = dict(
    A=[["0", "1"], ["0", "-4.6"]],
    B=[["0"], ["0.787"]],
    D=[["1", "1"]],
    E=[["0"], ["0.1"]],
    H=[["1", "0"]],
    F=[["0"]],
)


def _antenna_regulator():
    return synthesize_pi_regulator(
        ANTENNA["A"], ANTENNA["B"], ANTENNA["D"],
        poles=["-0.5", "-1", "-1.5"],
        observer=(ANTENNA["E"], ANTENNA["H"], ANTENNA["F"]),
        observer_poles=[("-1", "1"), ("-1", "-1"), "-2"],
    )


def test_criterion_11a_observer_gain():
    reg = _antenna_regulator()
    L = qmat.to_float(reg.L).ravel()
    err = np.max(np.abs(L - np.array([-0.6, 8.76, 40.0])))
    ok = err <= 1e-2
    assert _line("11a", ok, f"L^T off by {err:.2e}")


def test_criterion_11b_state_gains():
    reg = _antenna_regulator()
    k = np.concatenate(
        [qmat.to_float(reg.K1).ravel(), qmat.to_float(reg.K2).ravel()]
    )
    published = np.array([-1.906, 2.033, -1.080])
    err = np.max(np.abs(k - published))
    ok = err <= 1e-2
    _line("11b", ok, f"gain triple off by {err:.2e} (published reference)")
    assert ok, (
        "the unique placement gains for poles (-0.5, -1, -1.5) are "
        f"{np.round(k, 4)}; the published triple is inconsistent with those "
        "poles (see decisions ledger)"
    )


def test_criterion_11c_servo_gains():
    reg = synthesize_servo_regulator(
        [[1, 0], [2, 1]], [[1], [1]], [[0, 1]], Poly(["-2", "1"]),
        poles=["-2.148", ("-1.926", "0.127"), ("-1.926", "-0.127")],
    )
    k = np.concatenate(
        [qmat.to_float(reg.K1).ravel(), qmat.to_float(reg.K2).ravel()]
    )
    err = np.max(np.abs(k - np.array([-2.167, -7.833, -21.333])))
    ok = err <= 1e-2
    assert _line("11c", ok, f"servo gains off by {err:.2e}")


def test_criterion_11d_tracking_error():
    ok = True
    reg = _antenna_regulator()
    z_ref = lambda t: [1.0] if t <= 40 else [3.0]
    traj, steady = simulate_tracking(
        reg, z_ref, disturbance=lambda t: [10.0], E=ANTENNA["E"],
        horizon=80.0, step=1e-3, x0=[1.0, 1.0],
    )
    before = float(np.linalg.norm(traj.outputs[int(39.9 / 1e-3)]))
    ok = ok and before < 1e-3 and steady < 1e-3
    servo = synthesize_servo_regulator(
        [[1, 0], [2, 1]], [[1], [1]], [[0, 1]], Poly(["-2", "1"]),
        poles=["-2", "-2", "-2"],
    )
    traj2, steady2 = simulate_tracking(
        servo, lambda t: [np.exp(2 * t)], horizon=10.0, step=1e-3, x0=[0.4, -0.2]
    )
    ok = ok and steady2 / np.exp(20.0) < 1e-3
    ramp = synthesize_polynomial_tracker(
        [[0, 1], [-6, 5]], [[1, 1], [0, 2]], [[1, 0], [-1, 1]], eta=2,
        poles=[-1, -2, -3, -4, ("-1", "1"), ("-1", "-1")],
    )
    traj3, steady3 = simulate_tracking(
        ramp, lambda t: [2.0 * t, t], horizon=30.0, step=1e-3
    )
    ok = ok and steady3 < 1e-3
    assert _line("11d", ok, "step+disturbance, exponential, and ramp tracking")


# -- 12: maximal accuracy ---------------------------------------------------------------


def test_criterion_12a_limited_with_riccati_floor():
    sysd = StateSpace(ANTENNA["A"], ANTENNA["B"], [["1", "-1"]])
    cls = max_accuracy_class(sysd)
    rho, P = cls.riccati_trend[-1]
    ok = cls.kind == "limited" and rho == 1e-6 and abs(P[0, 0] - 2.0) <= 5e-2
    assert _line("12a", ok, f"limited, p11({rho:g}) = {P[0, 0]:.4f}")


def test_criterion_12b_unlimited_classification():
    sysd = StateSpace(ANTENNA["A"], ANTENNA["B"], [["1", "1"]])
    cls = max_accuracy_class(sysd)
    ok = cls.kind == "unlimited"
    assert _line("12b", ok, "sign-flipped output is minimum phase")


def test_criterion_12c_unlimited_riccati_norm():
    sysd = StateSpace(ANTENNA["A"], ANTENNA["B"], [["1", "1"]])
    cls = max_accuracy_class(sysd)
    rho, P = cls.riccati_trend[-1]
    norm = float(np.max(np.abs(P)))
    ok = rho == 1e-6 and norm < 1e-3
    _line("12c", ok, f"|P|({rho:g}) = {norm:.3e} against the 1e-3 bound")
    assert ok, (
        f"the steady solution scales like sqrt(rho)/b = {1e-3 / 0.787:.3e} "
        "at rho = 1e-6, above the stated bound (see decisions ledger)"
    )


# -- 13: zero-count bounds ----------------------------------------------------------------


def test_criterion_13_zero_count_bounds():
    rng = random.Random(777)
    ok = True
    done = 0
    while done < 100:
        n = rng.randint(2, 5)
        r = rng.randint(1, 2)
        l = rng.choice([r, r, min(r + 1, n)])
        A = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        B = [[rng.randint(-2, 2) for _ in range(r)] for _ in range(n)]
        C = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(l)]
        sysd = StateSpace(A, B, C)
        if not sysd.is_controllable() or qmat.rank(sysd.B) != r:
            continue
        try:
            bound = zero_count_bound(sysd)
        except Exception:
            continue
        if bound.kind == "degenerate":
            continue
        try:
            psi, _ = system_zeros(sysd)
        except DegenerateSystemError:
            continue
        done += 1
        ok = ok and psi.degree <= bound.value
        CB = qmat.matmul(sysd.C, sysd.B)
        if r == l and qmat.rank(CB) == r:
            ok = ok and psi.degree == n - r and bound.kind == "exact"
    assert _line("13", ok, "100 random systems within bound, tight when CB regular")


# -- 14: integrator order and CLI determinism ----------------------------------------------


def test_criterion_14_rk4_and_determinism(tmp_path):
    ratio = rk4_order_ratio()
    ok = 12 <= ratio <= 20
    from zerolab.cli import main

    model = tmp_path / "model.json"
    model.write_text(
        json.dumps(
            {
                "A": [["2", "1", "0", "1"], ["1", "0", "1", "1"],
                      ["1", "1", "0", "0"], ["0", "0", "1", "0"]],
                "B": [["0", "0"], ["1", "0"], ["0", "1"], ["0", "0"]],
                "C": [["1", "1", "0", "0"], ["0", "0", "1", "1"]],
            }
        )
    )
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    main(["zeros", str(model), "--seed", "3", "--out", str(out1)])
    main(["zeros", str(model), "--seed", "3", "--out", str(out2)])
    ok = ok and out1.read_bytes() == out2.read_bytes()
    assert _line("14", ok, f"halving ratio {ratio:.2f}; identical reports")
