"""Desk-scale linear simulation: fixed-step 4th order integration for
zero-blocking experiments and closed-loop tracking runs."""
from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import qmat
from .design import RegulatorRealization
from .ratpoly import DomainError
from .statespace import StateSpace, StructuralError

#: cap on the blocking input magnitude; the horizon is shortened when the
#: exponential would exceed it
INPUT_CAP = 1e6


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (len(times), n)
    outputs: np.ndarray  # (len(times), l)

    def max_output_norm(self) -> float:
        if self.outputs.size == 0:
            return 0.0
        return float(np.max(np.linalg.norm(self.outputs, axis=1)))

    def to_csv(self, path) -> None:
        """Columns t, x1..xn, y1..yl."""
        n = self.states.shape[1]
        l = self.outputs.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(
                ["t"]
                + [f"x{i + 1}" for i in range(n)]
                + [f"y{i + 1}" for i in range(l)]
            )
            for k, t in enumerate(self.times):
                w.writerow(
                    [f"{t:.10g}"]
                    + [f"{v:.12g}" for v in self.states[k]]
                    + [f"{v:.12g}" for v in self.outputs[k]]
                )


def rk4_run(
    f: Callable[[float, np.ndarray], np.ndarray],
    x0: np.ndarray,
    horizon: float,
    step: float,
):
    """Classical fixed-step 4th order integration of x' = f(t, x)."""
    if step <= 0:
        raise DomainError("step must be positive")
    if horizon < step:
        raise DomainError("horizon must cover at least one step")
    steps = int(round(horizon / step))
    times = np.linspace(0.0, steps * step, steps + 1)
    out = np.empty((steps + 1, len(x0)))
    x = np.array(x0, dtype=float)
    out[0] = x
    for k in range(steps):
        t = times[k]
        k1 = f(t, x)
        k2 = f(t + step / 2, x + step / 2 * k1)
        k3 = f(t + step / 2, x + step / 2 * k2)
        k4 = f(t + step, x + step * k3)
        x = x + step / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        out[k + 1] = x
    return times, out


def simulate_linear(
    sys: StateSpace,
    u: Callable[[float], Sequence[float]] | None,
    x0: Sequence[float],
    horizon: float,
    step: float = 1e-3,
) -> Trajectory:
    """Sampled trajectory of x' = A x + B u(t), y = C x + D u."""
    A, B, C, D = sys.to_float()
    if u is None:
        u = lambda t: np.zeros(sys.r)

    def f(t, x):
        return A @ x + B @ np.asarray(u(t), dtype=float)

    times, states = rk4_run(f, np.asarray(x0, dtype=float), horizon, step)
    outputs = states @ C.T + np.array([u(t) for t in times]) @ D.T
    return Trajectory(times, states, outputs)


@dataclass(frozen=True)
class BlockingScenario:
    """Exponential input u0 * exp(zero * t) and the initial state that makes
    the whole output vanish."""

    zero: complex
    u0: np.ndarray
    x0: np.ndarray
    residual: float


def blocking_scenario(sys: StateSpace, zero: complex) -> BlockingScenario:
    """Null direction of the system matrix at an invariant zero.

    When the zero is not an eigenvalue the initial state is the forced
    combination (zero*I - A)^-1 B u0; otherwise the null vector of the
    system matrix supplies both pieces directly.
    """
    from .zeros import system_matrix

    sm = system_matrix(sys)
    P = np.array(
        [[complex(e(complex(zero))) for e in row] for row in sm.P.entries]
    )
    _u, sv, vh = np.linalg.svd(P)
    null = vh.conj()[-1]
    resid = float(np.linalg.norm(P @ null))
    if resid > 1e-8 * (1 + float(sv[0])):
        raise StructuralError(
            f"{zero} is not an invariant zero (best residual {resid:.2e})"
        )
    x0 = null[: sys.n]
    u0 = null[sys.n :]
    if np.linalg.norm(u0) > 1e-12:
        scalefac = 1.0 / np.linalg.norm(u0)
        x0, u0 = x0 * scalefac, u0 * scalefac
        if abs(complex(zero).imag) < 1e-12:
            A = qmat.to_float(sys.A)
            try:
                x0 = np.linalg.solve(
                    complex(zero).real * np.eye(sys.n) - A,
                    qmat.to_float(sys.B) @ u0.real,
                ).astype(complex)
                u0 = u0.real.astype(complex)
            except np.linalg.LinAlgError:
                pass  # zero equals an eigenvalue: keep the null-vector pieces
    return BlockingScenario(zero=complex(zero), u0=u0, x0=x0, residual=resid)


def simulate_blocking(
    sys: StateSpace,
    scenario: BlockingScenario,
    horizon: float = 5.0,
    step: float = 1e-3,
) -> Trajectory:
    """Drive the system with the blocking exponential from the matched
    initial state; the output should stay at zero.

    Complex zeros run through the real two-dimensional rotation realization
    of Re(u0 e^{zt}).
    """
    z = scenario.zero
    if z.real > 0:
        cap_t = np.log(INPUT_CAP) / z.real
        horizon = min(horizon, cap_t)
    A, B, C, D = sys.to_float()
    if abs(z.imag) < 1e-12:
        a = z.real
        u0 = scenario.u0.real
        x0 = scenario.x0.real

        def u(t):
            return u0 * np.exp(a * t)

        return simulate_linear(sys, u, x0, horizon, step)
    # real part of the complex exponential: augment with the conjugate pair
    u0 = scenario.u0
    x0 = scenario.x0

    def u(t):
        return (u0 * np.exp(z * t)).real

    def f(t, x):
        return A @ x + B @ u(t)

    times, states = rk4_run(f, x0.real, horizon, step)
    outputs = states @ C.T + np.array([u(t) for t in times]) @ D.T
    return Trajectory(times, states, outputs)


def rk4_order_ratio(step: float = 0.05) -> float:
    """Error-reduction ratio when halving the step on x' = -x; close to 16
    for a 4th order scheme.  The default step keeps the halved error well
    above rounding noise."""
    sysd = StateSpace([[-1]], [[0]], [[1]])

    def err(h):
        traj = simulate_linear(sysd, None, [1.0], 1.0, h)
        return abs(traj.states[-1, 0] - np.exp(-1.0))

    return err(step) / err(step / 2)


def simulate_tracking(
    reg: RegulatorRealization,
    z_ref: Callable[[float], Sequence[float]],
    disturbance: Callable[[float], Sequence[float]] | None = None,
    E=None,
    horizon: float = 80.0,
    step: float = 1e-3,
    x0: Sequence[float] | None = None,
) -> tuple[Trajectory, float]:
    """Closed-loop run of a synthesized tracking regulator.

    Simulates plant + regulator (+ full-order observer when present) against
    the reference and disturbance signals; returns the trajectory of the
    regulation error z - z_ref as outputs plus its terminal norm.
    """
    plant = reg.plant
    A, B, D, _ = (
        qmat.to_float(plant.A),
        qmat.to_float(plant.B),
        qmat.to_float(plant.C),
        None,
    )
    cl = qmat.to_float(reg.closed_loop)
    eig = np.linalg.eigvals(cl)
    if np.max(eig.real) >= 0:
        raise StructuralError(
            f"closed loop is unstable: eigenvalues {sorted(eig.real)}"
        )
    n = plant.n
    d = len(plant.C)
    K1 = qmat.to_float(reg.K1)
    K2 = qmat.to_float(reg.K2)
    m = K2.shape[1]
    E_f = qmat.to_float(qmat.qmat(E)) if E is not None else None
    dist = disturbance if disturbance is not None else (lambda t: np.zeros(1))
    F_f = qmat.to_float(reg.F) if reg.F is not None else None
    Gam_f = qmat.to_float(reg.Gamma) if reg.Gamma is not None else None
    eta = reg.extras.get("eta") if reg.extras else None

    has_obs = reg.L is not None
    if has_obs:
        Ao = qmat.to_float(reg.observer_A)
        Bo = qmat.to_float(reg.observer_B)
        Ho = qmat.to_float(reg.observer_C)
        L = qmat.to_float(reg.L)
        no = Ao.shape[0]
        H_plant = Ho[:, :n]
        F_meas = Ho[:, n:]
    total = n + m + (no if has_obs else 0)
    x_init = np.zeros(total)
    if x0 is not None:
        x_init[: len(x0)] = np.asarray(x0, dtype=float)

    def control(xs, t):
        x = xs[:n]
        q = xs[n : n + m]
        if has_obs:
            xhat = xs[n + m : n + m + n]
        else:
            xhat = x
        return K1 @ xhat + K2 @ q, xhat

    def f(t, xs):
        x = xs[:n]
        q = xs[n : n + m]
        w = np.asarray(dist(t), dtype=float)
        ref = np.asarray(z_ref(t), dtype=float)
        u, xhat = control(xs, t)
        dx = A @ x + B @ u
        if E_f is not None:
            dx = dx + E_f @ w
        err = D @ xhat - ref
        if reg.kind == "servo":
            dq = F_f @ q + Gam_f @ err
        elif reg.kind == "polynomial":
            dq = np.zeros(m)
            dq[:d] = err
            dq[d:] = q[: m - d]
        else:
            dq = err
        out = [dx, dq]
        if has_obs:
            xo = xs[n + m :]
            y = H_plant @ x
            if F_meas.size:
                y = y + F_meas @ w
            dxo = Ao @ xo + Bo @ u - L @ (Ho @ xo - y)
            out.append(dxo)
        return np.concatenate(out)

    times, states = rk4_run(f, x_init, horizon, step)
    refs = np.array([np.asarray(z_ref(t), dtype=float) for t in times])
    zs = states[:, :n] @ D.T
    errors = zs - refs
    traj = Trajectory(times, states, errors)
    steady = float(np.linalg.norm(errors[-1]))
    return traj, steady
