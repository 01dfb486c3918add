"""Fixed-step RK4 integration of the coupled plant / update-law system.

The integrated state is (x, z): the plant state together with the reduced
parameter coordinate. theta_hat = theta0 + F z and e = x - x_d(t) are derived,
never stored. History-stack maintenance happens between integration steps, so
the right-hand side is a plain ODE within each step.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, TYPE_CHECKING

import numpy as np

from .constraints import lift, retract
from .errors import Diverged
from .history import HistoryStack, StackEntry

if TYPE_CHECKING:
    from .scenarios import ScenarioConfig

DEFAULT_OVERFLOW_GUARD = 1e9

LAW_GRADIENT = "gradient"
LAW_CONCURRENT = "concurrent_learning"


@dataclass(frozen=True)
class ClosedLoopState:
    t: float
    x: np.ndarray
    z: np.ndarray


@dataclass(eq=False)
class TrajectoryLog:
    """Uniform-grid record of everything the diagnostics and reports consume."""

    t: np.ndarray
    x: np.ndarray
    x_d: np.ndarray
    e: np.ndarray
    theta_hat: np.ndarray
    theta_tilde: np.ndarray
    u: np.ndarray
    constraint_violation: np.ndarray
    V: np.ndarray
    lambda_min: np.ndarray
    fe_flag: np.ndarray
    scenario_name: str
    law: str
    gamma: float
    k_cl: float
    k_diag: np.ndarray
    dt: float
    T: float
    fe_latch_index: int | None
    sigma1: float

    def __len__(self) -> int:
        return self.t.shape[0]

    @property
    def fe_latch_time(self) -> float | None:
        if self.fe_latch_index is None:
            return None
        return float(self.t[self.fe_latch_index])


def rk4_step(
    f: Callable[[float, np.ndarray], np.ndarray],
    t: float,
    y: np.ndarray,
    dt: float,
    f0: np.ndarray | None = None,
) -> np.ndarray:
    """One classical Runge-Kutta step; f0 may carry a precomputed f(t, y)."""
    k1 = f(t, y) if f0 is None else f0
    half = 0.5 * dt
    k2 = f(t + half, y + half * k1)
    k3 = f(t + half, y + half * k2)
    k4 = f(t + dt, y + dt * k3)
    return y + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)


def step_count(T: float, dt: float) -> int:
    """floor(T / dt), robust to the usual binary-fraction wobble."""
    return int(np.floor(T / dt + 1e-9))


def rhs(
    scenario: "ScenarioConfig",
    state: ClosedLoopState,
    stack: HistoryStack | None = None,
    use_cl: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Time derivative (xdot, zdot) of the closed loop at the given state.

    The control input and theta_hat are evaluated from the same (t, x, z), so
    repeated calls inside an integrator stage see no stale values.
    """
    spec = scenario.constraint_spec()
    reg = scenario.regressor()
    xd, xd_dot = scenario.trajectory()(state.t)
    Y = reg(state.x)
    e = state.x - xd
    theta_hat = lift(spec, state.z)
    u = xd_dot - Y @ theta_hat - scenario.k_diag * e
    xdot = Y @ scenario.theta_true + u
    w = spec.F.T @ (Y.T @ e)
    zdot = scenario.gamma * w
    if use_cl and stack is not None and len(stack) > 0 and scenario.k_cl > 0.0:
        residual = stack.data_vector - stack.Y_R @ theta_hat
        zdot = zdot + scenario.k_cl * (spec.F.T @ residual)
    return xdot, zdot


def run(
    scenario: "ScenarioConfig", overflow_guard: float = DEFAULT_OVERFLOW_GUARD
) -> TrajectoryLog:
    """Integrate the scenario from t=0 to t=T and return the full log.

    Concurrent-learning scenarios start on the gradient law and switch to the
    CL law permanently once the recorded-data matrix clears the finite
    excitation threshold; the switch time and the measured sigma1 are stored
    on the log. Raises Diverged if the state leaves the overflow guard.
    """
    spec = scenario.constraint_spec()
    reg = scenario.regressor()
    traj = scenario.trajectory()
    theta = np.asarray(scenario.theta_true, dtype=float)
    k_diag = np.asarray(scenario.k_diag, dtype=float)
    gamma = float(scenario.gamma)
    k_cl = float(scenario.k_cl)
    dt = float(scenario.dt)
    n = reg.n
    is_cl = scenario.law == LAW_CONCURRENT

    x = np.asarray(scenario.x0, dtype=float).copy()
    z = retract(spec, np.asarray(scenario.theta_hat0, dtype=float))
    F, Ft, theta0 = spec.F, spec.F.T, spec.theta0
    A, d = spec.A, spec.d

    n_steps = step_count(scenario.T, dt)
    n_rows = n_steps + 1
    t_grid = np.arange(n_rows) * dt

    log_x = np.empty((n_rows, n))
    log_xd = np.empty((n_rows, n))
    log_e = np.empty((n_rows, n))
    log_th = np.empty((n_rows, spec.p))
    log_tt = np.empty((n_rows, spec.p))
    log_u = np.empty((n_rows, n))
    log_viol = np.empty(n_rows)
    log_V = np.empty(n_rows)
    log_lam = np.empty(n_rows)
    log_fe = np.zeros(n_rows, dtype=bool)

    stack = HistoryStack(scenario.stack_capacity, scenario.rel_improve_tol)
    latched = False
    latch_idx: int | None = None
    sigma1 = float("nan")
    half_inv_gamma = 0.5 / gamma if gamma > 0 else 0.0

    def f_grad(t: float, y: np.ndarray) -> np.ndarray:
        x_ = y[:n]
        Y = reg.func(x_)
        xd, xd_dot = traj.func(t)
        e = x_ - xd
        th = theta0 + F @ y[n:]
        u = xd_dot - Y @ th - k_diag * e
        return np.concatenate([Y @ theta + u, gamma * (Ft @ (Y.T @ e))])

    def f_cl(t: float, y: np.ndarray) -> np.ndarray:
        x_ = y[:n]
        Y = reg.func(x_)
        xd, xd_dot = traj.func(t)
        e = x_ - xd
        th = theta0 + F @ y[n:]
        u = xd_dot - Y @ th - k_diag * e
        residual = stack.data_vector - stack.Y_R @ th
        zdot = gamma * (Ft @ (Y.T @ e)) + k_cl * (Ft @ residual)
        return np.concatenate([Y @ theta + u, zdot])

    for i in range(n_rows):
        t = t_grid[i]
        Y = reg.func(x)
        xd, xd_dot = traj.func(t)
        e = x - xd
        th = theta0 + F @ z
        tt = theta - th
        u = xd_dot - Y @ th - k_diag * e

        log_x[i] = x
        log_xd[i] = xd
        log_e[i] = e
        log_th[i] = th
        log_tt[i] = tt
        log_u[i] = u
        log_viol[i] = np.max(np.abs(A @ th - d))
        log_V[i] = 0.5 * (e @ e) + half_inv_gamma * (tt @ tt)
        log_lam[i] = stack.lambda_min
        log_fe[i] = latched

        if i == n_steps:
            break

        use_cl = is_cl and latched and len(stack) > 0 and k_cl > 0.0
        f = f_cl if use_cl else f_grad
        if use_cl:
            residual = stack.data_vector - stack.Y_R @ th
            zdot0 = gamma * (Ft @ (Y.T @ e)) + k_cl * (Ft @ residual)
        else:
            zdot0 = gamma * (Ft @ (Y.T @ e))
        y0 = np.concatenate([x, z])
        f0 = np.concatenate([Y @ theta + u, zdot0])
        y1 = rk4_step(f, t, y0, dt, f0=f0)
        if not np.all(np.isfinite(y1)) or np.max(np.abs(y1)) > overflow_guard:
            raise Diverged(f"state left the overflow guard at t={t + dt:.6g}")
        x, z = y1[:n].copy(), y1[n:].copy()

        # Record a data point centered on step i: needs x at i-1 (logged) and
        # i+1 (just computed), so offers trail the integration by one step.
        if is_cl and i >= 1 and i % scenario.stack_every == 0:
            xdot_hat = (x - log_x[i - 1]) / (2.0 * dt)
            xi = log_x[i].copy()
            stack.offer(StackEntry(x=xi, u=log_u[i].copy(), xdot_hat=xdot_hat, Y=reg.func(xi)))
            if not latched and stack.lambda_min >= scenario.sigma1_threshold:
                latched = True
                latch_idx = i + 1
                sigma1 = stack.lambda_min

    return TrajectoryLog(
        t=t_grid,
        x=log_x,
        x_d=log_xd,
        e=log_e,
        theta_hat=log_th,
        theta_tilde=log_tt,
        u=log_u,
        constraint_violation=log_viol,
        V=log_V,
        lambda_min=log_lam,
        fe_flag=log_fe,
        scenario_name=scenario.name,
        law=scenario.law,
        gamma=gamma,
        k_cl=k_cl,
        k_diag=k_diag,
        dt=dt,
        T=float(scenario.T),
        fe_latch_index=latch_idx,
        sigma1=sigma1,
    )
