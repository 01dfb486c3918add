"""Lyapunov diagnostics, stability envelopes, and the full-dimension oracle.

The oracle integrates the parameter estimate directly in R^p through the
null-space projector, providing an independent implementation of the same
closed loop used to cross-validate the reduced-coordinate laws.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Diverged, MissingFE, ValidationError
from .history import HistoryStack, StackEntry
from .simulate import (
    DEFAULT_OVERFLOW_GUARD,
    LAW_CONCURRENT,
    TrajectoryLog,
    rk4_step,
    step_count,
)

ENVELOPE_SLACK = 1e-6
V_STEP_SLACK = 1e-9


@dataclass(frozen=True)
class LyapunovReport:
    """Quadratic-bound constants and the V(t) series for one run.

    lambda1/lambda2 bracket V between lambda1 ||y||^2 and lambda2 ||y||^2 for
    y = (e, theta_tilde); mu0 = sqrt(lambda2/lambda1) and
    mu1 = min(2 lambda_min(k), 2 k_cl sigma1) parametrize the exponential
    envelope checked for concurrent-learning runs.
    """

    lambda1: float
    lambda2: float
    mu0: float
    mu1: float
    V_series: np.ndarray
    envelope_ok: bool


def lyapunov_series(log: TrajectoryLog, gamma: float) -> LyapunovReport:
    """Evaluate V along the log and check the stability claims numerically.

    Gradient runs: V must be non-increasing step to step within slack
    1e-9 * (1 + V). Concurrent-learning runs additionally must stay inside
    the exponential envelope mu0 ||y(t_f)|| exp(-mu1 (t - t_f)) after the
    finite-excitation latch at t_f, with sigma1 measured from the run.
    Raises MissingFE if a concurrent-learning run never latched.
    """
    if gamma <= 0:
        raise ValidationError("lyapunov_series needs gamma > 0")
    lambda1 = min(0.5, 0.5 / gamma)
    lambda2 = max(0.5, 0.5 / gamma)
    mu0 = float(np.sqrt(lambda2 / lambda1))

    e_sq = np.sum(log.e**2, axis=1)
    tt_sq = np.sum(log.theta_tilde**2, axis=1)
    V = 0.5 * e_sq + (0.5 / gamma) * tt_sq
    monotone_ok = bool(np.all(V[1:] <= V[:-1] + V_STEP_SLACK * (1.0 + V[:-1])))

    if log.law == LAW_CONCURRENT:
        if log.fe_latch_index is None:
            raise MissingFE(
                f"run {log.scenario_name!r} never reached the finite-excitation threshold"
            )
        idx = log.fe_latch_index
        sigma1 = log.sigma1
        mu1 = min(2.0 * float(np.min(log.k_diag)), 2.0 * log.k_cl * sigma1)
        y_norm = np.sqrt(e_sq + tt_sq)
        tail = slice(idx, None)
        bound = mu0 * y_norm[idx] * np.exp(-mu1 * (log.t[tail] - log.t[idx]))
        envelope_ok = monotone_ok and bool(
            np.all(y_norm[tail] <= bound * (1.0 + ENVELOPE_SLACK))
        )
    else:
        mu1 = 0.0
        envelope_ok = monotone_ok

    return LyapunovReport(
        lambda1=lambda1,
        lambda2=lambda2,
        mu0=mu0,
        mu1=mu1,
        V_series=V,
        envelope_ok=envelope_ok,
    )


@dataclass(frozen=True)
class OracleRun:
    """Full-dimension integration of theta_hat (no reduced coordinate)."""

    t: np.ndarray
    theta_hat: np.ndarray
    fe_latch_index: int | None


def oracle_full_dimension(
    scenario, overflow_guard: float = DEFAULT_OVERFLOW_GUARD
) -> OracleRun:
    """Integrate theta_hat_dot = gamma P Y^T e (+ CL data term) directly in R^p.

    P = F F^T is the orthogonal projector onto null(A). The stack-offer
    schedule, finite-difference derivative estimates, and latch logic mirror
    the reduced-coordinate simulator, but the parameter estimate never passes
    through z, and the recorded-data sum is evaluated entry by entry.
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
    p = spec.p
    is_cl = scenario.law == LAW_CONCURRENT
    P = spec.F @ spec.F.T

    n_steps = step_count(scenario.T, dt)
    n_rows = n_steps + 1
    t_grid = np.arange(n_rows) * dt

    x = np.asarray(scenario.x0, dtype=float).copy()
    th = np.asarray(scenario.theta_hat0, dtype=float).copy()

    log_x = np.empty((n_rows, n))
    log_u = np.empty((n_rows, n))
    log_th = np.empty((n_rows, p))

    stack = HistoryStack(scenario.stack_capacity, scenario.rel_improve_tol)
    latched = False
    latch_idx: int | None = None

    def f(t: float, y: np.ndarray) -> np.ndarray:
        x_ = y[:n]
        th_ = y[n:]
        Y = reg.func(x_)
        xd, xd_dot = traj.func(t)
        e = x_ - xd
        u = xd_dot - Y @ th_ - k_diag * e
        drive = gamma * (Y.T @ e)
        if latched:
            for rec in stack.entries:
                drive = drive + k_cl * (rec.Y.T @ (rec.xdot_hat - rec.u - rec.Y @ th_))
        return np.concatenate([Y @ theta + u, P @ drive])

    for i in range(n_rows):
        Y = reg.func(x)
        xd, xd_dot = traj.func(t_grid[i])
        log_x[i] = x
        log_u[i] = xd_dot - Y @ th - k_diag * (x - xd)
        log_th[i] = th
        if i == n_steps:
            break
        y1 = rk4_step(f, float(t_grid[i]), np.concatenate([x, th]), dt)
        if not np.all(np.isfinite(y1)) or np.max(np.abs(y1)) > overflow_guard:
            raise Diverged(f"oracle state left the overflow guard at t={t_grid[i] + dt:.6g}")
        x, th = y1[:n].copy(), y1[n:].copy()
        if is_cl and i >= 1 and i % scenario.stack_every == 0:
            xdot_hat = (x - log_x[i - 1]) / (2.0 * dt)
            xi = log_x[i].copy()
            stack.offer(StackEntry(x=xi, u=log_u[i].copy(), xdot_hat=xdot_hat, Y=reg.func(xi)))
            if not latched and stack.lambda_min >= scenario.sigma1_threshold:
                latched = True
                latch_idx = i + 1

    return OracleRun(t=t_grid, theta_hat=log_th, fe_latch_index=latch_idx)


def summary(log: TrajectoryLog, report: LyapunovReport | None = None) -> dict:
    """Terminal metrics of one run as a flat, JSON-friendly mapping."""
    latch_time = log.fe_latch_time
    return {
        "scenario": log.scenario_name,
        "law": log.law,
        "final_e_norm": float(np.linalg.norm(log.e[-1])),
        "final_theta_tilde_norm": float(np.linalg.norm(log.theta_tilde[-1])),
        "max_constraint_violation": float(np.max(log.constraint_violation)),
        "fe_latch_time": latch_time,
        "sigma1": None if np.isnan(log.sigma1) else float(log.sigma1),
        "envelope_ok": None if report is None else bool(report.envelope_ok),
    }


def richardson_order(scenario, dt: float) -> float:
    """Estimate the integrator's convergence order from runs at dt, dt/2, dt/4.

    Returns log2(||x_h(T) - x_{h/2}(T)|| / ||x_{h/2}(T) - x_{h/4}(T)||).
    """
    from .simulate import run

    finals = []
    for scale in (1.0, 0.5, 0.25):
        log = run(scenario.with_overrides(dt=dt * scale))
        finals.append(log.x[-1])
    coarse = float(np.linalg.norm(finals[0] - finals[1]))
    fine = float(np.linalg.norm(finals[1] - finals[2]))
    if fine == 0.0:
        return float("inf")
    return float(np.log2(coarse / fine))
