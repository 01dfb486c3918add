"""Tracking controller and the two equality-constrained parameter update laws.

Both update laws act on the reduced coordinate z; theta_hat = theta0 + F z is
maintained by construction, so the constraint is satisfied for all time
without projection steps.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constraints import ConstraintSpec
from .errors import DimensionError, ValidationError
from .history import HistoryStack


@dataclass(frozen=True)
class ControllerConfig:
    """Diagonal positive-definite feedback gain; k_diag holds the diagonal entries."""

    k_diag: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "k_diag", np.asarray(self.k_diag, dtype=float))
        if self.k_diag.ndim != 1 or np.any(self.k_diag <= 0):
            raise ValidationError("controller gain diagonal must be 1-D with positive entries")

    @property
    def k_min(self) -> float:
        return float(self.k_diag.min())


@dataclass(frozen=True)
class UpdateLawConfig:
    """Adaptation gains.

    gamma scales the tracking-error gradient term; k_cl scales the recorded-data
    term (0 disables it); sigma1_threshold is the minimum eigenvalue of the
    information matrix required to declare finite excitation.

    gamma = 0 is accepted so that known-parameter (no-adaptation) scenarios can
    be simulated; adaptation requires gamma > 0.
    """

    gamma: float
    k_cl: float = 0.0
    sigma1_threshold: float = 30.0

    def __post_init__(self):
        if self.gamma < 0:
            raise ValidationError("gamma must be nonnegative")
        if self.k_cl < 0:
            raise ValidationError("k_cl must be nonnegative")
        if self.sigma1_threshold <= 0:
            raise ValidationError("sigma1_threshold must be positive")


def control(
    cfg: ControllerConfig,
    e: np.ndarray,
    xd_dot: np.ndarray,
    Y: np.ndarray,
    theta_hat: np.ndarray,
) -> np.ndarray:
    """Tracking controller u = xdot_d - Y theta_hat - k e.

    Substituted into the plant this yields the error dynamics
    edot = Y (theta - theta_hat) - k e.
    """
    n, p = Y.shape
    if e.shape != (n,) or xd_dot.shape != (n,):
        raise DimensionError("e and xd_dot must match the regressor row count")
    if theta_hat.shape != (p,):
        raise DimensionError("theta_hat must match the regressor column count")
    if cfg.k_diag.shape != (n,):
        raise DimensionError("controller gain size does not match the state dimension")
    return xd_dot - Y @ theta_hat - cfg.k_diag * e


def grad_zdot(
    spec: ConstraintSpec, cfg: UpdateLawConfig, Y: np.ndarray, e: np.ndarray
) -> np.ndarray:
    """Gradient update in reduced coordinates: zdot = gamma F^T Y^T e."""
    n, p = Y.shape
    if p != spec.p:
        raise DimensionError("regressor column count does not match the constraint")
    if e.shape != (n,):
        raise DimensionError("e must match the regressor row count")
    return cfg.gamma * (spec.F.T @ (Y.T @ e))


def cl_zdot(
    spec: ConstraintSpec,
    cfg: UpdateLawConfig,
    Y: np.ndarray,
    e: np.ndarray,
    stack: HistoryStack,
    theta_hat: np.ndarray,
) -> np.ndarray:
    """Concurrent-learning update: the gradient term plus recorded-data residuals.

    zdot = gamma F^T Y^T e + k_cl F^T sum_k Y_k^T (xdot_hat_k - u_k - Y_k theta_hat)

    The sum is evaluated through the stack's cached aggregates
    (sum_k Y_k^T (xdot_hat_k - u_k)) - Y_R theta_hat, which is the same
    expression with the summation reassociated. An empty stack reduces to the
    plain gradient law.
    """
    if theta_hat.shape != (spec.p,):
        raise DimensionError("theta_hat must match the constraint dimension")
    zdot = grad_zdot(spec, cfg, Y, e)
    if len(stack) == 0 or cfg.k_cl == 0.0:
        return zdot
    residual_sum = stack.data_vector - stack.Y_R @ theta_hat
    return zdot + cfg.k_cl * (spec.F.T @ residual_sum)


def fe_satisfied(stack: HistoryStack, cfg: UpdateLawConfig) -> bool:
    """Finite excitation holds once lambda_min(Y_R) reaches the configured threshold.

    When true, stack.lambda_min is the measured sigma1 used by the
    exponential-envelope diagnostics.
    """
    return stack.lambda_min >= cfg.sigma1_threshold
