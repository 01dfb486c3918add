"""Control-affine plant xdot = Y(x) theta + u and desired-trajectory generators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DimensionError


@dataclass(frozen=True)
class Regressor:
    """State-dependent matrix Y(x) of a linearly parametrized drift f(x) = Y(x) theta."""

    n: int
    p: int
    func: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return self.func(x)


@dataclass(frozen=True)
class PlantConfig:
    regressor: Regressor
    theta_true: np.ndarray
    x0: np.ndarray


@dataclass(frozen=True)
class DesiredTrajectory:
    """Reference signal: returns (x_d(t), xdot_d(t)) with an analytic derivative."""

    n: int
    func: Callable[[float], tuple[np.ndarray, np.ndarray]]

    def __call__(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        return self.func(t)


def _benchmark_Y(x: np.ndarray) -> np.ndarray:
    x1, x2 = x
    s1 = math.sin(x1)
    return np.array(
        [
            [x1 * x1, math.sin(x2), 0.0, 0.0],
            [0.0, x2 * s1, x1, x1 * x2],
        ]
    )


def benchmark_regressor() -> Regressor:
    """Two-state, four-parameter benchmark plant used by both bundled scenarios.

    Y(x) = [[x1^2, sin x2, 0, 0], [0, x2 sin x1, x1, x1 x2]]
    """
    return Regressor(n=2, p=4, func=_benchmark_Y)


def _benchmark_xd(t: float) -> tuple[np.ndarray, np.ndarray]:
    decay = math.exp(-0.1 * t)
    env = 10.0 * (1.0 - decay)
    s2, c2 = math.sin(2.0 * t), math.cos(2.0 * t)
    s3, c3 = math.sin(3.0 * t), math.cos(3.0 * t)
    xd = np.array([env * s2, env * 0.4 * c3])
    xd_dot = np.array(
        [decay * s2 + env * 2.0 * c2, decay * 0.4 * c3 - env * 1.2 * s3]
    )
    return xd, xd_dot


def benchmark_trajectory() -> DesiredTrajectory:
    """x_d(t) = 10 (1 - e^{-0.1 t}) [sin 2t; 0.4 cos 3t] with analytic derivative."""
    return DesiredTrajectory(n=2, func=_benchmark_xd)


def zero_trajectory(n: int = 2) -> DesiredTrajectory:
    """Regulation reference x_d = 0 (handy for tests and demos)."""
    zeros = np.zeros(n)

    def f(t: float) -> tuple[np.ndarray, np.ndarray]:
        return zeros.copy(), zeros.copy()

    return DesiredTrajectory(n=n, func=f)


def plant_rhs(plant: PlantConfig, x: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Open-loop dynamics Y(x) theta + u."""
    Y = plant.regressor(x)
    if Y.shape != (plant.regressor.n, plant.regressor.p):
        raise DimensionError(f"regressor returned shape {Y.shape}")
    u = np.asarray(u, dtype=float)
    if u.shape != (plant.regressor.n,):
        raise DimensionError(f"u must have length {plant.regressor.n}, got {u.shape}")
    if plant.theta_true.shape != (plant.regressor.p,):
        raise DimensionError("theta_true length does not match regressor")
    return Y @ plant.theta_true + u
