"""Scenario configuration: presets, file loading, validation, serialization.

A scenario is a single JSON document describing the plant, the constraint,
the law and its gains, initial conditions, and solver/stack settings. The two
bundled presets reproduce the benchmark simulation studies.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .constraints import ConstraintSpec, build_constraint
from .errors import EqAdaptError, ParseError, ValidationError
from .history import DEFAULT_REL_IMPROVE_TOL
from .laws import ControllerConfig, UpdateLawConfig
from .plants import (
    DesiredTrajectory,
    PlantConfig,
    Regressor,
    benchmark_regressor,
    benchmark_trajectory,
    zero_trajectory,
)

FEASIBILITY_TOL = 1e-8
DEFAULT_DT = 1e-3
DEFAULT_HORIZON = 20.0
DEFAULT_STACK_CAPACITY = 20
DEFAULT_STACK_EVERY = 10
DEFAULT_SIGMA1_THRESHOLD = 30.0

LAWS = ("gradient", "concurrent_learning")

_REGRESSORS = {
    "paper_sim1": benchmark_regressor,
    "paper_sim2": benchmark_regressor,
    "benchmark": benchmark_regressor,
}

# Restricted namespace for inline regressor expressions.
_EXPR_FUNCS = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan,
    "exp": math.exp, "log": math.log, "sqrt": math.sqrt,
    "abs": abs, "pi": math.pi, "e": math.e,
}


def _compile_inline_regressor(spec: dict) -> Regressor:
    try:
        n, p = int(spec["n"]), int(spec["p"])
        rows = spec["rows"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"inline regressor spec needs n, p, rows: {exc}") from exc
    if len(rows) != n or any(len(r) != p for r in rows):
        raise ValidationError("inline regressor rows must form an n x p grid of expressions")
    codes = []
    for i, row in enumerate(rows):
        for j, expr in enumerate(row):
            try:
                codes.append(compile(str(expr), f"<Y[{i}][{j}]>", "eval"))
            except SyntaxError as exc:
                raise ValidationError(f"bad expression for Y[{i}][{j}]: {expr!r}") from exc
    names = [f"x{i + 1}" for i in range(n)]

    def func(x: np.ndarray) -> np.ndarray:
        env = dict(zip(names, x))
        env.update(_EXPR_FUNCS)
        vals = [eval(c, {"__builtins__": {}}, env) for c in codes]  # noqa: S307
        return np.array(vals, dtype=float).reshape(n, p)

    return Regressor(n=n, p=p, func=func)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    plant: str | dict
    theta_true: np.ndarray
    x0: np.ndarray
    A: np.ndarray
    d: np.ndarray
    law: str
    k_diag: np.ndarray
    gamma: float
    k_cl: float
    theta_hat0: np.ndarray
    trajectory_name: str = "paper"
    dt: float = DEFAULT_DT
    T: float = DEFAULT_HORIZON
    stack_capacity: int = DEFAULT_STACK_CAPACITY
    stack_every: int = DEFAULT_STACK_EVERY
    sigma1_threshold: float = DEFAULT_SIGMA1_THRESHOLD
    rel_improve_tol: float = DEFAULT_REL_IMPROVE_TOL
    out_dir: str | None = None

    def __post_init__(self):
        for name in ("theta_true", "x0", "k_diag", "theta_hat0"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))
        object.__setattr__(self, "A", np.atleast_2d(np.asarray(self.A, dtype=float)))
        object.__setattr__(self, "d", np.atleast_1d(np.asarray(self.d, dtype=float)))

    # -- resolution ---------------------------------------------------------

    def regressor(self) -> Regressor:
        if isinstance(self.plant, str):
            try:
                return _REGRESSORS[self.plant]()
            except KeyError:
                raise ValidationError(
                    f"unknown plant {self.plant!r}; built-ins: {sorted(_REGRESSORS)}"
                ) from None
        return _compile_inline_regressor(self.plant)

    def trajectory(self) -> DesiredTrajectory:
        if self.trajectory_name in ("paper", "paper_sim1", "paper_sim2"):
            return benchmark_trajectory()
        if self.trajectory_name == "zero":
            return zero_trajectory(len(self.x0))
        raise ValidationError(f"unknown trajectory {self.trajectory_name!r}")

    def constraint_spec(self) -> ConstraintSpec:
        return build_constraint(self.A, self.d)

    def plant_config(self) -> PlantConfig:
        return PlantConfig(regressor=self.regressor(), theta_true=self.theta_true, x0=self.x0)

    def controller(self) -> ControllerConfig:
        return ControllerConfig(k_diag=self.k_diag)

    def update_law(self) -> UpdateLawConfig:
        return UpdateLawConfig(
            gamma=self.gamma, k_cl=self.k_cl, sigma1_threshold=self.sigma1_threshold
        )

    # -- validation ---------------------------------------------------------

    def validate(self) -> None:
        if self.law not in LAWS:
            raise ValidationError(f"law must be one of {LAWS}, got {self.law!r}")
        try:
            reg = self.regressor()
            spec = self.constraint_spec()
            self.trajectory()
            self.controller()
            self.update_law()
        except EqAdaptError as exc:
            raise ValidationError(str(exc)) from exc
        n, p = reg.n, reg.p
        if self.x0.shape != (n,):
            raise ValidationError(f"x0 must have length {n}")
        if self.theta_true.shape != (p,):
            raise ValidationError(f"theta_true must have length {p}")
        if self.theta_hat0.shape != (p,):
            raise ValidationError(f"theta_hat0 must have length {p}")
        if self.k_diag.shape != (n,):
            raise ValidationError(f"controller gain diagonal must have length {n}")
        if self.A.shape[1] != p:
            raise ValidationError(f"constraint matrix must have {p} columns")
        v_true = spec.constraint_violation(self.theta_true)
        if v_true > FEASIBILITY_TOL:
            raise ValidationError(
                f"theta_true violates A theta = d by {v_true:.3e} (tolerance {FEASIBILITY_TOL:.1e})"
            )
        v_hat = spec.constraint_violation(self.theta_hat0)
        if v_hat > FEASIBILITY_TOL:
            raise ValidationError(
                f"theta_hat0 violates A theta = d by {v_hat:.3e} (tolerance {FEASIBILITY_TOL:.1e})"
            )
        if not self.dt > 0:
            raise ValidationError("dt must be positive")
        if not self.T > self.dt:
            raise ValidationError("T must exceed dt")
        if self.stack_capacity < 1:
            raise ValidationError("stack capacity must be at least 1")
        if self.stack_every < 1:
            raise ValidationError("stack collection cadence must be at least 1 step")
        if self.rel_improve_tol < 0:
            raise ValidationError("rel_improve_tol must be nonnegative")

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "plant": self.plant,
            "theta_true": self.theta_true.tolist(),
            "x0": self.x0.tolist(),
            "constraint": {"A": self.A.tolist(), "d": self.d.tolist()},
            "law": self.law,
            "gains": {"k": self.k_diag.tolist(), "gamma": self.gamma, "k_cl": self.k_cl},
            "theta_hat0": self.theta_hat0.tolist(),
            "trajectory": self.trajectory_name,
            "solver": {"dt": self.dt, "T": self.T},
            "stack": {
                "capacity": self.stack_capacity,
                "every_steps": self.stack_every,
                "sigma1_threshold": self.sigma1_threshold,
                "rel_improve_tol": self.rel_improve_tol,
            },
            "out_dir": self.out_dir,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        try:
            constraint = data["constraint"]
            gains = data["gains"]
            solver = data.get("solver", {})
            stack = data.get("stack", {})
            return cls(
                name=str(data.get("name", "scenario")),
                plant=data["plant"],
                theta_true=data["theta_true"],
                x0=data["x0"],
                A=constraint["A"],
                d=constraint["d"],
                law=str(data["law"]),
                k_diag=gains["k"],
                gamma=float(gains["gamma"]),
                k_cl=float(gains.get("k_cl", 0.0)),
                theta_hat0=data["theta_hat0"],
                trajectory_name=str(data.get("trajectory", "paper")),
                dt=float(solver.get("dt", DEFAULT_DT)),
                T=float(solver.get("T", DEFAULT_HORIZON)),
                stack_capacity=int(stack.get("capacity", DEFAULT_STACK_CAPACITY)),
                stack_every=int(stack.get("every_steps", DEFAULT_STACK_EVERY)),
                sigma1_threshold=float(
                    stack.get("sigma1_threshold", DEFAULT_SIGMA1_THRESHOLD)
                ),
                rel_improve_tol=float(
                    stack.get("rel_improve_tol", DEFAULT_REL_IMPROVE_TOL)
                ),
                out_dir=data.get("out_dir"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"scenario document is missing or mistypes a field: {exc}") from exc

    def with_overrides(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **kwargs)


def preset_paper_sim1() -> ScenarioConfig:
    """Benchmark study 1: gradient law under the constraint theta1 = theta2."""
    return ScenarioConfig(
        name="paper_sim1",
        plant="paper_sim1",
        theta_true=[5.0, 5.0, 10.0, 20.0],
        x0=[10.0, 5.0],
        A=[[1.0, -1.0, 0.0, 0.0]],
        d=[0.0],
        law="gradient",
        k_diag=[20.0, 100.0],
        gamma=0.4,
        k_cl=0.0,
        theta_hat0=[4.5, 4.5, 4.5, 15.0],
    )


def preset_paper_sim2() -> ScenarioConfig:
    """Benchmark study 2: concurrent-learning law under theta2 = theta4."""
    return ScenarioConfig(
        name="paper_sim2",
        plant="paper_sim2",
        theta_true=[5.0, 20.0, 10.0, 20.0],
        x0=[10.0, 5.0],
        A=[[0.0, -1.0, 0.0, 1.0]],
        d=[0.0],
        law="concurrent_learning",
        k_diag=[20.0, 100.0],
        gamma=0.05,
        k_cl=0.0008,
        theta_hat0=[3.0, 10.0, 5.0, 10.0],
    )


PRESETS = {
    "paper_sim1": preset_paper_sim1,
    "paper_sim2": preset_paper_sim2,
}


def load_scenario(source: str | Path) -> ScenarioConfig:
    """Load a preset by name or a scenario JSON file by path; always validated."""
    key = str(source)
    if key in PRESETS:
        cfg = PRESETS[key]()
    else:
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ParseError(f"cannot read scenario file {path}: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"scenario file {path} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ParseError(f"scenario file {path} must hold a JSON object")
        cfg = ScenarioConfig.from_dict(data)
    cfg.validate()
    return cfg


def save_scenario(cfg: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(cfg.to_dict(), indent=2) + "\n")
