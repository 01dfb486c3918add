"""Equality-constrained parameter update laws for adaptive tracking control.

The package implements adaptation of linearly parametrized dynamics
xdot = Y(x) theta + u subject to prior knowledge A theta = d. The constraint
is eliminated by reparametrizing the estimate as theta_hat = theta0 + F z
with range(F) = null(A), so both the gradient law and the concurrent-learning
law update the reduced coordinate z and satisfy the constraint by
construction.
"""

from .constraints import ConstraintSpec, build_constraint, lift, retract
from .errors import (
    Diverged,
    DimensionError,
    EqAdaptError,
    InfeasibleInitialEstimate,
    MissingFE,
    ParseError,
    RankDeficient,
    ValidationError,
)
from .history import HistoryStack, StackEntry
from .laws import ControllerConfig, UpdateLawConfig, cl_zdot, control, fe_satisfied, grad_zdot
from .metrics import (
    LyapunovReport,
    OracleRun,
    lyapunov_series,
    oracle_full_dimension,
    richardson_order,
    summary,
)
from .plants import (
    DesiredTrajectory,
    PlantConfig,
    Regressor,
    benchmark_regressor,
    benchmark_trajectory,
    plant_rhs,
    zero_trajectory,
)
from .scenarios import (
    PRESETS,
    ScenarioConfig,
    load_scenario,
    preset_paper_sim1,
    preset_paper_sim2,
    save_scenario,
)
from .simulate import ClosedLoopState, TrajectoryLog, rhs, rk4_step, run, step_count

__version__ = "0.1.0"

__all__ = [
    "ConstraintSpec", "build_constraint", "lift", "retract",
    "Regressor", "PlantConfig", "DesiredTrajectory",
    "benchmark_regressor", "benchmark_trajectory", "zero_trajectory", "plant_rhs",
    "ControllerConfig", "UpdateLawConfig", "control", "grad_zdot", "cl_zdot",
    "fe_satisfied", "HistoryStack", "StackEntry",
    "ClosedLoopState", "TrajectoryLog", "rhs", "rk4_step", "run", "step_count",
    "LyapunovReport", "OracleRun", "lyapunov_series", "oracle_full_dimension",
    "richardson_order", "summary",
    "ScenarioConfig", "PRESETS", "load_scenario", "save_scenario",
    "preset_paper_sim1", "preset_paper_sim2",
    "EqAdaptError", "DimensionError", "RankDeficient", "InfeasibleInitialEstimate",
    "Diverged", "ValidationError", "ParseError", "MissingFE",
]
