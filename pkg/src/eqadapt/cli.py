"""Command-line front end: run scenarios, sweep gains, validate configs.

Verbs:
  run       integrate one scenario, write trajectory CSV + summary JSON
  sweep     grid over gamma / k_cl / dt / h, one run per grid point
  validate  load + validate a scenario, report the first violation
  presets   list the bundled scenario presets

Exit codes: 0 success, 2 validation/parse failure, 3 diverged, 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import os
import sys
from pathlib import Path

import numpy as np

from .errors import Diverged, InfeasibleInitialEstimate, MissingFE, ParseError, ValidationError
from .metrics import lyapunov_series, oracle_full_dimension, summary
from .scenarios import PRESETS, ScenarioConfig, load_scenario
from .simulate import TrajectoryLog, run

OUT_DIR_ENV = "EQADAPT_OUT_DIR"
SWEEP_FIELDS = {"gamma": float, "k_cl": float, "dt": float, "h": int}

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_DIVERGED = 3
EXIT_IO = 4


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def csv_header(n: int, p: int) -> list[str]:
    cols = ["t"]
    cols += [f"x{i + 1}" for i in range(n)]
    cols += [f"xd{i + 1}" for i in range(n)]
    cols += [f"e{i + 1}" for i in range(n)]
    cols += [f"u{i + 1}" for i in range(n)]
    cols += [f"theta_hat{j + 1}" for j in range(p)]
    cols += [f"theta_tilde{j + 1}" for j in range(p)]
    cols += ["constraint_violation", "V", "lambda_min_YR", "fe_flag"]
    return cols


def write_trajectory_csv(log: TrajectoryLog, path: Path) -> None:
    n = log.x.shape[1]
    p = log.theta_hat.shape[1]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(csv_header(n, p))
        for i in range(len(log)):
            row = [_fmt(log.t[i])]
            row += [_fmt(v) for v in log.x[i]]
            row += [_fmt(v) for v in log.x_d[i]]
            row += [_fmt(v) for v in log.e[i]]
            row += [_fmt(v) for v in log.u[i]]
            row += [_fmt(v) for v in log.theta_hat[i]]
            row += [_fmt(v) for v in log.theta_tilde[i]]
            row += [
                _fmt(log.constraint_violation[i]),
                _fmt(log.V[i]),
                _fmt(log.lambda_min[i]),
                str(int(log.fe_flag[i])),
            ]
            writer.writerow(row)


def write_oracle_csv(t: np.ndarray, theta: np.ndarray, path: Path) -> None:
    p = theta.shape[1]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t"] + [f"theta_full{j + 1}" for j in range(p)])
        for i in range(t.shape[0]):
            writer.writerow([_fmt(t[i])] + [_fmt(v) for v in theta[i]])


def _resolve_out_dir(arg: str | None, scenario: ScenarioConfig | None = None) -> Path:
    if arg:
        out = Path(arg)
    elif scenario is not None and scenario.out_dir:
        out = Path(scenario.out_dir)
    else:
        out = Path(os.environ.get(OUT_DIR_ENV, "runs"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_from_args(args: argparse.Namespace) -> ScenarioConfig:
    if getattr(args, "preset", None):
        scenario = load_scenario(args.preset)
    elif getattr(args, "scenario", None):
        scenario = load_scenario(args.scenario)
    else:
        raise ValidationError("provide --scenario PATH or --preset NAME")
    overrides = {}
    if getattr(args, "dt", None) is not None:
        overrides["dt"] = args.dt
    if getattr(args, "horizon", None) is not None:
        overrides["T"] = args.horizon
    if overrides:
        scenario = scenario.with_overrides(**overrides)
        scenario.validate()
    return scenario


def _execute(scenario: ScenarioConfig, out: Path, with_oracle: bool) -> dict:
    log = run(scenario)
    try:
        report = lyapunov_series(log, scenario.gamma)
    except (MissingFE, ValidationError):
        report = None
    info = summary(log, report)
    info["rows"] = len(log)
    info["dt"] = scenario.dt
    info["T"] = scenario.T
    traj_path = out / f"{scenario.name}_trajectory.csv"
    write_trajectory_csv(log, traj_path)
    if with_oracle:
        oracle = oracle_full_dimension(scenario)
        write_oracle_csv(oracle.t, oracle.theta_hat, out / f"{scenario.name}_oracle.csv")
        info["oracle_max_theta_deviation"] = float(
            np.max(np.abs(log.theta_hat - oracle.theta_hat))
        )
    (out / f"{scenario.name}_summary.json").write_text(json.dumps(info, indent=2) + "\n")
    return info


def cmd_run(args: argparse.Namespace) -> int:
    scenario = _load_from_args(args)
    out = _resolve_out_dir(args.out, scenario)
    info = _execute(scenario, out, args.oracle)
    print(f"wrote {out / (scenario.name + '_trajectory.csv')}")
    print(f"final |e| = {info['final_e_norm']:.6g}, "
          f"final |theta_tilde| = {info['final_theta_tilde_norm']:.6g}, "
          f"max constraint violation = {info['max_constraint_violation']:.3e}")
    return EXIT_OK


def _parse_grid(specs: list[str] | None) -> dict[str, list]:
    if not specs:
        raise ValidationError(
            "sweep needs at least one --grid field=v1,v2,... "
            f"(fields: {sorted(SWEEP_FIELDS)})"
        )
    grid: dict[str, list] = {}
    for spec in specs:
        field, _, values = spec.partition("=")
        field = field.strip()
        if field not in SWEEP_FIELDS:
            raise ValidationError(
                f"cannot sweep {field!r}; sweepable fields: {sorted(SWEEP_FIELDS)}"
            )
        cast = SWEEP_FIELDS[field]
        try:
            parsed = [cast(float(v)) for v in values.split(",") if v.strip()]
        except ValueError as exc:
            raise ValidationError(f"bad grid values in {spec!r}: {exc}") from exc
        if not parsed:
            raise ValidationError(f"grid for {field!r} is empty")
        grid[field] = parsed
    return grid


def cmd_sweep(args: argparse.Namespace) -> int:
    base = _load_from_args(args)
    grid = _parse_grid(args.grid)
    out = _resolve_out_dir(args.out, base)
    fields = sorted(grid)
    rows = []
    for run_id, combo in enumerate(itertools.product(*(grid[f] for f in fields))):
        overrides = dict(zip(fields, combo))
        scenario_overrides = {
            {"h": "stack_capacity"}.get(k, k): v for k, v in overrides.items()
        }
        name = f"{base.name}_run{run_id:03d}"
        scenario = base.with_overrides(name=name, **scenario_overrides)
        record = {"run": name, **{f: overrides[f] for f in fields}}
        try:
            scenario.validate()
            info = _execute(scenario, out, with_oracle=False)
            record.update(
                status="ok",
                final_e_norm=info["final_e_norm"],
                final_theta_tilde_norm=info["final_theta_tilde_norm"],
                max_constraint_violation=info["max_constraint_violation"],
            )
        except (ValidationError, InfeasibleInitialEstimate) as exc:
            record.update(status=f"validation_error: {exc}")
        except Diverged as exc:
            record.update(status=f"diverged: {exc}")
        rows.append(record)
    table_path = out / f"{base.name}_sweep_summary.csv"
    columns = ["run"] + fields + [
        "status", "final_e_norm", "final_theta_tilde_norm", "max_constraint_violation",
    ]
    with table_path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for record in rows:
            writer.writerow({c: record.get(c, "") for c in columns})
    print(f"wrote {table_path} ({len(rows)} runs)")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    scenario = _load_from_args(args)
    print(f"scenario {scenario.name!r} is valid "
          f"({scenario.law}, dt={scenario.dt}, T={scenario.T})")
    return EXIT_OK


def cmd_presets(args: argparse.Namespace) -> int:
    for name, factory in PRESETS.items():
        cfg = factory()
        print(f"{name}: {cfg.law}, gamma={cfg.gamma}, k_cl={cfg.k_cl}, "
              f"constraint A={cfg.A.tolist()}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eqadapt",
        description="Equality-constrained adaptive control scenario runner",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_source_args(p: argparse.ArgumentParser, with_solver: bool = True) -> None:
        p.add_argument("--scenario", help="path to a scenario JSON file")
        p.add_argument("--preset", help=f"preset name ({', '.join(PRESETS)})")
        if with_solver:
            p.add_argument("--dt", type=float, help="override solver step")
            p.add_argument("--horizon", type=float, help="override horizon T")

    p_run = sub.add_parser("run", help="run one scenario")
    add_source_args(p_run)
    p_run.add_argument("--out", help=f"output directory (default ${OUT_DIR_ENV} or ./runs)")
    p_run.add_argument("--oracle", action="store_true",
                       help="also integrate the full-dimension oracle and record the deviation")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="run a grid of scenarios")
    add_source_args(p_sweep)
    p_sweep.add_argument("--grid", action="append",
                         help="field=v1,v2,... (fields: gamma, k_cl, dt, h); repeatable")
    p_sweep.add_argument("--out", help="output directory")
    p_sweep.set_defaults(func=cmd_sweep)

    p_val = sub.add_parser("validate", help="validate a scenario and exit")
    add_source_args(p_val, with_solver=False)
    p_val.set_defaults(func=cmd_validate)

    p_presets = sub.add_parser("presets", help="list bundled presets")
    p_presets.set_defaults(func=cmd_presets)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, ParseError, InfeasibleInitialEstimate) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except Diverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
