"""``lap-lab``: run a verification experiment and write its report.

Exit codes: 0 when every verdict passes, 1 on a failed verdict, 2 on a
configuration or plan error, 3 on a numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, LapLabError, PlanError
from .experiments import EXPERIMENTS, SweepPlan, load_plan, merge, run_experiment
from .experiments.common import default_jobs
from .experiments.plan import resolve_preset
from .experiments.plan import validate as validate_plan
from .potential import list_presets

EXIT_PASS, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_PRESET = "soft_power"
DEFAULT_OUT = "lap-lab-out"
OUT_ENV = "LAPLAB_OUT"


@dataclass
class RunConfig:
    """Everything a run needs: experiment, potential, plan file, overrides and output directory."""

    experiment: str
    preset: str | None = DEFAULT_PRESET
    plan: str | None = None
    out: Path = Path(DEFAULT_OUT)
    overrides: dict = field(default_factory=dict)
    lams: tuple | None = None
    n_orbits: int | None = None


def _floats(text: str) -> tuple:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def build_plan(cfg: RunConfig) -> SweepPlan:
    """Plan for ``cfg``; raises ``ConfigError`` for unreadable or unknown inputs."""
    if cfg.plan is not None:
        if not Path(cfg.plan).is_file():
            raise ConfigError(f"plan file {cfg.plan!r} does not exist")
        plan = load_plan(cfg.plan)
        if cfg.preset is not None and cfg.preset != DEFAULT_PRESET:
            plan = plan.with_overrides(spec=resolve_preset(cfg.preset))
    else:
        plan = SweepPlan(spec=resolve_preset(cfg.preset or DEFAULT_PRESET))
    ov = dict(cfg.overrides)
    if cfg.lams is not None:
        ov["lams"] = cfg.lams
    return plan.with_overrides(**ov)


def diagnose(cfg: RunConfig) -> tuple[SweepPlan | None, list]:
    """``(plan, problems)``: every precondition check, no solves."""
    if cfg.experiment not in EXPERIMENTS:
        return None, [f"unknown experiment {cfg.experiment!r}; known: {sorted(EXPERIMENTS)}"]
    try:
        plan = build_plan(cfg)
    except LapLabError as exc:
        return None, [str(exc)]
    problems = [f"plan invariant violated: {p}" for p in validate_plan(plan)]
    if cfg.n_orbits is not None and cfg.n_orbits < 1:
        problems.append("--n must be >= 1")
    return plan, problems


def _execute(cfg: RunConfig, plan: SweepPlan):
    name = cfg.experiment
    kw = {}
    if name == "verify-assumptions" and plan.tol is not None:
        kw["tol"] = plan.tol
    if name in ("efftime", "orbit", "rellich") and cfg.lams is not None:
        kw["lams"] = cfg.lams
    if name == "orbit":
        if cfg.n_orbits is not None:
            kw["n_orbits"] = cfg.n_orbits
        if plan.tol is not None:
            kw["tol"] = plan.tol
    if name == "hoelder" and cfg.lams is not None:
        reps = [run_experiment(name, plan, lam=lam) for lam in cfg.lams]
        return reps[0] if len(reps) == 1 else merge(name, reps)
    return run_experiment(name, plan, **kw)


def run(cfg: RunConfig, stream=None) -> int:
    """Run ``cfg``, write ``<experiment>.{json,csv,schema.json,txt}`` and return the exit code."""
    stream = stream or sys.stdout
    plan, problems = diagnose(cfg)
    if problems:
        for p in problems:
            print(f"error: {p}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            report = _execute(cfg, plan)
    except (ConfigError, PlanError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (LapLabError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    paths = report.write(cfg.out)
    print(report.summary(), file=stream)
    print(f"wrote {', '.join(str(p) for p in paths.values())}", file=stream)
    return EXIT_PASS if report.passed else EXIT_FAIL


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", default=None, help="preset name or JSON path (default soft_power)")
    p.add_argument("--plan", default=None, help="JSON sweep plan")
    p.add_argument("--out", default=DEFAULT_OUT, help=f"output directory (env {OUT_ENV} overrides)")
    p.add_argument("--grid-rmax", type=float, default=None, help="outer radius of the solver grid")
    p.add_argument("--grid-ratio", type=float, default=None, help="geometric growth of the grid step")
    p.add_argument("--lmax", type=int, default=None, help="largest angular momentum sector")
    p.add_argument("--tol", type=float, default=None, help="tolerance override")
    p.add_argument("--jobs", type=int, default=default_jobs(), help="worker processes (default: all cores)")
    p.add_argument("--seed", type=int, default=None, help="random seed")
    p.add_argument("--lambda", dest="lams", type=_floats, default=None, help="energies, comma separated")
    p.add_argument("--mu", dest="mus", type=_floats, default=None, help="imaginary parts, comma separated")
    p.add_argument("--beta", dest="betas", type=_floats, default=None, help="radiation weights")
    p.add_argument("--n", dest="n_orbits", type=int, default=None, help="orbits per energy")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lap-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        _common(sub.add_parser(name, help=f"run the {name} experiment"))
    v = sub.add_parser("validate", help="check a configuration without running solves")
    v.add_argument("--experiment", default="lap-sweep", choices=sorted(EXPERIMENTS))
    _common(v)
    ls = sub.add_parser("list-presets", help="list the potential presets")
    ls.add_argument("--preset-dir", default=None, help="directory to scan (default: shipped presets)")
    return parser


def config_from_args(args: argparse.Namespace, experiment: str) -> RunConfig:
    out = os.environ.get(OUT_ENV) or args.out
    overrides = {"r_max": args.grid_rmax, "ratio": args.grid_ratio, "lmax": args.lmax, "tol": args.tol,
                 "jobs": args.jobs, "seed": args.seed, "mus": args.mus, "betas": args.betas}
    return RunConfig(experiment=experiment, preset=args.preset if args.preset else
                     (None if args.plan else DEFAULT_PRESET),
                     plan=args.plan, out=Path(out), overrides=overrides, lams=args.lams,
                     n_orbits=args.n_orbits)


def _list_presets(directory, stream) -> int:
    catalog = list_presets(directory)
    rows = {}
    for name, path in catalog.items():
        try:
            data = json.loads(Path(path).read_text())
            rows[name] = {"path": str(path), "description": data.get("description", ""),
                          "expect_fail": data.get("expect_fail")}
        except json.JSONDecodeError as exc:
            rows[name] = {"path": str(path), "error": f"line {exc.lineno} column {exc.colno}: {exc.msg}"}
    print(json.dumps(rows, indent=2, sort_keys=True), file=stream)
    return EXIT_PASS


def main(argv=None, stream=None) -> int:
    stream = stream or sys.stdout
    args = make_parser().parse_args(argv)
    if args.command == "list-presets":
        return _list_presets(args.preset_dir, stream)
    if args.command == "validate":
        _, problems = diagnose(config_from_args(args, args.experiment))
        for p in problems:
            print(p, file=stream)
        print("valid" if not problems else f"{len(problems)} problem(s)", file=stream)
        return EXIT_PASS if not problems else EXIT_CONFIG
    return run(config_from_args(args, args.command), stream)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
