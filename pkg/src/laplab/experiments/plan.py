"""Sweep plans: what to run, on which grid, with which sources."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from ..efftime import SpectralParam, beta_c, efftime_tables
from ..errors import ConfigError, PlanError
from ..potential import PotentialSpec, load_preset, preset_dir, spec_from_dict


@dataclass(frozen=True)
class GridOptions:
    r_max: float = 512.0
    ratio: float = 1.005
    kh: float = 0.08


@dataclass(frozen=True)
class SweepPlan:
    """Parameters shared by the experiment runners.

    ``lams`` and ``mus`` span the sweep; ``(lam, mu)`` must lie in the sector
    ``{0 < |z| < rho, 0 < +-arg z < omega}`` (``mu = 0`` points are boundary
    values).  ``betas`` must stay below the critical exponent.
    """

    spec: PotentialSpec
    lams: tuple = (0.0, 0.5, 1.0, 2.0)
    mus: tuple = (1e-1, 1e-2, 1e-3, 1e-4)
    sign: str = "+"
    shells: tuple = (2, 3, 4)
    ells: tuple = (0, 1, 2)
    gaussian: bool = True
    betas: tuple = ()
    hoelder_s: float = 1.0
    hoelder_gamma: float = 0.25
    hoelder_j: tuple = tuple(range(1, 9))
    m_range: tuple = tuple(range(0, 6))
    aperture: float = 0.5
    rho: float = 5.0
    omega: float = 3.0
    grid: GridOptions = field(default_factory=GridOptions)
    lmax: int = 8
    tol: float | None = None
    seed: int = 0
    jobs: int = 1

    def points(self):
        return [SpectralParam(l, m, self.sign) for l in self.lams for m in self.mus]

    def with_overrides(self, **kw) -> "SweepPlan":
        g = {k: kw.pop(k) for k in ("r_max", "ratio", "kh") if k in kw and kw[k] is not None}
        kw = {k: v for k, v in kw.items() if v is not None}
        plan = replace(self, **kw)
        if g:
            plan = replace(plan, grid=replace(plan.grid, **g))
        return plan

    def to_dict(self) -> dict:
        d = asdict(self)
        d["spec"] = self.spec.to_dict()
        return d


def _beta_critical(spec: PotentialSpec, rho: float) -> float:
    lams = np.linspace(0.0, rho, 5)
    return beta_c(spec, rho, efftime_tables(spec, lams)).value


def validate(plan: SweepPlan) -> list:
    """All precondition diagnostics of ``plan`` (empty when valid); no solves are run."""
    out = []
    if plan.sign not in ("+", "-"):
        out.append(f"sign must be '+' or '-', got {plan.sign!r}")
    for lam in plan.lams:
        if lam < 0:
            out.append(f"lambda={lam} < 0: the sweep covers the continuous spectrum only")
        for mu in plan.mus:
            if mu < 0:
                out.append(f"mu={mu} < 0")
                continue
            try:
                zp = SpectralParam(lam, mu, plan.sign if plan.sign in "+-" else "+")
            except Exception as exc:  # DomainError
                out.append(f"(lambda={lam}, mu={mu}): {exc}")
                continue
            if not zp.in_region(plan.rho, plan.omega):
                out.append(f"(lambda={lam}, mu={mu}) lies outside the sector "
                           f"(rho={plan.rho}, omega={plan.omega})")
    if plan.betas:
        bc = _beta_critical(plan.spec, plan.rho)
        for b in plan.betas:
            if not (0 <= b < bc):
                out.append(f"beta={b} violates 0 <= beta < beta_c={bc:.6g}")
    if plan.hoelder_s <= 0.5:
        out.append(f"hoelder s={plan.hoelder_s} must exceed 1/2")
    if plan.grid.r_max <= 0 or plan.grid.ratio <= 1 or plan.grid.kh <= 0:
        out.append("grid options need r_max > 0, ratio > 1, kh > 0")
    if plan.lmax < 0 or (plan.spec.dim == 1 and plan.lmax > 1):
        out.append(f"lmax={plan.lmax} invalid for d={plan.spec.dim}")
    if any(l > plan.lmax for l in plan.ells):
        out.append(f"source sectors {plan.ells} exceed lmax={plan.lmax}")
    if plan.aperture <= 0:
        out.append("aperture b must be positive")
    if plan.jobs < 1:
        out.append("jobs must be >= 1")
    return out


def check(plan: SweepPlan) -> SweepPlan:
    problems = validate(plan)
    if problems:
        raise PlanError("; ".join(problems))
    return plan


_PLAN_KEYS = {"lambdas": "lams", "mus": "mus", "sign": "sign", "shells": "shells", "ells": "ells",
              "gaussian": "gaussian", "betas": "betas", "hoelder_s": "hoelder_s",
              "hoelder_gamma": "hoelder_gamma", "hoelder_j": "hoelder_j", "m_range": "m_range",
              "aperture": "aperture", "rho": "rho", "omega": "omega", "lmax": "lmax", "tol": "tol",
              "seed": "seed", "jobs": "jobs"}


def plan_from_dict(cfg: dict, base_dir: Path | None = None) -> SweepPlan:
    """Plan from JSON data: ``potential`` (inline) or ``preset`` (file name or path)."""
    cfg = dict(cfg)
    if "potential" in cfg:
        spec = spec_from_dict(cfg.pop("potential"))
    elif "preset" in cfg:
        spec = resolve_preset(cfg.pop("preset"), base_dir)
    else:
        raise ConfigError("plan needs a 'potential' object or a 'preset' reference")
    kw = {}
    for key, attr in _PLAN_KEYS.items():
        if key in cfg:
            v = cfg.pop(key)
            kw[attr] = tuple(v) if isinstance(v, list) else v
    grid = GridOptions(**cfg.pop("grid", {}))
    if cfg:
        raise ConfigError(f"unknown plan keys: {sorted(cfg)}")
    return SweepPlan(spec=spec, grid=grid, **kw)


def resolve_preset(ref, base_dir: Path | None = None) -> PotentialSpec:
    p = Path(ref)
    candidates = [p] if p.is_absolute() else [Path.cwd() / p]
    if base_dir is not None:
        candidates.append(Path(base_dir) / p)
    candidates.append(preset_dir() / p)
    candidates.append(preset_dir() / (p.name if p.suffix else p.name + ".json"))
    for c in candidates:
        if c.is_file():
            return load_preset(c)
    raise ConfigError(f"preset {ref!r} not found")


def load_plan(path) -> SweepPlan:
    path = Path(path)
    try:
        cfg = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return plan_from_dict(cfg, path.parent)
