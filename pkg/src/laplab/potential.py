"""Radial potential families ``V + q`` and a pointwise checker for the
slowly-decaying attractive class.

A :class:`PotentialSpec` is immutable.  Evaluation is vectorised over the
radius; every routine accepts scalars or arrays.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, asdict, replace
from pathlib import Path
from typing import Any

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import ConfigError, OutOfRangeError

FAMILIES = ("soft_power", "sum_of_soft_powers", "tabulated", "constant")
Q_FAMILIES = ("none", "soft_power_sr", "power")


def japanese(r):
    """``<r> = (1 + r^2)^{1/2}``."""
    return np.sqrt(1.0 + np.asarray(r, dtype=float) ** 2)


@dataclass(frozen=True)
class PotentialSpec:
    """Parametric radial potential ``V`` plus radial perturbation ``q``.

    Parameters
    ----------
    family : str
        One of ``soft_power`` (``V = -c0 <r>^-nu``), ``sum_of_soft_powers``
        (``terms = ((c_i, nu_i), ...)``), ``tabulated`` (``table = (r, V)``,
        monotone cubic interpolation) or ``constant`` (``V = -v0``, a test
        mode outside the decaying class).
    nu, eps, c_low, C_up, nu_prime, C_q : float
        Constants of the decay/virial/short-range bounds.
    q_params : dict
        ``{"family": "soft_power_sr" | "power" | "none", "C": .., "exponent": ..}``.
    well : tuple or None
        Optional Gaussian well ``(depth, width)`` added to ``V``; only used for
        negative-energy control experiments.
    h : float
        Scaling ``V_h(r) = h^2 V(h r)`` (same for ``q``).
    """

    family: str = "soft_power"
    nu: float = 1.0
    eps: float = 1.0
    c_low: float = 1.0
    C_up: float = 2.0
    nu_prime: float = 2.0
    C_q: float = 0.0
    q_params: dict = field(default_factory=lambda: {"family": "none"})
    dim: int = 3
    c0: float = 1.0
    terms: tuple = ()
    table: tuple | None = None
    v0: float = 0.0
    well: tuple | None = None
    h: float = 1.0
    name: str = ""
    _interp: Any = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown potential family {self.family!r}")
        if not (0.0 < self.nu < 2.0):
            raise ValueError(f"nu must lie in (0, 2), got {self.nu}")
        if not (0.0 < self.eps < 2.0):
            raise ValueError(f"eps must lie in (0, 2), got {self.eps}")
        if not (self.nu < self.nu_prime <= 2.0):
            raise ValueError(f"nu_prime must lie in (nu, 2], got {self.nu_prime}")
        if self.c_low <= 0 or self.C_up <= 0 or self.C_q < 0:
            raise ValueError("c_low, C_up must be positive and C_q non-negative")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        if self.h <= 0:
            raise ValueError("scale h must be positive")
        qf = self.q_params.get("family", "none")
        if qf not in Q_FAMILIES:
            raise ValueError(f"unknown q family {qf!r}")
        if self.family == "tabulated":
            if self.table is None:
                raise ValueError("tabulated family requires a table")
            rt = np.asarray(self.table[0], dtype=float)
            vt = np.asarray(self.table[1], dtype=float)
            if rt.ndim != 1 or rt.shape != vt.shape or np.any(np.diff(rt) <= 0):
                raise ValueError("table radii must be strictly increasing and match V")
            object.__setattr__(self, "_interp", PchipInterpolator(rt, vt, extrapolate=False))
        if self.family == "sum_of_soft_powers" and not self.terms:
            raise ValueError("sum_of_soft_powers requires terms")

    # -- convenience -------------------------------------------------------
    @property
    def has_q(self) -> bool:
        return self.q_params.get("family", "none") != "none"

    def rescaled(self, h: float) -> "PotentialSpec":
        """Spec of ``V_h(x) = h^2 V(h x)`` (composes with an existing scale)."""
        return replace(self, h=self.h * h, _interp=None)

    def without_q(self) -> "PotentialSpec":
        return replace(self, q_params={"family": "none"}, C_q=0.0, _interp=None)

    def with_dim(self, dim: int) -> "PotentialSpec":
        return replace(self, dim=dim, _interp=None)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("_interp", None)
        if d["table"] is not None:
            d["table"] = [list(map(float, d["table"][0])), list(map(float, d["table"][1]))]
        d["terms"] = [list(t) for t in d["terms"]]
        return d


def soft_power(c0=1.0, nu=1.0, eps=1.0, nu_prime=2.0, q=None, dim=3, **kw) -> PotentialSpec:
    """``V = -c0 <r>^-nu`` with closed-form constants filled in."""
    q = dict(q or {"family": "none"})
    C_q = kw.pop("C_q", _default_C_q(q, nu_prime))
    C_up = kw.pop("C_up", abs(c0) * max(1.0, nu * (nu + 1.0)))
    c_low = kw.pop("c_low", abs(c0) if c0 != 0 else 1.0)
    return PotentialSpec(family="soft_power", c0=c0, nu=nu, eps=eps, nu_prime=nu_prime,
                         q_params=q, C_q=C_q, C_up=C_up, c_low=c_low, dim=dim, **kw)


def _default_C_q(q: dict, nu_prime: float) -> float:
    fam = q.get("family", "none")
    if fam == "none":
        return 0.0
    return abs(float(q.get("C", 0.0)))


# -- evaluation -------------------------------------------------------------

def _base_V(spec: PotentialSpec, r: np.ndarray):
    """Unscaled ``V, V', V''`` at radii ``r`` (array)."""
    fam = spec.family
    if fam == "soft_power":
        terms = ((spec.c0, spec.nu),)
    elif fam == "sum_of_soft_powers":
        terms = tuple(spec.terms)
    else:
        terms = ()
    V = np.zeros_like(r)
    dV = np.zeros_like(r)
    d2V = np.zeros_like(r)
    s = 1.0 + r * r
    for c, n in terms:
        p = s ** (-n / 2.0)
        V -= c * p
        dV += c * n * r * p / s
        d2V += c * n * (1.0 - (n + 1.0) * r * r) * p / (s * s)
    if fam == "constant":
        V -= spec.v0
    elif fam == "tabulated":
        rt = spec._interp.x
        if np.any(r < rt[0]) or np.any(r > rt[-1]):
            bad = r[(r < rt[0]) | (r > rt[-1])]
            raise OutOfRangeError(
                f"radius {bad.flat[0]:.6g} outside table range [{rt[0]:.6g}, {rt[-1]:.6g}]")
        V = spec._interp(r)
        dV = spec._interp(r, 1)
        d2V = spec._interp(r, 2)
    if spec.well is not None:
        depth, width = spec.well
        g = depth * np.exp(-(r / width) ** 2)
        V -= g
        dV += 2.0 * r / width**2 * g
        d2V += (2.0 / width**2 - 4.0 * r * r / width**4) * g
    return V, dV, d2V


def _base_q(spec: PotentialSpec, r: np.ndarray):
    qp = spec.q_params
    fam = qp.get("family", "none")
    if fam == "none":
        z = np.zeros_like(r)
        return z, z.copy()
    C = float(qp.get("C", 0.0))
    if fam == "soft_power_sr":
        p = 1.0 + spec.nu_prime / 2.0
    else:
        p = float(qp.get("exponent", 1.0 + spec.nu_prime / 2.0))
    s = 1.0 + r * r
    q = C * s ** (-p / 2.0)
    dq = -C * p * r * s ** (-p / 2.0 - 1.0)
    return q, dq


def eval_potential(spec: PotentialSpec, r):
    """Return ``(V, dV/dr, d2V/dr2, q)`` at radius ``r`` (scalar or array).

    Raises
    ------
    OutOfRangeError
        For a tabulated family queried outside its table.
    """
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr < 0):
        raise ValueError("radius must be non-negative")
    h = spec.h
    x = np.atleast_1d(h * r_arr)
    V, dV, d2V = _base_V(spec, x)
    q, _ = _base_q(spec, x)
    out = (h * h * V, h**3 * dV, h**4 * d2V, h * h * q)
    if r_arr.ndim == 0:
        return tuple(float(o[0]) for o in out)
    return tuple(o.reshape(r_arr.shape) for o in out)


def eval_q_derivative(spec: PotentialSpec, r):
    """``dq/dr`` (used for WKB initialisation)."""
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    _, dq = _base_q(spec, spec.h * r_arr)
    return spec.h**3 * dq


# -- assumption checker -----------------------------------------------------

@dataclass
class InequalityRecord:
    ident: str
    group: str
    worst_margin: float
    worst_relative_margin: float
    worst_radius: float
    passed: bool
    fitted_constant: float


@dataclass
class AssumptionReport:
    records: list
    grid: dict
    fitted: dict
    tol_assume: float

    def group_passed(self, group: str) -> bool:
        return all(rec.passed for rec in self.records if rec.group == group)

    @property
    def groups(self) -> dict:
        return {g: self.group_passed(g) for g in ("i", "ii", "iii", "iv")}

    @property
    def passed(self) -> bool:
        return all(self.groups.values())

    def failed(self) -> list:
        return [rec.ident for rec in self.records if not rec.passed]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "groups": self.groups,
            "records": [asdict(r) for r in self.records],
            "grid": self.grid,
            "fitted": self.fitted,
            "tol_assume": self.tol_assume,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), indent=kw.pop("indent", 2), **kw)


def _record(ident, group, r, lhs, rhs, fitted, tol):
    """Record for ``lhs <= rhs`` sampled on ``r``; tolerance is relative to the local scale."""
    margin = rhs - lhs
    scale = np.maximum(np.abs(rhs), np.abs(lhs))
    scale = np.where(scale > 0, scale, 1e-300)
    rel = margin / scale
    i = int(np.argmin(rel))
    return InequalityRecord(ident, group, float(margin[i]), float(rel[i]), float(r[i]),
                            bool(rel[i] >= -tol), float(fitted))


def verify_assumptions(spec: PotentialSpec, grid, tol_assume: float = 1e-12) -> AssumptionReport:
    """Check every inequality of the slowly-decaying attractive class on ``grid``.

    Radial reduction: ``|d^a V|`` for ``|a| = 2`` is bounded through the
    Hessian operator norm ``max(|V''|, |V'|/r)`` (exact for radial ``V``);
    below ``r = 0.1`` the ratio ``V'/r`` is replaced by its limit ``V''(0)``.
    Failures are reported, never raised.
    """
    r = np.asarray(getattr(grid, "nodes", grid), dtype=float)
    if r.size < 1000:
        raise ValueError("verify_assumptions needs a grid with at least 1000 points")
    V, dV, d2V, q = eval_potential(spec, r)
    jr = japanese(r)
    nu, C = spec.nu, spec.C_up
    with np.errstate(divide="ignore", invalid="ignore"):
        dV_over_r = np.where(r >= 0.1, np.abs(dV) / np.where(r > 0, r, 1.0), np.nan)
    small = r < 0.1
    if np.any(small):
        _, _, d2V0, _ = eval_potential(spec, np.zeros(1))
        # V'(r)/r -> V''(0) for smooth radial V
        ratio_small = np.abs(dV[small]) / np.where(r[small] > 0, r[small], 1.0)
        ratio_small = np.where(r[small] > 0, ratio_small, np.abs(d2V0[0]))
        dV_over_r[small] = ratio_small
    hess = np.maximum(np.abs(d2V), dV_over_r)

    recs = []
    b0, b1, b2 = jr ** (-nu), jr ** (-nu - 1), jr ** (-nu - 2)
    recs.append(_record("i.alpha0", "i", r, np.abs(V), C * b0, np.max(np.abs(V) / b0), tol_assume))
    recs.append(_record("i.alpha1", "i", r, np.abs(dV), C * b1, np.max(np.abs(dV) / b1), tol_assume))
    recs.append(_record("i.alpha2", "i", r, hess, C * b2, np.max(hess / b2), tol_assume))
    recs.append(_record("ii.lower", "ii", r, V, -spec.c_low * b0, np.min(-V / b0), tol_assume))
    lhs3 = r * dV
    rhs3 = -(2.0 - spec.eps) * V
    with np.errstate(divide="ignore", invalid="ignore"):
        virial = np.where(V < 0, lhs3 / np.where(V < 0, -V, 1.0), np.inf)
    recs.append(_record("iii.virial", "iii", r, lhs3, rhs3, 2.0 - np.max(virial), tol_assume))
    bq = jr ** (-1.0 - spec.nu_prime / 2.0)
    recs.append(_record("iv.short_range", "iv", r, np.abs(q), spec.C_q * bq, np.max(np.abs(q) / bq), tol_assume))


    fitted = {
        "C_up": max(recs[0].fitted_constant, recs[1].fitted_constant, recs[2].fitted_constant),
        "c_low": recs[3].fitted_constant,
        "eps": recs[4].fitted_constant,
        "C_q": recs[5].fitted_constant,
    }
    grid_info = {"r_min": float(r[0]), "r_max": float(r[-1]), "n": int(r.size)}
    return AssumptionReport(recs, grid_info, fitted, tol_assume)


# -- presets ----------------------------------------------------------------

def spec_from_dict(cfg: dict) -> PotentialSpec:
    """Build a spec from the JSON preset schema."""
    cfg = dict(cfg)
    fam = cfg.pop("family", "soft_power")
    # ``q`` in presets, ``q_params`` in ``PotentialSpec.to_dict`` output
    q = cfg.pop("q", None) or cfg.pop("q_params", None) or {"family": "none"}
    name = cfg.pop("name", "")
    dim = int(cfg.pop("dim", 3))
    h = float(cfg.pop("h", 1.0))
    if cfg.get("table") is not None and "r" not in cfg:
        cfg["r"], cfg["V"] = cfg.pop("table")
    spec = _spec_from_family(fam, cfg, q, name, dim)
    return spec if h == 1.0 else spec.rescaled(h)


def _spec_from_family(fam: str, cfg: dict, q: dict, name: str, dim: int) -> PotentialSpec:
    try:
        if fam == "soft_power":
            return soft_power(c0=float(cfg.pop("c0", 1.0)), nu=float(cfg.pop("nu", 1.0)),
                              eps=float(cfg.pop("eps", 1.0)),
                              nu_prime=float(cfg.pop("nu_prime", 2.0)), q=q, dim=dim,
                              name=name, **_known(cfg))
        if fam == "sum_of_soft_powers":
            terms = tuple((float(c), float(n)) for c, n in cfg.pop("terms"))
            nu = min(n for _, n in terms)
            cfg.setdefault("C_up", sum(abs(c) * max(1.0, n * (n + 1)) for c, n in terms))
            cfg.setdefault("c_low", sum(c for c, _ in terms))
            cfg.setdefault("nu", nu)
            cfg.setdefault("C_q", _default_C_q(q, cfg.get("nu_prime", 2.0)))
            return PotentialSpec(family=fam, terms=terms, q_params=q, dim=dim, name=name,
                                 **_known(cfg))
        if fam == "tabulated":
            r, V = cfg.pop("r"), cfg.pop("V")
            cfg.setdefault("C_q", _default_C_q(q, cfg.get("nu_prime", 2.0)))
            return PotentialSpec(family=fam, table=(tuple(r), tuple(V)), q_params=q, dim=dim,
                                 name=name, **_known(cfg))
        if fam == "constant":
            return PotentialSpec(family=fam, v0=float(cfg.pop("v0")), q_params=q, dim=dim,
                                 name=name, **_known(cfg))
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"bad potential preset: {exc}") from exc
    raise ConfigError(f"unknown potential family {fam!r}")


def _known(cfg: dict) -> dict:
    keep = {}
    for k in ("nu", "eps", "c_low", "C_up", "nu_prime", "C_q"):
        if k in cfg:
            keep[k] = float(cfg[k])
    if "well" in cfg and cfg["well"] is not None:
        keep["well"] = tuple(float(x) for x in cfg["well"])
    return keep


def load_preset(path) -> PotentialSpec:
    """Load a potential preset JSON file."""
    text = Path(path).read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return spec_from_dict(cfg)


def preset_dir() -> Path:
    return Path(__file__).parent / "presets"


def list_presets(directory=None) -> dict:
    """Catalog ``{name: path}`` of the JSON presets in ``directory``."""
    d = Path(directory) if directory is not None else preset_dir()
    if not d.is_dir():
        return {}
    return {p.stem: p for p in sorted(d.glob("*.json"))}
