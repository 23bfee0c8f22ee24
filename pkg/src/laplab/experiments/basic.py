"""Reports for the potential class, the effective time and the classical escape estimate."""
from __future__ import annotations

from dataclasses import asdict

import numpy as np

from ..classical import check_escape_inequality
from ..efftime import beta_c, build_efftime, check_tau_S_bounds, default_table_grid, efftime_tables
from ..potential import PotentialSpec, verify_assumptions
from .report import ExperimentReport

RATIO_BOUNDS = (1e-3, 1e3)
EFFTIME_LAMS = (0.0, 0.1, 1.0, 4.0)
ORBIT_LAMS = (0.0, 0.5, 2.0)
ESCAPE_TOL = 1e-6


def assumption_grid(r_max: float = 1e4, n: int = 4000) -> np.ndarray:
    return np.concatenate([[0.0], np.geomspace(1e-3, r_max, n)])


def assumptions_report(spec: PotentialSpec, r_max: float = 1e4, tol: float = 1e-12) -> ExperimentReport:
    """One verdict per inequality group of the potential class."""
    ar = verify_assumptions(spec, assumption_grid(r_max), tol)
    rep = ExperimentReport("verify-assumptions", meta={"spec": spec.to_dict(), "grid": ar.grid,
                                                       "fitted": ar.fitted, "tol": tol})
    for rec in ar.records:
        rep.add(**asdict(rec))
    names = {"i": "symbol bounds |d^a V| <= C <r>^{-nu-|a|}", "ii": "attraction V <= -c <r>^-nu",
             "iii": "virial r V' <= -(2 - eps) V", "iv": "short range |q| <= C <r>^{-1-nu'/2}"}
    for g, ok in ar.groups.items():
        worst = min(r.worst_relative_margin for r in ar.records if r.group == g)
        rep.verdict(f"assumption_group_{g}", names[g], ok, worst, -tol)
    return rep


def efftime_report(spec: PotentialSpec, lams=EFFTIME_LAMS, r_max: float = 1e4,
                   rho: float = 5.0) -> ExperimentReport:
    """Two-sided bounds on ``tau`` and ``S`` over ``(0, r_max]`` plus the critical exponent."""
    grid = default_table_grid(r_max=r_max, dim=spec.dim)
    spec0 = spec.without_q()
    tau0 = build_efftime(spec0, 0.0, grid)
    rep = ExperimentReport("efftime", meta={"spec": spec.to_dict(), "r_max": r_max,
                                            "bounds": list(RATIO_BOUNDS)})
    lo, hi = RATIO_BOUNDS
    for lam in lams:
        table = tau0 if lam == 0 else build_efftime(spec0, lam, grid)
        fams = check_tau_S_bounds(table, tau0)
        for name, v in fams.items():
            rep.add(**{"lambda": lam, "family": name, **v})
            if not v["applicable"]:
                continue
            ok = lo <= v["min"] and v["max"] <= hi
            worst = min(v["min"] / lo, hi / v["max"])
            rep.verdict(f"{name}_lambda={lam}", "two-sided bounds on tau and S", ok, worst, 1.0)
    bc = beta_c(spec, rho, efftime_tables(spec0, np.linspace(0.0, rho, 5), grid))
    rep.meta["beta_c"] = bc.to_dict()
    return rep


def orbit_report(spec: PotentialSpec, lams=ORBIT_LAMS, n_orbits: int = 100, seed: int = 0,
                 t_end: float = 200.0, tol: float = ESCAPE_TOL) -> ExperimentReport:
    """Escape inequality and convexity of ``tau`` along random outgoing orbits.

    Records hold one row per orbit; per-energy summaries go to ``meta``.
    """
    rep = ExperimentReport("orbit", meta={"spec": spec.to_dict(), "n_orbits": n_orbits, "seed": seed,
                                          "t_end": t_end, "summaries": []})
    for i, lam in enumerate(lams):
        er = check_escape_inequality(spec, lam, n_orbits, seed=seed + i, t_end=t_end, tol=tol)
        rep.meta["summaries"].append(er.to_dict())
        for k, (m, d2) in enumerate(zip(er.orbit_margins, er.orbit_d2tau)):
            rep.add(**{"lambda": er.lam, "orbit": k, "min_margin": m, "min_d2tau": d2})
        rep.verdict(f"escape_margin_lambda={lam}", "tau(x(t)) >= tau(x(0)) + a^-1 p_r(0) t",
                    er.min_margin >= -tol, er.min_margin, -tol)
        rep.verdict(f"tau_convex_lambda={lam}", "d^2/dt^2 tau(x(t)) >= 0", er.min_d2tau >= -tol,
                    er.min_d2tau, -tol)
    return rep
