"""Absence of non-negative eigenvalues, with a bound-state control."""
from __future__ import annotations

import numpy as np

from ..grid import RadialGrid
from ..potential import soft_power
from ..radial.jost import (TAIL_THRESHOLD, bound_state_energy, default_scan_grid, jost_scan,
                           shooting_energy, tail_ratio)
from .common import run_pool
from .plan import SweepPlan, check
from .report import ExperimentReport

DEFAULT_LAMS = tuple(np.linspace(0.0, 4.0, 41))
CONTROL_WELL = (4.0, 1.0)
CONTROL_BRACKET = (-3.9, -0.01)
CONTROL_RADIUS = 10.0  # e^{2 kappa R} amplification of rounding must stay below 1/threshold
ENERGY_TOL = 1e-3


def _scan(spec, ell, lams, label):
    grid = default_scan_grid(spec, lams)
    rep = jost_scan(spec, ell, lams, grid)
    return {"potential": label, "ell": ell, "min_ratio": rep.min_ratio,
            "argmin_lambda": lams[int(np.argmin(rep.ratios))], "passed": rep.passed}


def control_well(spec_dim: int = 3) -> dict:
    """Detector check on a deep Gaussian well with a known negative eigenvalue."""
    w = soft_power(well=CONTROL_WELL, dim=spec_dim)
    grid = RadialGrid.for_wavenumber(3.0, CONTROL_RADIUS, dim=spec_dim, kh=0.05)
    e_ref = shooting_energy(w, 0, CONTROL_BRACKET)
    e_det = bound_state_energy(w, 0, CONTROL_BRACKET, grid, xtol=1e-15)
    return {"E_shooting": e_ref, "E_detector": e_det,
            "ratio_at_E": tail_ratio(w, 0, e_ref, grid),
            "ratio_off_E": min(tail_ratio(w, 0, e_ref + d, grid) for d in (-ENERGY_TOL, ENERGY_TOL))}


def rellich_scan(plan: SweepPlan, lams=DEFAULT_LAMS) -> ExperimentReport:
    """Jost scan over ``l <= lmax`` and ``lam`` for the potential with and without ``q``."""
    check(plan)
    lams = [float(l) for l in lams]
    specs = [("with_q", plan.spec), ("without_q", plan.spec.without_q())] if plan.spec.has_q \
        else [("without_q", plan.spec)]
    rep = ExperimentReport("rellich", meta={"plan": plan.to_dict(), "lambdas": lams,
                                            "threshold": TAIL_THRESHOLD})
    tasks = [(spec, ell, lams, label) for label, spec in specs for ell in range(plan.lmax + 1)]
    for rec in run_pool(_scan, tasks, plan.jobs):
        rep.add(**rec)
    for label, _ in specs:
        rows = [r for r in rep.records if r["potential"] == label]
        mn = min(r["min_ratio"] for r in rows)
        rep.verdict(f"no_L2_solution_{label}", "no eigenvalue in [0, inf): u_reg does not decay",
                    mn >= TAIL_THRESHOLD, mn, TAIL_THRESHOLD)
    ctl = control_well()
    rep.meta["control"] = ctl
    err = abs(ctl["E_detector"] - ctl["E_shooting"])
    fired = ctl["ratio_at_E"] < TAIL_THRESHOLD
    rep.verdict("control_well_detected", "detector fires at a known negative eigenvalue",
                fired and err <= ENERGY_TOL, err, ENERGY_TOL,
                detail=f"tail ratio at E: {ctl['ratio_at_E']:.3g}")
    return rep
