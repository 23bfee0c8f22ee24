"""Verification suites and their registry."""
from __future__ import annotations

from .basic import assumptions_report, efftime_report, orbit_report
from .hoelder import hoelder_probe
from .lap import lap_sweep, radiation_probe
from .oracles import resolvent_oracles
from .plan import GridOptions, SweepPlan, check, load_plan, plan_from_dict, validate
from .rellich import rellich_scan
from .report import ExperimentReport, Verdict, merge
from .scaling import high_energy_scaling
from .sommerfeld import sommerfeld_check


EXPERIMENTS = {
    "verify-assumptions": lambda plan, **kw: assumptions_report(plan.spec, **kw),
    "efftime": lambda plan, lams=None, **kw: efftime_report(plan.spec, **({"lams": lams} if lams else {}), **kw),
    "orbit": lambda plan, lams=None, **kw: orbit_report(plan.spec, seed=plan.seed,
                                                       **({"lams": lams} if lams else {}), **kw),
    "resolvent": lambda plan, **kw: resolvent_oracles(plan),
    "lap-sweep": lambda plan, **kw: lap_sweep(plan),
    "radiation": lambda plan, **kw: radiation_probe(plan),
    "hoelder": lambda plan, lam=1.0, **kw: hoelder_probe(plan, lam),
    "sommerfeld": lambda plan, **kw: sommerfeld_check(plan),
    "rellich": lambda plan, lams=None, **kw: rellich_scan(plan, **({"lams": lams} if lams else {})),
    "high-energy": lambda plan, **kw: high_energy_scaling(plan),
}


def run_experiment(name: str, plan: SweepPlan, **kw) -> ExperimentReport:
    """Run the experiment registered under ``name``."""
    try:
        fn = EXPERIMENTS[name]
    except KeyError:
        raise KeyError(f"unknown experiment {name!r}; known: {sorted(EXPERIMENTS)}") from None
    return fn(plan, **kw)


__all__ = [
    "EXPERIMENTS", "ExperimentReport", "GridOptions", "SweepPlan", "Verdict", "assumptions_report",
    "check", "efftime_report", "high_energy_scaling", "hoelder_probe", "lap_sweep", "load_plan",
    "merge", "orbit_report", "plan_from_dict", "radiation_probe", "rellich_scan", "resolvent_oracles",
    "run_experiment", "sommerfeld_check", "validate",
]
