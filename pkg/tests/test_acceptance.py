"""Acceptance criteria 1-10, one test each.

Every test prints ``criterion N: PASS`` or ``criterion N: FAIL`` with the
measured value; the lines are repeated in the terminal summary.  Run
directly (``python3 tests/test_acceptance.py``) to get only the table.
"""
import json
import time
from pathlib import Path

import pytest

from laplab.experiments import (SweepPlan, assumptions_report, efftime_report, high_energy_scaling,
                                hoelder_probe, lap_sweep, orbit_report, radiation_probe,
                                rellich_scan, resolvent_oracles, sommerfeld_check)
from laplab.experiments.common import default_jobs
from laplab.experiments.plan import resolve_preset
from laplab.potential import list_presets, load_preset

RESULTS: dict = {}


def record(n: int, passed: bool, detail: str) -> bool:
    line = f"criterion {n}: {'PASS' if passed else 'FAIL'} ({detail})"
    RESULTS[n] = line
    print(line)
    return passed


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def failed(rep) -> str:
    bad = [v.name for v in rep.verdicts if not v.passed]
    return "failed: " + ", ".join(bad) if bad else "all verdicts pass"


@pytest.fixture(scope="module")
def plan():
    return SweepPlan(spec=resolve_preset("soft_power"), jobs=default_jobs())


def test_criterion_1_assumption_verifier():
    t0 = time.perf_counter()
    ok, notes = True, []
    for name, path in sorted(list_presets().items()):
        path = Path(path)
        spec = load_preset(path)
        expect = json.loads(path.read_text()).get("expect_fail")
        rep = assumptions_report(spec)
        groups = {v.name.rsplit("_", 1)[1]: v.passed for v in rep.verdicts}
        if expect is None:
            good = all(groups.values())
        else:
            good = not groups[expect]
        ok &= good
        notes.append(f"{name}:{'ok' if good else 'wrong'}")
    dt = time.perf_counter() - t0
    assert record(1, ok and dt < 1.0, f"{' '.join(notes)}; {dt:.2f} s < 1 s")


def test_criterion_2_effective_time_bounds(plan):
    rep, dt = timed(efftime_report, plan.spec, lams=(0.0, 0.1, 1.0, 4.0), r_max=1e4)
    worst = min(v.value for v in rep.verdicts)
    assert record(2, rep.passed and dt < 10.0,
                  f"{len(rep.verdicts)} bounds, worst margin x{worst:.3g}; {dt:.1f} s < 10 s")


def test_criterion_3_classical_escape(plan):
    rep, dt = timed(orbit_report, plan.spec, lams=(0.0, 0.5, 2.0), n_orbits=100)
    worst = min(v.value for v in rep.verdicts)
    assert record(3, rep.passed and dt < 60.0, f"min margin {worst:.2e} >= -1e-6; {dt:.1f} s < 60 s")


def test_criterion_4_resolvent_oracles(plan):
    rep, dt = timed(resolvent_oracles, plan)
    vals = ", ".join(f"{v.name}={v.value:.1e}" for v in rep.verdicts)
    assert record(4, rep.passed and dt < 300.0, f"{vals}; {dt:.0f} s < 300 s")


def test_criterion_5_limiting_absorption(plan):
    rep, dt = timed(lap_sweep, plan)
    bounded = max(v.value for v in rep.verdicts if v.name.startswith("lap_bounded"))
    contrast = next(v.value for v in rep.verdicts if v.name == "lap_contrast_lambda=1.0")
    assert record(5, rep.passed and dt < 300.0,
                  f"max variation x{bounded:.2f} <= 3, L2 growth at lambda=1 x{contrast:.1f} >= 10; "
                  f"{dt:.0f} s < 300 s")


def test_criterion_6_radiation(plan):
    rep = radiation_probe(plan)
    assert record(6, rep.passed, failed(rep))


def test_criterion_7_hoelder(plan):
    rep = hoelder_probe(plan, 1.0)
    vals = ", ".join(f"{v.name}={v.value:.3f}" for v in rep.verdicts)
    assert record(7, rep.passed, f"{vals} (target >= 0.20)")


def test_criterion_8_sommerfeld(plan):
    rep = sommerfeld_check(plan, lams=(0.5, 1.0, 2.0))
    vals = ", ".join(f"{v.name}={v.value:.1e}" for v in rep.verdicts if v.value is not None)
    assert record(8, rep.passed, vals)


def test_criterion_9_rellich(plan):
    rep = rellich_scan(plan)
    assert plan.spec.has_q and plan.lmax == 8
    vals = ", ".join(f"{v.name}={v.value:.2e}" for v in rep.verdicts)
    assert record(9, rep.passed, vals)


def test_criterion_10_high_energy_scaling(plan):
    rep = high_energy_scaling(plan)
    vals = ", ".join(f"{v.name}={v.value:.3g}" for v in rep.verdicts)
    assert record(10, rep.passed, vals)


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
