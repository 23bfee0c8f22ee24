import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from laplab import RadialGrid, SpectralParam, soft_power
from laplab.errors import ConfigError, PlanError
from laplab.experiments import ExperimentReport, SweepPlan, check, load_plan, merge, plan_from_dict, validate
from laplab.experiments.common import fit_slope, growth, node_cut, run_pool, spread
from laplab.experiments.hoelder import TauWeight, _grid_mass, tail_difference_mass
from laplab.experiments.lap import decreasing_tail, radiation_residual
from laplab.experiments.scaling import dilate
from laplab.experiments.sommerfeld import extrapolate_to_zero
from laplab.experiments.sources import (bump, bump_field, shell_interval_radius, source_family)
from laplab.norms import decompose_radius, norm_Bstar
from laplab.radial import apply_resolvent


@pytest.fixture(scope="module")
def grid():
    return RadialGrid.for_wavenumber(2.0, 40.0)


# -- sources ----------------------------------------------------------------

@given(st.floats(0.05, 0.95), st.integers(3, 8))
def test_bump_derivatives_match_finite_differences(x, k):
    a, b, h = 1.0, 3.0, 1e-5
    r = a + x * (b - a)
    f = lambda s: bump(np.array([s]), a, b, k)[0][0]
    _, df, d2f = bump(np.array([r]), a, b, k)
    assert df[0] == pytest.approx((f(r + h) - f(r - h)) / (2 * h), rel=1e-5, abs=1e-8)
    assert d2f[0] == pytest.approx((f(r + h) - 2 * f(r) + f(r - h)) / h**2, rel=1e-3, abs=1e-4)


def test_bump_support_and_peak():
    f, df, _ = bump(np.array([0.5, 1.0, 2.0, 3.0, 3.5]), 1.0, 3.0)
    np.testing.assert_array_equal(f[[0, 1, 3, 4]], 0.0)
    assert f[2] == 1.0 and df[2] == 0.0


def test_bump_rejects_rough_profiles():
    with pytest.raises(ValueError):
        bump(np.array([1.0]), 0.0, 2.0, power=2)


def test_source_family_labels(grid):
    fam = source_family(grid, shells=(2, 3), ells=(0, 1))
    assert set(fam) == {"bump_n2_l0", "bump_n2_l1", "bump_n3_l0", "bump_n3_l1", "gaussian_l0"}
    fam1 = source_family(RadialGrid.for_wavenumber(2.0, 40.0, dim=1), shells=(2,), ells=(0, 1, 2))
    assert set(fam1) == {"bump_n2_l0", "bump_n2_l1"}


def test_source_family_drops_bumps_outside_grid():
    small = RadialGrid.for_wavenumber(2.0, 5.0)
    assert "bump_n4_l0" not in source_family(small, shells=(2, 4), ells=(0,))


def test_shell_interval_radius_is_dyadic():
    assert shell_interval_radius(3) == (4.0, 8.0)
    assert shell_interval_radius(3, 2) == (1.0, 2.0)


# -- plan -------------------------------------------------------------------

def test_default_plan_is_valid():
    assert validate(SweepPlan(spec=soft_power())) == []


@pytest.mark.parametrize("kw, needle", [
    ({"lams": (-1.0,)}, "lambda=-1.0"),
    ({"lams": (10.0,)}, "outside the sector"),
    ({"betas": (0.9,)}, "beta=0.9"),
    ({"ells": (0, 9)}, "exceed lmax"),
    ({"jobs": 0}, "jobs"),
    ({"sign": "x"}, "sign"),
    ({"hoelder_s": 0.4}, "hoelder"),
])
def test_plan_invariants(kw, needle):
    plan = SweepPlan(spec=soft_power(), **kw)
    problems = validate(plan)
    assert any(needle in p for p in problems), problems
    with pytest.raises(PlanError):
        check(plan)


def test_plan_overrides_reach_grid_options():
    plan = SweepPlan(spec=soft_power()).with_overrides(r_max=100.0, ratio=None, lmax=4, tol=None)
    assert plan.grid.r_max == 100.0 and plan.grid.ratio == 1.005 and plan.lmax == 4


def test_plan_from_dict_and_unknown_keys():
    plan = plan_from_dict({"preset": "soft_power", "lambdas": [1.0, 2.0], "grid": {"r_max": 64.0}})
    assert plan.lams == (1.0, 2.0) and plan.grid.r_max == 64.0
    with pytest.raises(ConfigError, match="unknown plan keys"):
        plan_from_dict({"preset": "soft_power", "lamdas": [1.0]})
    with pytest.raises(ConfigError):
        plan_from_dict({"lambdas": [1.0]})


def test_load_plan_reports_line_and_column(tmp_path):
    p = tmp_path / "plan.json"
    p.write_text('{\n  "preset": "soft_power",\n  "lambdas": [1.0,]\n}\n')
    with pytest.raises(ConfigError, match=r"line 3 column"):
        load_plan(p)


# -- common -----------------------------------------------------------------

def _square(x):
    return x * x


def test_run_pool_keeps_task_order():
    tasks = [(i,) for i in range(6)]
    assert run_pool(_square, tasks, jobs=1) == [i * i for i in range(6)]
    assert run_pool(_square, tasks, jobs=2) == [i * i for i in range(6)]


def test_series_helpers():
    assert growth([2.0, 3.0, 8.0]) == 4.0
    assert spread([2.0, 8.0, 4.0]) == 4.0
    assert fit_slope([0, 1, 2, 3], [1.0, -1.0, -3.0, -5.0]) == pytest.approx(-2.0)


def test_node_cut_lands_on_a_node(grid):
    c = node_cut(grid, 17.3)
    assert c <= 17.3 and c in set(grid.nodes)


def test_decreasing_tail():
    assert decreasing_tail([0.0, 5.0, 3.0, 2.0, 1.0, 0.0])
    assert not decreasing_tail([1.0, 2.0, 3.0])
    assert not decreasing_tail([1.0, 0.5])


# -- report -----------------------------------------------------------------

def _report():
    rep = ExperimentReport("demo", meta={"x": np.float64(1.5)})
    rep.add(a=1, b=0.5, c=True, z=1 + 2j)
    rep.add(a=2.5, b=np.float64(0.25), c=False, z=0j, name="s")
    rep.verdict("ok", "0 <= 1", True, 0.0, 1.0)
    return rep


def test_report_outputs_are_deterministic(tmp_path):
    p1 = _report().write(tmp_path / "a")
    p2 = _report().write(tmp_path / "b")
    for k in ("csv", "schema", "summary"):
        assert p1[k].read_bytes() == p2[k].read_bytes()
    d1, d2 = json.loads(p1["json"].read_text()), json.loads(p2["json"].read_text())
    assert d1 == d2 and d1["records"][0]["z"] == [1.0, 2.0]


def test_report_schema_types():
    cols = _report().schema()["columns"]
    assert cols == {"a": "number", "b": "number", "c": "boolean", "name": "string", "z": "json"}


def test_report_pass_logic_and_merge():
    rep = _report()
    assert rep.passed and "PASS" in rep.summary()
    assert not ExperimentReport("empty").passed
    bad = ExperimentReport("bad")
    bad.verdict("no", "x", False)
    m = merge("both", [rep, bad])
    assert not m.passed and len(m.records) == 2 and set(m.meta) == {"demo", "bad"}


# -- extrapolation, radiation residual, Hoelder difference, dilation -----------

def test_extrapolation_exact_for_quadratics(grid):
    base = bump_field(grid, 0, (2.0, 4.0))
    mus = (1e-1, 5e-2, 2e-2)
    fields = [base.scaled(1.0 + 3.0 * m - 7.0 * m * m) for m in mus]
    full, two = extrapolate_to_zero(mus, fields)
    np.testing.assert_allclose(full.u, base.u, atol=1e-12)
    assert np.max(np.abs(two.u - base.u)) > 1e-3


def test_radiation_residual_conjugate_branch(grid):
    spec = soft_power()
    psi = bump_field(grid, 1, (2.0, 6.0))
    zp = SpectralParam(1.0, 0.05, "+")
    zm = SpectralParam(1.0, 0.05, "-")
    rp = radiation_residual(spec, zp, apply_resolvent(spec, zp, psi))
    rm = radiation_residual(spec, zm, apply_resolvent(spec, zm, psi))
    np.testing.assert_allclose(rm.u, -np.conj(rp.u), rtol=1e-9, atol=1e-12)


def test_resolvent_of_zero_source_has_zero_norm(grid):
    spec = soft_power()
    phi = apply_resolvent(spec, SpectralParam(1.0, 0.1), bump_field(grid, 0, (2.0, 4.0)).scaled(0.0))
    assert norm_Bstar(phi, decompose_radius(grid, 0)) == 0.0


def test_hoelder_difference_vanishes_at_equal_energies(grid):
    spec = soft_power()
    psi = bump_field(grid, 0, (2.0, 4.0))
    phi = apply_resolvent(spec, SpectralParam(1.0, 0.1), psi)
    w = TauWeight(spec, 1.0, 1e3)
    assert _grid_mass([phi, phi], [1.0, -1.0], lambda r: w(r, -1.0)) == 0.0
    assert tail_difference_mass(phi, phi, w, -1.0) == 0.0


@pytest.mark.parametrize("m", [0, 1, 3])
def test_dilation_norm_identity(grid, m):
    phi = bump_field(grid, 1, (2.0, 4.0))
    dec_m = decompose_radius(grid, m)
    dil = dilate(phi, m)
    ratio = norm_Bstar(dil, decompose_radius(dil.grid, 0)) / norm_Bstar(phi, dec_m)
    assert ratio == pytest.approx(2.0 ** (m * (grid.dim - 1) / 2), rel=1e-10)
