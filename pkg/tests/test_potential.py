import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from laplab import OutOfRangeError, PotentialSpec, soft_power, verify_assumptions
from laplab.experiments.basic import assumption_grid
from laplab.potential import eval_potential, list_presets, load_preset, spec_from_dict
from laplab.radial.farfield import reduced_potential


def fd(f, r, h=1e-5):
    return (f(r + h) - f(r - h)) / (2 * h)


def test_soft_power_at_origin():
    V, dV, _, q = eval_potential(soft_power(), 0.0)
    assert V == -1.0 and dV == 0.0 and q == 0.0


def test_soft_power_at_one_matches_hand_derivative():
    spec = soft_power()
    V, dV, _, _ = eval_potential(spec, 1.0)
    assert V == pytest.approx(-2**-0.5, rel=1e-15)
    assert dV == pytest.approx(2**-1.5, rel=1e-15)
    assert dV == pytest.approx(fd(lambda r: eval_potential(spec, r)[0], 1.0), rel=1e-9)


@given(c0=st.floats(0.1, 3.0), nu=st.floats(0.2, 1.8), r=st.floats(0.0, 50.0))
def test_derivatives_match_finite_differences(c0, nu, r):
    spec = soft_power(c0=c0, nu=nu, nu_prime=min(2.0, nu + 0.1))
    r = max(r, 1e-3)
    V1 = lambda x: eval_potential(spec, x)[0]
    dV1 = lambda x: eval_potential(spec, x)[1]
    _, dV, d2V, _ = eval_potential(spec, r)
    assert dV == pytest.approx(fd(V1, r), rel=1e-6, abs=1e-10)
    assert d2V == pytest.approx(fd(dV1, r), rel=1e-6, abs=1e-10)


@pytest.mark.parametrize("nu", [0.5, 1.0, 1.5])
def test_far_decay_bound(nu):
    spec = soft_power(nu=nu, nu_prime=2.0)
    V = eval_potential(spec, 1e6)[0]
    assert abs(V) <= spec.C_up * (1 + 1e12) ** (-nu / 2)


def test_shipped_presets_meet_expectations():
    grid = assumption_grid()
    cat = list_presets()
    assert {"soft_power", "fail_repulsive", "fail_slow_q"} <= set(cat)
    for name, path in cat.items():
        expect = json.loads(path.read_text()).get("expect_fail")
        rep = verify_assumptions(load_preset(path), grid)
        if expect is None:
            assert rep.passed, name
        else:
            assert not rep.groups[expect], name


def test_soft_power_passes_all_groups():
    rep = verify_assumptions(soft_power(c0=1, nu=1, eps=1, c_low=1), assumption_grid())
    assert rep.groups == {"i": True, "ii": True, "iii": True, "iv": True}


def test_repulsive_fails_attraction_with_negative_margin():
    rep = verify_assumptions(soft_power(c0=-1.0), assumption_grid())
    rec = [r for r in rep.records if r.group == "ii"]
    assert not rep.groups["ii"] and min(r.worst_margin for r in rec) < 0


def test_slow_short_range_fails_group_iv():
    spec = soft_power(q={"family": "power", "C": 0.1, "exponent": 1.0})
    rep = verify_assumptions(spec, assumption_grid())
    assert not rep.groups["iv"]
    bad = [r for r in rep.records if r.group == "iv" and not r.passed]
    assert bad and bad[0].worst_radius > 10


def test_rescaled_potential():
    spec = soft_power()
    h = 0.25
    r = np.linspace(0, 20, 7)
    V = eval_potential(spec, h * r)[0]
    Vh = eval_potential(spec.rescaled(h), r)[0]
    np.testing.assert_allclose(Vh, h * h * V, rtol=1e-15)


def test_tabulated_range_and_values():
    r = np.linspace(0, 10, 101)
    spec = PotentialSpec(family="tabulated", table=(r, -1 / np.sqrt(1 + r * r)))
    assert eval_potential(spec, 5.0)[0] == pytest.approx(-1 / np.sqrt(26), rel=1e-4)
    with pytest.raises(OutOfRangeError):
        eval_potential(spec, 11.0)


def test_dict_round_trip():
    spec = soft_power(q={"family": "soft_power_sr", "C": 0.1})
    assert spec_from_dict(spec.to_dict()) == spec


@pytest.mark.parametrize("kw", [{"nu": 2.5}, {"eps": 0.0}, {"nu_prime": 0.5}, {"dim": 0}])
def test_invalid_constants_raise(kw):
    with pytest.raises(ValueError):
        soft_power(**kw)


def test_reduced_potential_centrifugal_terms():
    r = np.array([0.5, 1.0, 3.0])
    spec = soft_power(q={"family": "soft_power_sr", "C": 0.1})
    V, _, _, q = eval_potential(spec, r)
    np.testing.assert_allclose(reduced_potential(spec, 0, r), V + q)
    np.testing.assert_allclose(reduced_potential(spec.with_dim(1), 0, r), V + q)
    np.testing.assert_allclose(reduced_potential(spec.with_dim(2), 0, r), V + q - 1 / (8 * r * r))
    np.testing.assert_allclose(reduced_potential(spec, 2, r), V + q + 3 / r**2)


@pytest.mark.parametrize("spec", [
    PotentialSpec(family="constant", v0=0.5),
    PotentialSpec(family="tabulated", table=((0.0, 1.0, 2.0), (-1.0, -0.5, -0.25))),
    soft_power(well=(4.0, 1.0)).rescaled(0.5),
])
def test_dict_round_trip_other_families(spec):
    back = spec_from_dict(spec.to_dict())
    r = np.linspace(0, 2, 9)
    np.testing.assert_allclose(eval_potential(back, r)[0], eval_potential(spec, r)[0], rtol=1e-15)
