import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from laplab import DomainError, PotentialSpec, RadialGrid, SpectralParam, soft_power
from laplab.efftime import (beta_c, build_efftime, check_tau_S_bounds, default_table_grid,
                            efftime_tables, phase_b, speed_a)
from laplab.potential import eval_potential


def test_speed_values():
    spec = soft_power()
    assert speed_a(spec, 0.0, 0.0) == pytest.approx(np.sqrt(2))
    assert speed_a(spec, 2.0, 0.0) == pytest.approx(np.sqrt(6))
    r = np.linspace(0, 50, 11)
    np.testing.assert_array_equal(speed_a(spec, -5.0, r), speed_a(spec, 0.0, r))


def test_tau_and_S_vanish_at_origin():
    tb = build_efftime(soft_power(), 1.0, default_table_grid(r_max=10.0))
    assert tb.tau_values[0] == 0.0 and tb.S_values[0] == 0.0
    assert tb.tau(0.0) == 0.0


@pytest.mark.parametrize("lam,v0", [(0.0, 0.5), (1.0, 0.5), (3.0, 2.0)])
def test_constant_potential_closed_form(lam, v0):
    spec = PotentialSpec(family="constant", v0=v0)
    tb = build_efftime(spec, lam, default_table_grid(r_max=100.0))
    a = np.sqrt(2 * lam + 2 * v0)
    np.testing.assert_allclose(tb.tau_values, tb.r / a, rtol=1e-12, atol=1e-15)
    np.testing.assert_allclose(tb.S_values, tb.r * a, rtol=1e-12, atol=1e-15)


def test_tau_matches_dense_trapezoid():
    spec = soft_power()
    tb = build_efftime(spec, 0.0, default_table_grid(r_max=1e3))
    r = np.linspace(0, 1e3, 1_000_001)
    ref = trapezoid(1.0 / speed_a(spec, 0.0, r), r)
    assert tb.tau(1e3) == pytest.approx(ref, rel=1e-6)


def test_tau_a_over_r_tends_to_one_at_origin():
    tb = build_efftime(soft_power(), 0.5, default_table_grid(r_max=10.0, r_min=1e-6))
    i = 1
    assert tb.tau_values[i] * tb.a[i] / tb.r[i] == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("lam", [0.0, 1.0])
def test_two_sided_ratio_families_bounded(lam):
    spec = soft_power()
    grid = default_table_grid(r_max=1e3)
    tb = build_efftime(spec, lam, grid)
    fams = check_tau_S_bounds(tb, build_efftime(spec, 0.0, grid), r_range=(1.0, 1e3))
    for name, v in fams.items():
        if v["applicable"]:
            assert 0 < v["min"] <= v["max"] < np.inf, name
            assert v["max"] / v["min"] < 10.0, name


@given(lam=st.floats(0.0, 4.0), r=st.floats(0.01, 500.0))
def test_tau_derivative_is_inverse_speed(lam, r):
    spec = soft_power()
    tb = build_efftime(spec, lam, default_table_grid(r_max=1e3))
    assert tb.tau(r, deriv=1) == pytest.approx(1.0 / speed_a(spec, lam, r), rel=1e-6)


def test_radius_at_tau_inverts_tau():
    tb = build_efftime(soft_power(), 1.0, default_table_grid(r_max=1e3))
    for t in (0.5, 3.0, 100.0):
        assert tb.tau(tb.radius_at_tau(t)) == pytest.approx(t, rel=1e-12)
    assert np.isnan(tb.radius_at_tau(1e9))


def test_phase_far_limit_and_imaginary_part():
    spec = soft_power()
    lam = 1.5
    zp = SpectralParam(lam, 0.0)
    assert phase_b(spec, zp, 1e8) == pytest.approx(np.sqrt(2 * lam), rel=1e-7)
    r = np.array([0.5, 2.0, 30.0])
    V, dV, _, _ = eval_potential(spec, r)
    np.testing.assert_allclose(phase_b(spec, zp, r).imag, -dV / (4 * (lam - V)), rtol=1e-14)


def test_phase_bounded_on_sector():
    spec = soft_power()
    r = np.geomspace(1e-2, 1e4, 200)
    nu = spec.nu
    for lam in np.linspace(0.0, 4.0, 9):
        for mu in (0.0, 1e-3, 0.5, 2.0):
            zp = SpectralParam(lam, mu)
            if mu and not zp.in_region(5.0, 3.0):
                continue
            b = phase_b(spec, zp, r)
            a = speed_a(spec, lam, r)
            assert np.all(np.abs(b) < 10.0)
            assert np.all(b.imag >= -1.0 * (1 + r * r) ** (-(1 + nu) / 2) / a**2)


def test_phase_derivative_matches_finite_difference():
    spec = soft_power()
    zp = SpectralParam(0.7, 0.2)
    r, h = 3.0, 1e-5
    _, db = phase_b(spec, zp, r, deriv=True)
    fd = (phase_b(spec, zp, r + h) - phase_b(spec, zp, r - h)) / (2 * h)
    assert db == pytest.approx(fd, rel=1e-7)


def test_beta_critical_terms():
    spec = soft_power(nu=1.0, eps=1.0, nu_prime=2.0)
    rep = beta_c(spec, 1.0, efftime_tables(spec, [0.0, 0.5, 1.0]))
    assert rep.terms[0] == pytest.approx(1 / 6) and rep.terms[1] == pytest.approx(1 / 3)
    assert min(rep.terms[:2]) == pytest.approx(1 / 6)
    assert rep.value > 0
    only0 = beta_c(spec, 0.0, efftime_tables(spec, [0.0]))
    assert list(only0.tail_min) == [0.0]
    with pytest.raises(ValueError):
        beta_c(spec, 1.0, [])


def test_spectral_param_domain():
    zp = SpectralParam(1.0, 0.5, "-")
    assert zp.z == 1 - 0.5j and zp.conjugate().z == 1 + 0.5j
    assert SpectralParam(1.0, 0.5).in_region(5.0, 3.0)
    assert not SpectralParam(10.0, 0.5).in_region(5.0, 3.0)
    assert not SpectralParam(-1.0, 0.01).in_region(5.0, 1.0)
    with pytest.raises(DomainError):
        SpectralParam(-1.0, 0.0)
    with pytest.raises(ValueError):
        SpectralParam(1.0, -1.0)


def test_repulsive_speed_raises():
    with pytest.raises(DomainError):
        speed_a(soft_power(c0=-1.0), 0.0, 1.0)
