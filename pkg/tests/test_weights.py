import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from laplab.weights import ThetaWeight, check_theta_inequalities, chi, cutoff_chi, theta_eval


@pytest.mark.parametrize("n", [0, 1, 3, 7])
def test_cutoff_endpoints(n):
    assert cutoff_chi("chi_n", n, 2.0 ** (n - 1)) == 1.0
    assert cutoff_chi("chi_n", n, 2.0 ** (n + 1)) == 0.0
    assert cutoff_chi("bar_chi_n", n, 2.0 ** (n + 1)) == 1.0


@pytest.mark.parametrize("m,n", [(0, 2), (1, 5), (3, 6)])
def test_band_cutoff_inside_band(m, n):
    assert cutoff_chi("chi_mn", (m, n), 2.0 ** ((m + n) / 2 + 1)) == 1.0


def test_chi_is_monotone_and_derivatives_match():
    t = np.linspace(0.5, 2.5, 2001)
    assert np.all(np.diff(chi(t)) <= 0)
    h = 1e-6
    for k in (1, 2):
        fd = (chi(t + h, k - 1) - chi(t - h, k - 1)) / (2 * h)
        np.testing.assert_allclose(chi(t, k), fd, atol=1e-4)  # kinks of chi'' at t = 1, 2


def test_bad_cutoff_arguments():
    with pytest.raises(ValueError):
        cutoff_chi("chi_mn", (3, 1), 1.0)
    with pytest.raises(ValueError):
        cutoff_chi("nope", 1, 1.0)
    with pytest.raises(ValueError):
        cutoff_chi("chi_n", 1, -1.0)


def test_theta_values():
    th, th1, _ = theta_eval(ThetaWeight(1.0, 4.0), 0.0)
    assert th == 0.0 and th1 == pytest.approx(1 / 4)
    th, th1, _ = theta_eval(ThetaWeight(1.0, 1.0), 1.0)
    assert th == pytest.approx(0.5) and th1 == pytest.approx(0.25)
    assert th1 <= th / 1.0


@given(delta=st.floats(0.05, 3.0), R=st.floats(1.0, 1e4))
def test_theta_inequalities_hold(delta, R):
    tau = np.geomspace(1e-6, 1e8, 400)
    w = ThetaWeight(delta, R)
    th, th1, th2 = theta_eval(w, tau)
    assert np.all(th <= tau / R * (1 + 1e-12))
    assert np.all(th2 <= 0)
    assert check_theta_inequalities(w, tau)["passed"]


def test_theta_derivatives_match_finite_differences():
    w = ThetaWeight(0.7, 3.0)
    tau = np.linspace(0.1, 20, 50)
    h = 1e-5
    th_p, th1_p, _ = theta_eval(w, tau + h)
    th_m, th1_m, _ = theta_eval(w, tau - h)
    _, th1, th2 = theta_eval(w, tau)
    np.testing.assert_allclose(th1, (th_p - th_m) / (2 * h), rtol=1e-7)
    np.testing.assert_allclose(th2, (th1_p - th1_m) / (2 * h), rtol=1e-6)


def test_theta_weight_validation():
    with pytest.raises(ValueError):
        ThetaWeight(0.0, 1.0)
    with pytest.raises(ValueError):
        ThetaWeight(1.0, 0.5)
