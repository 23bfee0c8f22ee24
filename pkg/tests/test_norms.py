import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from laplab import RadialGrid, soft_power
from laplab.efftime import build_efftime, default_table_grid
from laplab.experiments.sources import bump_field
from laplab.norms import (decompose_radius, decompose_tau, inner, l2_norm, norm_B, norm_B_m, norm_Bstar,
                          norm_Bstar_m, shell_norms, tail_profile, weighted_norm)
from laplab.radial.fields import PartialWaveField

GRID = RadialGrid(np.linspace(0.0, 64.0, 6401), 3)
DEC = decompose_radius(GRID, 0)


def unit_bump(a, b, ell=0, grid=GRID):
    f = bump_field(grid, ell, (a, b))
    return f.scaled(1.0 / l2_norm(f))


pieces = st.lists(st.tuples(st.floats(0.0, 50.0), st.floats(0.5, 12.0), st.floats(-2, 2),
                            st.floats(-2, 2), st.sampled_from([0, 1])), min_size=1, max_size=4)


def random_field(spec, r_min=0.0):
    out = None
    for a, w, re, im, ell in spec:
        a = max(a, r_min)
        f = bump_field(GRID, ell, (a, min(a + w, 63.0))).scaled(complex(re, im) + 0.1)
        out = f if out is None else out + f
    return out


def test_zero_field():
    z = PartialWaveField(GRID, (0, 1), np.zeros((2, len(GRID))), np.zeros((2, len(GRID))))
    assert l2_norm(z) == 0 and norm_B(z, DEC) == 0 and norm_Bstar(z, DEC) == 0


def test_unit_mass_on_half_line():
    g = RadialGrid(np.linspace(0.0, 1.0, 11), 1)
    f = PartialWaveField(g, (0,), np.ones(11), np.zeros(11))
    assert l2_norm(f) == pytest.approx(1.0, rel=1e-14)


def test_gaussian_mass_closed_form():
    r = GRID.nodes
    f = PartialWaveField(GRID, (0,), r * np.exp(-r * r), (1 - 2 * r * r) * np.exp(-r * r),
                         (4 * r**3 - 6 * r) * np.exp(-r * r))
    exact = np.sqrt(np.pi) / (4 * 2**1.5)
    assert l2_norm(f) ** 2 == pytest.approx(exact, rel=1e-6)


def test_single_shell_values():
    f = unit_bump(4.0, 8.0)
    assert norm_B(f, DEC) == pytest.approx(2**1.5, rel=1e-10)
    assert norm_Bstar(f, DEC) == pytest.approx(2**-1.5, rel=1e-10)


def test_additivity_over_shells():
    f = unit_bump(2.0, 4.0) + unit_bump(8.0, 16.0, ell=1)
    assert norm_B(f, DEC) == pytest.approx(2 + 4, rel=1e-10)


def test_shell_boundaries_are_exact():
    # a bump straddling r = 8 splits exactly: shell masses add up to the total
    f = unit_bump(6.0, 10.0)
    assert np.sum(shell_norms(f, DEC) ** 2) == pytest.approx(1.0, rel=1e-12)


@given(pieces)
def test_embedding_weighted_l2_into_B(spec):
    f = random_field(spec)
    n = np.arange(1, DEC.n_shells + 1)
    wmin = np.where(n == 1, 1.0, np.sqrt(1 + 4.0 ** (n - 1)))
    K = np.sqrt(np.sum(2.0**n / wmin**2))
    assert norm_B(f, DEC) <= K * weighted_norm(f, DEC, 1.0) * (1 + 1e-12)


@given(pieces)
def test_weighted_norm_s0_is_l2(spec):
    f = random_field(spec)
    assert weighted_norm(f, DEC, 0.0) == pytest.approx(l2_norm(f, include_tail=False), rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_weighted_norm_bracket_on_one_shell(n):
    f = unit_bump(2.0 ** (n - 1), 2.0**n)
    w = weighted_norm(f, DEC, 1.0)
    assert np.sqrt(1 + 4.0 ** (n - 1)) <= w <= np.sqrt(1 + 4.0**n)


@given(pieces, pieces)
def test_duality(s1, s2):
    f, g = random_field(s1), random_field(s2)
    assert abs(inner(f, g)) <= norm_Bstar(f, DEC) * norm_B(g, DEC) * (1 + 1e-10)


def test_inner_consistent_with_norm():
    f = unit_bump(3.0, 9.0) + unit_bump(1.0, 5.0, ell=1).scaled(2j)
    assert inner(f, f).real == pytest.approx(l2_norm(f) ** 2, rel=1e-12)
    assert abs(inner(f, f).imag) < 1e-14


def test_rescaled_level_zero_is_radius_shells():
    f = unit_bump(5.0, 20.0)
    assert norm_B_m(f, 0) == norm_B(f, DEC)


def test_rescaled_single_shell():
    f = unit_bump(4.0, 8.0)
    assert norm_B_m(f, 1) == pytest.approx(2**1.5, rel=1e-10)


@given(pieces, st.integers(0, 3))
def test_level_monotonicity_away_from_origin(spec, m):
    # exact when no mass lies in |x| < 2^-m, where the level m+1 splits the innermost shell
    f = random_field(spec, r_min=1.0)
    assert norm_B_m(f, m) >= norm_B_m(f, m + 1) * (1 - 1e-12)
    assert norm_Bstar_m(f, m) <= norm_Bstar_m(f, m + 1) * (1 + 1e-12)


@given(pieces, st.integers(0, 3))
def test_level_monotonicity_up_to_constant(spec, m):
    f = random_field(spec)
    c = np.sqrt(1.5)
    assert norm_B_m(f, m + 1) <= c * norm_B_m(f, m) * (1 + 1e-12)
    assert norm_Bstar_m(f, m) <= c * norm_Bstar_m(f, m + 1) * (1 + 1e-12)


def test_level_monotonicity_can_fail_near_origin():
    grid = RadialGrid(np.linspace(0.0, 4.0, 4001), 3)
    f = unit_bump(0.0, 1.0, grid=grid) + unit_bump(1.0, 2.0, grid=grid)
    assert norm_B_m(f, 0) < norm_B_m(f, 1)


def test_tau_shells_follow_thresholds():
    spec = soft_power()
    tb = build_efftime(spec, 1.0, default_table_grid(r_max=200.0))
    dec = decompose_tau(GRID, tb)
    tau = np.asarray(tb.tau(dec.r))
    np.testing.assert_array_equal(dec.shell[tau < 2], 1)
    inner_pts = tau >= 2
    n = dec.shell[inner_pts]
    t = tau[inner_pts]
    assert np.all((2.0 ** (n - 1) <= t * (1 + 1e-12)) & (t < 2.0**n * (1 + 1e-12)))
    assert len(tail_profile(unit_bump(5, 20), dec)) <= dec.n_shells
