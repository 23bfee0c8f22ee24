import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from laplab import RadialGrid
from laplab import _hermite


def test_grid_validation():
    with pytest.raises(ValueError):
        RadialGrid(np.array([0.0, 1.0, 1.0]))
    with pytest.raises(ValueError):
        RadialGrid(np.array([-1.0, 1.0]))
    with pytest.raises(ValueError):
        RadialGrid(np.array([1.0]))


def test_wavenumber_grid_resolves_wavelength():
    g = RadialGrid.for_wavenumber(4.0, 100.0, ratio=1.01, kh=0.08)
    assert g.r_min > 0 and g.r_max == pytest.approx(100.0)
    assert g.steps.max() <= 0.08 / 4.0 * (1 + 1e-12)
    growth = g.steps[1:] / g.steps[:-1]
    assert growth.max() <= 1.01**2  # one adjusted step where the uniform part starts


def test_geometric_grid_with_origin():
    g = RadialGrid.geometric(1e-3, 10.0, 1.05, include_origin=True)
    assert g.nodes[0] == 0.0 and g.nodes[1] == pytest.approx(1e-3)


@given(coef=st.lists(st.floats(-3, 3), min_size=6, max_size=6), x=st.floats(0.0, 2.0))
def test_hermite_exact_on_polynomials(coef, x):
    nodes = np.array([0.0, 0.3, 0.9, 1.4, 2.0])
    p5 = np.polynomial.Polynomial(coef)
    p3 = np.polynomial.Polynomial(coef[:4])
    d = _hermite.evaluate(nodes, p3(nodes), p3.deriv()(nodes), r=np.array([x]))
    assert d[0] == pytest.approx(p3(x), abs=1e-11)
    q = _hermite.evaluate(nodes, p5(nodes), p5.deriv()(nodes), p5.deriv(2)(nodes), r=np.array([x]))
    assert q[0] == pytest.approx(p5(x), abs=1e-10)
    dq = _hermite.evaluate(nodes, p5(nodes), p5.deriv()(nodes), p5.deriv(2)(nodes), r=np.array([x]),
                           deriv=1)
    assert dq[0] == pytest.approx(p5.deriv()(x), abs=1e-9)


def test_locate_cells():
    nodes = np.array([0.0, 1.0, 3.0])
    cell, t = _hermite.locate(nodes, np.array([0.0, 0.5, 1.0, 2.0, 3.0]))
    np.testing.assert_array_equal(cell, [0, 0, 1, 1, 1])
    np.testing.assert_allclose(t, [0.0, 0.5, 0.0, 0.5, 1.0])
