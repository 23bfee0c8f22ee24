"""Piecewise Hermite interpolation on a nonuniform grid.

Cubic when nodal values and first derivatives are known, quintic when the
second derivative is known as well.  ``t`` is the local coordinate in
``[0, 1]`` of a cell of length ``h``.
"""
import numpy as np


def cubic_basis(t, deriv=0):
    """Rows: coefficients of ``f0, h f0', f1, h f1'`` (d/dt applied ``deriv`` times)."""
    t = np.asarray(t, dtype=float)
    if deriv == 0:
        return np.array([2 * t**3 - 3 * t**2 + 1, t**3 - 2 * t**2 + t,
                         -2 * t**3 + 3 * t**2, t**3 - t**2])
    if deriv == 1:
        return np.array([6 * t**2 - 6 * t, 3 * t**2 - 4 * t + 1,
                         -6 * t**2 + 6 * t, 3 * t**2 - 2 * t])
    raise ValueError("deriv must be 0 or 1")


def quintic_basis(t, deriv=0):
    """Rows: coefficients of ``f0, h f0', h^2 f0'', f1, h f1', h^2 f1''``."""
    t = np.asarray(t, dtype=float)
    t2, t3, t4, t5 = t * t, t**3, t**4, t**5
    if deriv == 0:
        return np.array([
            1 - 10 * t3 + 15 * t4 - 6 * t5,
            t - 6 * t3 + 8 * t4 - 3 * t5,
            0.5 * (t2 - 3 * t3 + 3 * t4 - t5),
            10 * t3 - 15 * t4 + 6 * t5,
            -4 * t3 + 7 * t4 - 3 * t5,
            0.5 * (t3 - 2 * t4 + t5),
        ])
    if deriv == 1:
        return np.array([
            -30 * t2 + 60 * t3 - 30 * t4,
            1 - 18 * t2 + 32 * t3 - 15 * t4,
            0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4),
            30 * t2 - 60 * t3 + 30 * t4,
            -12 * t2 + 28 * t3 - 15 * t4,
            0.5 * (3 * t2 - 8 * t3 + 5 * t4),
        ])
    raise ValueError("deriv must be 0 or 1")


def locate(nodes, r):
    """Cell index and local coordinate of each radius in ``r``."""
    nodes = np.asarray(nodes)
    r = np.asarray(r, dtype=float)
    idx = np.clip(np.searchsorted(nodes, r, side="right") - 1, 0, nodes.size - 2)
    h = nodes[idx + 1] - nodes[idx]
    return idx, (r - nodes[idx]) / h


def evaluate(nodes, f, df, d2f=None, cell=None, t=None, r=None, deriv=0):
    """Interpolate nodal data at ``(cell, t)`` or at radii ``r``.

    ``f``, ``df``, ``d2f`` may carry leading batch axes; the grid axis is last.
    """
    nodes = np.asarray(nodes)
    if r is not None:
        cell, t = locate(nodes, r)
    h = nodes[cell + 1] - nodes[cell]
    f0, f1 = f[..., cell], f[..., cell + 1]
    g0, g1 = df[..., cell] * h, df[..., cell + 1] * h
    if d2f is None:
        B = cubic_basis(t, deriv)
        out = B[0] * f0 + B[1] * g0 + B[2] * f1 + B[3] * g1
    else:
        k0, k1 = d2f[..., cell] * h * h, d2f[..., cell + 1] * h * h
        B = quintic_basis(t, deriv)
        out = B[0] * f0 + B[1] * g0 + B[2] * k0 + B[3] * f1 + B[4] * g1 + B[5] * k1
    if deriv == 1:
        out = out / h
    return out
