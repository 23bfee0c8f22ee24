"""Radial momentum, ``a^{-1} p_r`` and the angular quadratic form.

With ``psi = r^{-(d-1)/2} u(r) Y(omega)`` the radial momentum
``p_r = -i d/dr`` acts on the reduced function as ``-i (u' - (d-1) u / (2r))``.
The solver stores ``u'`` to full accuracy, so no differencing is needed
when ``u''`` is also available.
"""
from __future__ import annotations

import numpy as np

from ..efftime import speed_a
from ..errors import NumericalAccuracyError
from ..potential import PotentialSpec, eval_potential
from .fields import PartialWaveField


def _d_dr(nodes: np.ndarray, f: np.ndarray) -> np.ndarray:
    """4th-order finite differences on a (possibly non-uniform) grid, along the last axis."""
    from .resolvent import _fd_weights

    out = np.empty_like(f)
    idx, stencil, w = _fd_weights(nodes, 5)
    out[..., idx] = np.einsum("nj,...nj->...n", w, f[..., stencil])
    # one-sided 5-point stencils at both ends
    for i in (0, 1, nodes.size - 2, nodes.size - 1):
        lo = min(max(i - 2, 0), nodes.size - 5)
        st = np.arange(lo, lo + 5)
        x = nodes[st] - nodes[i]
        A = x[None, :] ** np.arange(5)[:, None]
        rhs = np.zeros(5)
        rhs[1] = 1.0
        wi = np.linalg.solve(A, rhs)
        out[..., i] = f[..., st] @ wi
    return out


def wavelength_check(field: PartialWaveField, k_max: float, kh_max: float = 0.5) -> None:
    h = float(field.grid.steps.max())
    if k_max * h > kh_max:
        raise NumericalAccuracyError(
            f"grid step {h:.3g} too coarse for wavenumber {k_max:.3g} (k h = {k_max * h:.2f} > {kh_max})")


def apply_p_r(field: PartialWaveField) -> PartialWaveField:
    """``p_r psi = -i d/dr psi`` on the full sector coefficient, in reduced form.

    With ``psi_l = r^{-c} u_l`` and ``c = (d - 1)/2`` this is
    ``u -> -i (u' - c u / r)``.  The derivative of the result uses the stored
    ``u''`` when present and 4th-order finite differences of ``u'`` otherwise.
    Tails are dropped.
    """
    r = field.grid.nodes
    c = 0.5 * (field.dim - 1)
    d2 = field.d2u if field.d2u is not None else _d_dr(r, field.du)
    u = -1j * (field.du - c * field.u / r)
    du = -1j * (d2 - c * field.du / r + c * field.u / r**2)
    return PartialWaveField(field.grid, field.ells, u, du, None, z=field.z)


def apply_a_inv_p_r(spec: PotentialSpec, lam: float, field: PartialWaveField) -> PartialWaveField:
    """``a(lam, r)^{-1} p_r psi`` (``a`` is built from ``V`` alone)."""
    r = field.grid.nodes
    pr = apply_p_r(field)
    a = speed_a(spec.without_q(), lam, r)
    dV = eval_potential(spec.without_q(), r)[1]
    da = -dV / a
    inv = 1.0 / a
    dinv = -da / a**2
    return PartialWaveField(field.grid, field.ells, inv * pr.u, inv * pr.du + dinv * pr.u, None,
                            z=field.z)


def multiply(field: PartialWaveField, w, dw=None) -> PartialWaveField:
    """Pointwise product with a radial function given at the nodes (with derivative)."""
    w = np.asarray(w)
    if dw is None:
        dw = _d_dr(field.grid.nodes, w.astype(complex))
    return PartialWaveField(field.grid, field.ells, w * field.u, w * field.du + dw * field.u, None,
                            z=field.z)


def angular_form(field: PartialWaveField, w=1.0) -> float:
    """``sum_l l(l+d-2) int w(r) r^{-2} |u_l|^2 dr`` (the quadratic form of ``L``).

    ``w`` is a scalar, a callable of ``r`` or an array at the grid nodes.
    """
    from ..norms import plain_quadrature

    dec = plain_quadrature(field.grid)
    r = dec.r
    if callable(w):
        wq = np.asarray(w(r), dtype=float)
    elif np.ndim(w) == 0:
        wq = np.full(r.shape, float(w))
    else:
        wq = np.interp(r, field.grid.nodes, np.asarray(w, dtype=float))
    if np.any(wq < 0):
        raise ValueError("angular_form needs a non-negative weight")
    vals = field.evaluate(cell=dec.cell, t=dec.t)
    d = field.dim
    total = 0.0
    for i, l in enumerate(field.ells):
        lam_l = l * (l + d - 2)
        if lam_l == 0:
            continue
        total += lam_l * float(np.sum(wq * np.abs(vals[i]) ** 2 / r**2 * dec.w))
    return total
