"""``R(z) = (H - z)^{-1}`` sector by sector through the Green's function.

For one partial wave the reduced equation is ``-u''/2 + (V_eff - z) u = g``.
With the regular solution ``u_reg``, the outgoing solution ``u_out`` and their
Wronskian ``W``,

    u(r) = -(2/W) [ u_out(r) int_0^r u_reg g + u_reg(r) int_r^inf u_out g ].

Both running integrals are accumulated with the same Gauss stages that
propagate the modes, so the result inherits the order-8 accuracy of the
transfer matrices.
"""
from __future__ import annotations

import numpy as np

from ..efftime import SpectralParam
from ..errors import NumericalAccuracyError
from ..potential import PotentialSpec
from . import kernels
from .farfield import reduced_potential, tail_pair
from .fields import PartialWaveField, Tail
from .modes import ModePair, solve_modes

RESIDUAL_TOL = 1e-6


def _stage_values(field: PartialWaveField) -> np.ndarray:
    """Source values at the Gauss stages, shape ``(n_sectors, N, 4)``."""
    N = len(field.grid) - 1
    cell = np.repeat(np.arange(N), 4)
    t = np.tile(kernels.GL_C, N)
    return field.evaluate(cell=cell, t=t).reshape(len(field.ells), N, 4)


def _stage_modes(mp: ModePair, which: str) -> np.ndarray:
    Y = mp.reg if which == "reg" else mp.out
    return np.einsum("njc,nc->nj", mp.P, Y[:-1])


def _fd_weights(nodes: np.ndarray, width: int = 7) -> tuple[np.ndarray, np.ndarray]:
    """First-derivative weights on a centred ``width``-point stencil at interior nodes."""
    half = width // 2
    idx = np.arange(half, nodes.size - half)
    stencil = idx[:, None] + np.arange(-half, half + 1)[None, :]
    h = nodes[idx + 1] - nodes[idx - 1]
    x = (nodes[stencil] - nodes[idx, None]) / h[:, None]
    powers = np.arange(width)
    A = x[:, None, :] ** powers[None, :, None]  # (n, k, j)
    rhs = np.zeros((idx.size, width, 1))
    rhs[:, 1, 0] = 1.0
    w = np.linalg.solve(A, rhs)[:, :, 0] / h[:, None]
    return idx, stencil, w


def residual(field: PartialWaveField, spec: PotentialSpec, z: complex, source: PartialWaveField,
             window: tuple | None = None) -> float:
    """Relative residual ``||(H - z) u - g|| / ||g||`` on a radial window.

    ``u''`` is recovered from the stored ``u'`` by 7-point finite differences,
    independently of the differential equation.  The default window is
    ``[2 r_0, R / 2]``.
    """
    grid = field.grid
    r = grid.nodes
    lo, hi = window if window is not None else (2.0 * grid.r_min, 0.5 * grid.r_max)
    idx, stencil, w = _fd_weights(r)
    keep = (r[idx] >= lo) & (r[idx] <= hi)
    idx, stencil, w = idx[keep], stencil[keep], w[keep]
    rr = r[idx]
    dr = np.gradient(rr) if rr.size > 1 else np.ones(1)
    num = 0.0
    den = 0.0
    for i, ell in enumerate(field.ells):
        d2 = np.einsum("nj,nj->n", w, field.du[i][stencil])
        g = source.u[source.index(ell)][idx] if ell in source.ells else 0.0
        res = -0.5 * d2 + (reduced_potential(spec, ell, rr) - z) * field.u[i][idx] - g
        num += float(np.sum(np.abs(res) ** 2 * dr))
    for i in range(len(source.ells)):
        den += float(np.sum(np.abs(source.u[i][idx]) ** 2 * dr))
    if den == 0.0:
        return float(np.sqrt(num))
    return float(np.sqrt(num / den))


def resolvent_sector(mp: ModePair, g_stage: np.ndarray, g_nodes: np.ndarray, J_tail: complex = 0.0):
    """``(u, u', u'')`` of one sector from stage and nodal source values."""
    h = mp.grid.steps
    b = kernels.GL_B
    dI = h * ((g_stage * _stage_modes(mp, "reg")) @ b)
    dJ = h * ((g_stage * _stage_modes(mp, "out")) @ b)
    I = np.concatenate([[0.0], np.cumsum(dI)])
    J = np.concatenate([np.cumsum(dJ[::-1])[::-1], [0.0]]) + J_tail
    c = -2.0 / mp.W
    u = c * (mp.out[:, 0] * I + mp.reg[:, 0] * J)
    du = c * (mp.out[:, 1] * I + mp.reg[:, 1] * J)
    Veff = reduced_potential(mp.spec, mp.ell, mp.grid.nodes)
    d2u = 2.0 * (Veff - mp.zp.z) * u - 2.0 * g_nodes
    return u, du, d2u


def apply_resolvent(spec: PotentialSpec, zp: SpectralParam, psi: PartialWaveField, *,
                    check: bool = True, modes: dict | None = None,
                    residual_tol: float = RESIDUAL_TOL) -> PartialWaveField:
    """``R(z) psi`` for a partial-wave source on the solver grid.

    Parameters
    ----------
    spec, zp
        Potential and spectral parameter (``mu = 0`` gives the boundary value
        ``R(lam +- i0)``).
    psi
        Source; a sector's tail (if any) contributes ``int_R^inf u_out psi``.
    modes
        Optional cache ``{ell: ModePair}``; filled in place.

    Raises
    ------
    NumericalAccuracyError
        With ``check`` when the residual exceeds ``residual_tol`` or the
        Wronskian drifts.
    """
    if not isinstance(zp, SpectralParam):
        raise TypeError("zp must be a SpectralParam")
    grid = psi.grid
    modes = {} if modes is None else modes
    g_stage = _stage_values(psi)
    n = len(psi.ells)
    u = np.empty((n, len(grid)), dtype=complex)
    du = np.empty_like(u)
    d2u = np.empty_like(u)
    tails = []
    variation = 0.0
    for i, ell in enumerate(psi.ells):
        mp = modes.get(ell)
        if mp is None or mp.grid is not grid or mp.zp != zp:
            mp = solve_modes(spec, ell, zp, grid, check=check)
            modes[ell] = mp
        variation = max(variation, mp.wronskian_variation)
        src_tail = psi.tails[i] if psi.tails is not None else None
        J_tail = 0.0
        if src_tail is not None:
            J_tail = src_tail.amplitude * tail_pair(mp.far, src_tail.far)
            if not np.isfinite(J_tail):
                raise NumericalAccuracyError(f"source tail does not decay against u_out for l={ell}")
        u[i], du[i], d2u[i] = resolvent_sector(mp, g_stage[i], psi.u[i], J_tail)
        # beyond R the output is a multiple of u_out only for compact sources
        tails.append(Tail(mp.far, u[i, -1]) if src_tail is None else None)
    out = PartialWaveField(grid, psi.ells, u, du, d2u, z=zp.z,
                           tails=tuple(tails) if any(t is not None for t in tails) else None,
                           meta={"wronskian_variation": variation})
    res = residual(out, spec, zp.z, psi)
    out.meta["residual"] = res
    if check and res > residual_tol:
        raise NumericalAccuracyError(
            f"resolvent residual {res:.2e} exceeds {residual_tol:.0e} at z={zp.z}; refine the grid")
    return out
