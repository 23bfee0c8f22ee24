"""Regular and outgoing solutions of one partial wave."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _hermite
from ..efftime import SpectralParam
from ..errors import NumericalAccuracyError
from ..grid import RadialGrid
from ..potential import PotentialSpec, eval_potential
from . import kernels
from .farfield import FarField, outgoing_far_field, reduced_potential
from .fields import check_ells, sector_exponent

WRONSKIAN_TOL = 1e-6


def stage_radii(grid: RadialGrid) -> np.ndarray:
    """Gauss-Legendre stage radii of every cell, shape ``(N, 4)``."""
    h = grid.steps
    return grid.nodes[:-1, None] + kernels.GL_C[None, :] * h[:, None]


def frobenius_start(spec: PotentialSpec, ell: int, z: complex, r0: float):
    """``(u, u')`` of the regular solution at ``r0``, normalised as ``r^s (1 + c r^2)``."""
    s = sector_exponent(ell, spec.dim)
    V, _, _, q = eval_potential(spec, r0)
    c = (V + q - z) / (2.0 * s + 1.0)
    u = r0**s * (1.0 + c * r0 * r0)
    du = s * r0 ** (s - 1.0) * (1.0 + c * r0 * r0) + 2.0 * c * r0 ** (s + 1.0) if s > 0 else 2.0 * c * r0
    return complex(u), complex(du)


@dataclass(frozen=True, eq=False)
class ModePair:
    """Regular (``reg``) and outgoing (``out``) solutions of one partial wave.

    ``reg`` and ``out`` have shape ``(N + 1, 2)`` holding ``(u, u')`` at the
    nodes; ``out`` is normalised by ``u_out(R) = 1``.  ``W`` is the Wronskian
    ``u_reg u_out' - u_reg' u_out`` and ``wronskian_variation`` its largest
    relative deviation over the grid.
    """

    spec: PotentialSpec
    ell: int
    zp: SpectralParam
    grid: RadialGrid
    T: np.ndarray
    P: np.ndarray
    reg: np.ndarray
    out: np.ndarray
    W: complex
    wronskian_variation: float
    far: FarField

    def wronskian(self) -> np.ndarray:
        return self.reg[:, 0] * self.out[:, 1] - self.reg[:, 1] * self.out[:, 0]

    def interpolate(self, which: str, r, deriv: int = 0):
        Y = self.reg if which == "reg" else self.out
        Q = 2.0 * (reduced_potential(self.spec, self.ell, self.grid.nodes) - self.zp.z)
        return _hermite.evaluate(self.grid.nodes, Y[:, 0], Y[:, 1], Q * Y[:, 0], r=r, deriv=deriv)


def transfer_data(spec: PotentialSpec, ell: int, z: complex, grid: RadialGrid):
    """Per-cell transfer matrices and stage maps for ``u'' = 2 (V_eff - z) u``."""
    Q = 2.0 * (reduced_potential(spec, ell, stage_radii(grid)) - z)
    return kernels.transfer(grid.steps, Q)


def solve_modes(spec: PotentialSpec, ell: int, zp: SpectralParam, grid: RadialGrid,
                check: bool = True, far: FarField | None = None) -> ModePair:
    """Integrate the regular solution outward and the outgoing one inward.

    Raises
    ------
    NumericalAccuracyError
        If ``check`` and the Wronskian varies by more than ``WRONSKIAN_TOL``.
    ResonanceError
        If the Wronskian vanishes (an eigenvalue or resonance at ``z``).
    """
    from ..errors import ResonanceError

    check_ells([ell], grid.dim)
    if spec.dim != grid.dim:
        raise ValueError(f"grid dimension {grid.dim} differs from potential dimension {spec.dim}")
    if grid.r_min <= 0:
        raise ValueError("solver grids must start at r_0 > 0")
    z = zp.z
    T, P = transfer_data(spec, ell, z, grid)
    reg = kernels.propagate(T, np.array(frobenius_start(spec, ell, z, grid.r_min)), True)
    if far is None:
        far = outgoing_far_field(spec, ell, zp, grid.r_max)
    out = kernels.propagate(T, np.array([1.0, far.y_R], dtype=complex), False)
    if not (np.all(np.isfinite(reg)) and np.all(np.isfinite(out))):
        raise NumericalAccuracyError(f"mode integration overflowed for l={ell}, z={z}")
    Wn = reg[:, 0] * out[:, 1] - reg[:, 1] * out[:, 0]
    W = complex(Wn[-1])
    scale = np.max(np.abs(reg[:, 0] * out[:, 1])) + np.max(np.abs(reg[:, 1] * out[:, 0]))
    if abs(W) <= 1e-13 * scale:
        raise ResonanceError(f"Wronskian vanishes for l={ell} at z={z}")
    variation = float(np.max(np.abs(Wn - W)) / abs(W))
    if check and variation > WRONSKIAN_TOL:
        raise NumericalAccuracyError(
            f"Wronskian varies by {variation:.2e} for l={ell} at z={z} (tolerance {WRONSKIAN_TOL:.0e})")
    return ModePair(spec, ell, zp, grid, T, P, reg, out, W, variation, far)
