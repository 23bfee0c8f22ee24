"""Detector for square-integrable solutions at real energies.

A real solution of ``-u''/2 + (V_eff - lam) u = 0`` in an allowed region
keeps the WKB invariant ``A^2 = k |u|^2 + |u'|^2 / k`` (``k`` the local
wavenumber) roughly constant.  A bound state would make ``A`` collapse at
large ``r``; the detector reports ``A(R) / max_{[R/4, R]} A``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..grid import RadialGrid
from ..potential import PotentialSpec
from . import kernels
from .farfield import reduced_potential
from .modes import frobenius_start, transfer_data

TAIL_THRESHOLD = 1e-3


def regular_solution(spec: PotentialSpec, ell: int, lam: float, grid: RadialGrid) -> np.ndarray:
    """``(u, u')`` of the regular solution at real energy ``lam`` (may be negative)."""
    T, _ = transfer_data(spec, ell, complex(lam), grid)
    return kernels.propagate(T, np.array(frobenius_start(spec, ell, complex(lam), grid.r_min)), True)


def tail_ratio(spec: PotentialSpec, ell: int, lam: float, grid: RadialGrid) -> float:
    Y = regular_solution(spec, ell, lam, grid)
    r = grid.nodes
    k = np.sqrt(np.abs(2.0 * (lam - reduced_potential(spec, ell, r))))
    k = np.maximum(k, 1e-300)
    A = np.sqrt(k * np.abs(Y[:, 0]) ** 2 + np.abs(Y[:, 1]) ** 2 / k)
    window = r >= 0.25 * r[-1]
    return float(A[-1] / np.max(A[window]))


@dataclass
class JostReport:
    ell: int
    lams: list
    ratios: list
    min_ratio: float
    passed: bool
    meta: dict = field(default_factory=dict)

    def to_dict(self):
        return dict(self.__dict__)


def default_scan_grid(spec: PotentialSpec, lams, r_max: float = 400.0, kh: float = 0.2) -> RadialGrid:
    k_max = np.sqrt(2.0 * (max(max(lams), 0.0) + abs(float(reduced_potential(spec.without_q(), 0, 1e-3)))))
    return RadialGrid.for_wavenumber(max(k_max, 1.0), r_max, dim=spec.dim, kh=kh)


def jost_scan(spec: PotentialSpec, ell: int, lams, grid: RadialGrid | None = None,
              threshold: float = TAIL_THRESHOLD) -> JostReport:
    """Tail ratio of the regular solution over a grid of energies.

    PASS when the ratio stays at or above ``threshold`` everywhere.
    """
    lams = [float(l) for l in lams]
    grid = grid or default_scan_grid(spec, lams)
    ratios = [tail_ratio(spec, ell, lam, grid) for lam in lams]
    mn = float(min(ratios))
    return JostReport(ell, lams, ratios, mn, bool(mn >= threshold),
                      {"grid": grid.spec(), "threshold": threshold})


def bound_state_energy(spec: PotentialSpec, ell: int, bracket, grid: RadialGrid, n_scan: int = 200,
                       xtol: float = 1e-12) -> float:
    """Lowest energy in ``bracket`` where ``u_reg(R)`` changes sign (a bound state)."""
    lo, hi = bracket
    es = np.linspace(lo, hi, n_scan)
    vals = np.array([regular_solution(spec, ell, e, grid)[-1, 0].real for e in es])
    sgn = np.sign(vals)
    idx = np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]
    if idx.size == 0:
        raise ValueError("no sign change of u_reg(R) in the bracket")
    i = int(idx[0])
    return float(brentq(lambda e: regular_solution(spec, ell, e, grid)[-1, 0].real,
                        es[i], es[i + 1], xtol=xtol))


def shooting_energy(spec: PotentialSpec, ell: int, bracket, r_end: float = 12.0,
                    xtol: float = 1e-14) -> float:
    """Bound-state energy by shooting with an adaptive integrator (independent reference).

    Integrates ``u'' = 2 (V_eff - E) u`` from the Frobenius start with
    DOP853 and finds the sign change of ``u(r_end)`` in ``bracket``.
    """
    from scipy.integrate import solve_ivp

    r0 = 1e-6
    s = ell + 0.5 * (spec.dim - 1)

    def u_end(E):
        def rhs(r, y):
            return [y[1], 2.0 * (float(reduced_potential(spec, ell, r)) - E) * y[0]]
        sol = solve_ivp(rhs, (r0, r_end), [r0**s, s * r0 ** (s - 1)], method="DOP853",
                        rtol=1e-12, atol=1e-14 * r0**s)
        return sol.y[0, -1]
    lo, hi = bracket
    es = np.linspace(lo, hi, 24)
    vals = np.array([u_end(e) for e in es])
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if idx.size == 0:
        raise ValueError("no sign change of u(r_end) in the bracket")
    i = int(idx[0])
    return float(brentq(u_end, es[i], es[i + 1], xtol=xtol))
