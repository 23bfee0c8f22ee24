"""Classical speed ``a``, effective time ``tau``, eikonal ``S``, the
asymptotic complex phase ``b_z`` and the critical radiation exponent.

``tau(lam, r) = int_0^r a^-1`` and ``S(lam, r) = int_0^r a`` are tabulated once
per ``(spec, lam)`` with an adaptive Gauss-Kronrod rule per grid cell.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _hermite
from .errors import DomainError, NumericalAccuracyError
from .grid import RadialGrid
from .potential import PotentialSpec, eval_potential, japanese

# Gauss-Kronrod 7/15 on [-1, 1]
_XK = np.array([
    -0.991455371120812639206854697526329, -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926, -0.741531185599394439863864773280788,
    -0.586087235467691130294144845693013, -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245, 0.0,
    0.207784955007898467600689403773245, 0.405845151377397166906606412076961,
    0.586087235467691130294144845693013, 0.741531185599394439863864773280788,
    0.864864423359769072789712788640926, 0.949107912342758524526189684047851,
    0.991455371120812639206854697526329])
_WK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
    0.204432940075298892414161999234649, 0.190350578064785409913256402421014,
    0.169004726639267902826583426598550, 0.140653259715525918745189590510238,
    0.104790010322250183839876322541518, 0.063092092629978553290700663189204,
    0.022935322010529224963732008058970])
_WG = np.array([0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
                0.381830050505118944950369775488975, 0.279705391489276667901467771423780,
                0.129484966168869693270611432679082])
_G_IN_K = np.arange(1, 15, 2)


def speed_a(spec: PotentialSpec, lam: float, r):
    """``a(lam, r) = (2 max(lam, 0) - 2 V(r))^{1/2}``."""
    V = eval_potential(spec, r)[0]
    w = 2.0 * max(lam, 0.0) - 2.0 * np.asarray(V)
    if np.any(w <= 0):
        raise DomainError("a(lam, r) is not positive: potential is not attractive here")
    out = np.sqrt(w)
    return float(out) if np.ndim(out) == 0 else out


def _speed_and_slope(spec, lam, r):
    V, dV, _, _ = eval_potential(spec, r)
    a = np.sqrt(2.0 * max(lam, 0.0) - 2.0 * V)
    return a, -dV / a


def gk_cumulative(fun, edges, rtol=1e-8, atol=1e-300, max_depth=40):
    """Integrals of ``fun`` over consecutive cells ``[edges[i], edges[i+1]]``.

    Cells whose Kronrod/Gauss discrepancy exceeds ``rtol`` are bisected.
    """
    edges = np.asarray(edges, dtype=float)
    ncell = edges.size - 1
    result = np.zeros(ncell)
    lo, hi, owner = edges[:-1].copy(), edges[1:].copy(), np.arange(ncell)
    for _ in range(max_depth):
        if lo.size == 0:
            return result
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        vals = fun(mid[:, None] + half[:, None] * _XK[None, :])
        k = half * (vals @ _WK)
        g = half * (vals[:, _G_IN_K] @ _WG)
        err = np.abs(k - g)
        ok = err <= rtol * np.abs(k) + atol
        np.add.at(result, owner[ok], k[ok])
        bad = ~ok
        lo, hi, owner = (np.concatenate([lo[bad], mid[bad]]), np.concatenate([mid[bad], hi[bad]]),
                         np.concatenate([owner[bad], owner[bad]]))
    cell = int(owner[0])
    raise NumericalAccuracyError(
        f"quadrature did not converge in cell {cell} [{edges[cell]:.6g}, {edges[cell + 1]:.6g}]")


@dataclass(frozen=True, eq=False)
class EffTimeTable:
    """``a``, ``tau``, ``S`` sampled on a grid for one energy."""

    spec: PotentialSpec
    grid: RadialGrid
    lam: float
    a: np.ndarray
    tau_values: np.ndarray
    S_values: np.ndarray
    da: np.ndarray = field(repr=False, default=None)

    @property
    def r(self):
        return self.grid.nodes

    def tau(self, r, deriv=0):
        """Cubic Hermite interpolation of ``tau`` using ``tau' = 1/a``."""
        r = np.asarray(r, dtype=float)
        if np.any(r < self.r[0] - 1e-14) or np.any(r > self.r[-1] * (1 + 1e-14)):
            raise DomainError("radius outside the effective-time table")
        out = _hermite.evaluate(self.r, self.tau_values, 1.0 / self.a, r=r, deriv=deriv)
        return float(out) if out.ndim == 0 else out

    def S(self, r):
        r = np.asarray(r, dtype=float)
        out = _hermite.evaluate(self.r, self.S_values, self.a, r=r)
        return float(out) if out.ndim == 0 else out

    def radius_at_tau(self, t: float) -> float:
        """Inverse of ``tau`` (``nan`` when ``t`` exceeds the tabulated range)."""
        tv = self.tau_values
        if t <= tv[0]:
            return float(self.r[0])
        if t > tv[-1]:
            return float("nan")
        i = int(np.searchsorted(tv, t) - 1)
        lo, hi = self.r[i], self.r[i + 1]
        from scipy.optimize import brentq
        return float(brentq(lambda x: self.tau(x) - t, lo, hi, xtol=1e-14 * max(hi, 1.0),
                            rtol=1e-15))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "a", "tau", "S"])
            for row in zip(self.r, self.a, self.tau_values, self.S_values):
                w.writerow([repr(float(x)) for x in row])


def build_efftime(spec: PotentialSpec, lam: float, grid: RadialGrid, rtol: float = 1e-8) -> EffTimeTable:
    """Tabulate ``tau`` and ``S`` on ``grid`` (the piece ``[0, r_0]`` is included)."""
    r = grid.nodes
    edges = np.concatenate([[0.0], r]) if r[0] > 0 else r
    inv_a = gk_cumulative(lambda x: 1.0 / speed_a(spec, lam, x), edges, rtol)
    fwd_a = gk_cumulative(lambda x: speed_a(spec, lam, x), edges, rtol)
    tau = np.cumsum(inv_a)
    S = np.cumsum(fwd_a)
    if r[0] == 0:
        tau = np.concatenate([[0.0], tau])
        S = np.concatenate([[0.0], S])
    a, da = _speed_and_slope(spec, lam, r)
    return EffTimeTable(spec, grid, float(lam), a, tau, S, da)


def default_table_grid(r_max: float = 1e4, r_min: float = 1e-3, ratio: float = 1.01,
                       dim: int = 3) -> RadialGrid:
    return RadialGrid.geometric(r_min, r_max, ratio, dim=dim, include_origin=True)


# -- two-sided bounds --------------------------------------------------------

def check_tau_S_bounds(table: EffTimeTable, tau0_table: EffTimeTable | None = None,
                       r_range=None) -> dict:
    """Empirical ``(min, max)`` of the four two-sided ratio families.

    ``tau0_power``: ``tau(0, r) / (<lam>^{-1/2} r <r>^{nu/2})``;
    ``tau_linear``: ``tau(lam, r) / (<lam>^{-1/2} r)`` (only meaningful for ``lam > 0``);
    ``S_ra``: ``S / (r a)``; ``tau_ra``: ``tau a / r``.
    """
    spec, lam = table.spec, table.lam
    r = table.r
    mask = r > 0
    if r_range is not None:
        mask &= (r >= r_range[0]) & (r <= r_range[1])
    rr, a = r[mask], table.a[mask]
    jl = japanese(lam) ** -0.5
    if tau0_table is None:
        tau0_table = table if lam <= 0 else build_efftime(spec, 0.0, table.grid)
    tau0 = tau0_table.tau_values[mask]
    fams = {
        "tau0_power": (tau0 / (jl * rr * japanese(rr) ** (spec.nu / 2)), True),
        "tau_linear": (table.tau_values[mask] / (jl * rr), lam > 0),
        "S_ra": (table.S_values[mask] / (rr * a), True),
        "tau_ra": (table.tau_values[mask] * a / rr, True),
    }
    return {k: {"min": float(v.min()), "max": float(v.max()), "applicable": bool(app)}
            for k, (v, app) in fams.items()}


# -- spectral parameter and asymptotic phase --------------------------------

@dataclass(frozen=True)
class SpectralParam:
    """``z = lam + i mu`` (``sign='+'``) or ``lam - i mu`` (``sign='-'``), ``mu >= 0``."""

    lam: float
    mu: float = 0.0
    sign: str = "+"

    def __post_init__(self):
        if self.sign not in ("+", "-"):
            raise ValueError("sign must be '+' or '-'")
        if self.mu < 0:
            raise ValueError("mu must be non-negative")
        if self.mu == 0 and self.lam < 0:
            raise DomainError("boundary values need lam >= 0")

    @property
    def s(self) -> int:
        return 1 if self.sign == "+" else -1

    @property
    def z(self) -> complex:
        return complex(self.lam, self.s * self.mu)

    def conjugate(self) -> "SpectralParam":
        return SpectralParam(self.lam, self.mu, "-" if self.sign == "+" else "+")

    def in_region(self, rho: float, omega: float) -> bool:
        """Membership in ``{0 < |z| < rho, 0 < +-arg z < omega}`` (closure in ``mu`` when ``mu = 0``)."""
        z = self.z
        if not (0 < abs(z) < rho) and not (self.mu == 0 and abs(z) < rho):
            return False
        arg = self.s * np.angle(z)
        if self.mu == 0:
            return self.lam >= 0
        return 0 < arg < omega

    def to_dict(self):
        return {"lambda": self.lam, "mu": self.mu, "sign": self.sign}


def phase_b(spec: PotentialSpec, z: SpectralParam, r, deriv: bool = False):
    """``b_z = sqrt(2(z - V)) -+ i V' / (4 (z - V))`` with ``Re sqrt > 0``."""
    V, dV, d2V, _ = eval_potential(spec, r)
    zc = z.z
    w = 2.0 * (zc - np.asarray(V))
    if np.any((np.imag(w) == 0) & (np.real(w) <= 0)):
        raise DomainError("2(z - V) lies on the branch cut (-inf, 0]")
    k = np.sqrt(w.astype(complex))
    b = k - z.s * 1j * dV / (4.0 * (zc - V))
    if not deriv:
        return b
    db = -dV / k - z.s * 1j * (d2V / (4.0 * (zc - V)) + dV * dV / (4.0 * (zc - V) ** 2))
    return b, db


# -- critical exponent ----------------------------------------------------

@dataclass
class BetaReport:
    value: float
    terms: tuple
    tail_min: dict
    rho: float

    def to_dict(self):
        return {"beta_c": self.value, "terms": list(self.terms),
                "tail_min": {str(k): v for k, v in self.tail_min.items()}, "rho": self.rho}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)


def beta_c(spec: PotentialSpec, rho: float, tables=None, r_tail_frac: float = 0.1) -> BetaReport:
    """Critical exponent ``min{(2-nu)/(2(2+nu)), (nu'-nu)/(2+nu), (2+3eps)/8 inf liminf tau a / r}``.

    ``tables`` must contain effective-time tables for a grid of energies in
    ``[0, rho]``; the liminf is the minimum of ``tau a / r`` over the last
    decade ``[r_tail_frac R_max, R_max]``.
    """
    if not tables:
        raise ValueError("beta_c needs effective-time tables on an energy grid in [0, rho]")
    nu, nup, eps = spec.nu, spec.nu_prime, spec.eps
    t1 = (2 - nu) / (2 * (2 + nu))
    t2 = (nup - nu) / (2 + nu)
    tails = {}
    for tb in tables:
        if tb.lam < 0 or tb.lam > rho + 1e-12:
            raise ValueError(f"table energy {tb.lam} outside [0, {rho}]")
        r = tb.r
        m = (r >= r_tail_frac * r[-1]) & (r > 0)
        tails[tb.lam] = float(np.min(tb.tau_values[m] * tb.a[m] / r[m]))
    t3 = (2 + 3 * eps) / 8 * min(tails.values())
    return BetaReport(min(t1, t2, t3), (t1, t2, t3), tails, rho)


def efftime_tables(spec: PotentialSpec, lams, grid: RadialGrid | None = None):
    grid = grid or default_table_grid(dim=spec.dim)
    return [build_efftime(spec, float(l), grid) for l in lams]


def write_beta_report(report: BetaReport, path) -> None:
    Path(path).write_text(report.to_json())
