"""Dyadic (Besov-type) norms of partial-wave fields.

Space is split into shells ``F_1 = {f < 2}``, ``F_n = {2^{n-1} <= f < 2^n}``
of a monotone radial function ``f``: the effective time ``tau(lam, r)`` for
the ``B`` and ``B*`` norms, or ``2^m r`` for the rescaled ``B(m)`` family.
Shell boundaries are resolved exactly so every quadrature cell lies in one
shell.  Integrals use 6-point Gauss-Legendre rules on the Hermite interpolant.
"""
from __future__ import annotations

import json
import weakref
from dataclasses import asdict, dataclass

import numpy as np

from . import _hermite
from .efftime import EffTimeTable
from .grid import RadialGrid
from .radial.farfield import tail_pair
from .radial.fields import PartialWaveField, sector_exponent

_X, _W = np.polynomial.legendre.leggauss(6)
_X = 0.5 * (_X + 1.0)
_W = 0.5 * _W


@dataclass(frozen=True, eq=False)
class DyadicDecomposition:
    """Quadrature points tagged with their shell index.

    Attributes
    ----------
    cell, t : ndarray
        Grid cell and local coordinate of each quadrature point.
    r, w : ndarray
        Radius and weight.
    f : ndarray
        Shell function at the quadrature points.
    shell : ndarray of int
        Shell index ``n >= 1``.
    f_max : float
        Shell function at the last node; shell ``n`` is complete when ``2^n <= f_max``.
    m : int
        Scale of the weights ``2^{(n - m)/2}``.
    """

    grid: RadialGrid
    kind: str
    m: int
    cell: np.ndarray
    t: np.ndarray
    r: np.ndarray
    w: np.ndarray
    f: np.ndarray
    shell: np.ndarray
    f_max: float
    thresholds: np.ndarray

    @property
    def n_shells(self) -> int:
        return int(self.shell.max())

    def complete(self, n: int) -> bool:
        return 2.0**n <= self.f_max * (1 + 1e-12)

    def shell_weights(self) -> np.ndarray:
        n = np.arange(1, self.n_shells + 1)
        return 2.0 ** (0.5 * (n - self.m))


def shell_index(f) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    out = np.ones(f.shape, dtype=int)
    big = f >= 2.0
    out[big] = np.floor(np.log2(f[big])).astype(int) + 1
    return out


def _build(grid: RadialGrid, kind: str, m: int, fun, thresholds) -> DyadicDecomposition:
    nodes = grid.nodes
    inner = thresholds[(thresholds > nodes[0]) & (thresholds < nodes[-1])]
    brk = np.union1d(nodes, inner)
    a, b = brk[:-1], brk[1:]
    r = a[:, None] + (b - a)[:, None] * _X[None, :]
    w = (b - a)[:, None] * _W[None, :]
    r, w = r.ravel(), w.ravel()
    cell, t = _hermite.locate(nodes, r)
    f = fun(r)
    return DyadicDecomposition(grid, kind, m, cell, t, r, w, f, shell_index(f),
                               float(fun(np.array([nodes[-1]]))[0]), np.asarray(thresholds))


def decompose_tau(grid: RadialGrid, table: EffTimeTable) -> DyadicDecomposition:
    """Shells of the effective time ``tau(lam, .)``."""
    tau_max = float(table.tau(grid.r_max))
    n_max = max(int(np.floor(np.log2(max(tau_max, 1.0)))), 1)
    thr = np.array([table.radius_at_tau(2.0**n) for n in range(1, n_max + 1)])
    thr = thr[np.isfinite(thr)]
    return _build(grid, "tau", 0, lambda r: np.asarray(table.tau(r)), thr)


def decompose_radius(grid: RadialGrid, m: int = 0) -> DyadicDecomposition:
    """Shells of ``2^m r``, weights ``2^{(n - m)/2}``."""
    n_max = max(int(np.floor(np.log2(max(2.0**m * grid.r_max, 1.0)))), 1)
    thr = np.array([2.0 ** (n - m) for n in range(1, n_max + 1)])
    return _build(grid, "radius", int(m), lambda r: 2.0**m * np.asarray(r), thr)


_PLAIN = weakref.WeakKeyDictionary()


def plain_quadrature(grid: RadialGrid) -> DyadicDecomposition:
    dec = _PLAIN.get(grid)
    if dec is None:
        dec = decompose_radius(grid, 0)
        _PLAIN[grid] = dec
    return dec


# -- masses -------------------------------------------------------------------

def _core_masses(field: PartialWaveField) -> np.ndarray:
    """``int_0^{r_0} |u|^2`` per sector assuming ``u ~ r^s`` below ``r_0``."""
    r0 = field.grid.r_min
    if r0 <= 0:
        return np.zeros(len(field.ells))
    s = np.array([sector_exponent(l, field.dim) for l in field.ells])
    return np.abs(field.u[:, 0]) ** 2 * r0 / (2.0 * s + 1.0)


def shell_norms(field: PartialWaveField, dec: DyadicDecomposition, weight=None) -> np.ndarray:
    """``||1_{F_n} psi||`` for ``n = 1 .. n_shells`` (grid part only)."""
    vals = field.evaluate(cell=dec.cell, t=dec.t)
    dens = np.sum(np.abs(vals) ** 2, axis=0) * dec.w
    if weight is not None:
        dens = dens * np.asarray(weight) ** 2
    masses = np.bincount(dec.shell - 1, weights=dens, minlength=dec.n_shells)
    core = float(np.sum(_core_masses(field)))
    if weight is not None:
        core *= float(np.asarray(weight)[0]) ** 2
    masses[0] += core
    return np.sqrt(masses)


def tail_mass(field: PartialWaveField) -> float:
    """``int_R^inf sum_l |u_l|^2`` from the stored tails (``inf`` if not decaying)."""
    if field.tails is None:
        return 0.0
    total = 0.0
    for t in field.tails:
        if t is None or t.amplitude == 0:
            continue
        total += abs(t.amplitude) ** 2 * tail_pair(t.far, t.far, conj_a=True).real
    return float(total)


def l2_norm(field: PartialWaveField, include_tail: bool = True) -> float:
    """``||psi||_{L^2}``, including the part beyond ``R`` when tails are known."""
    mass = float(np.sum(shell_norms(field, plain_quadrature(field.grid)) ** 2))
    if include_tail:
        mass += tail_mass(field)
    return float(np.sqrt(mass))


def inner(f1: PartialWaveField, f2: PartialWaveField, include_tail: bool = True) -> complex:
    """``<f1, f2> = sum_l int conj(u1) u2`` (linear in the second slot)."""
    dec = plain_quadrature(f1.grid)
    v1 = f1.evaluate(cell=dec.cell, t=dec.t)
    v2 = f2.evaluate(cell=dec.cell, t=dec.t)
    total = 0.0 + 0.0j
    r0 = f1.grid.r_min
    for i, l in enumerate(f1.ells):
        if l not in f2.ells:
            continue
        j = f2.index(l)
        total += np.sum(np.conj(v1[i]) * v2[j] * dec.w)
        s = sector_exponent(l, f1.dim)
        total += np.conj(f1.u[i, 0]) * f2.u[j, 0] * r0 / (2 * s + 1)
        if include_tail and f1.tails is not None and f2.tails is not None:
            t1, t2 = f1.tails[i], f2.tails[j]
            if t1 is not None and t2 is not None:
                total += np.conj(t1.amplitude) * t2.amplitude * tail_pair(t1.far, t2.far, conj_a=True)
    return complex(total)


def norm_B(field: PartialWaveField, dec: DyadicDecomposition, weight=None) -> float:
    """``sum_n 2^{(n-m)/2} ||1_{F_n} w psi||``; ``weight`` is sampled at ``dec.r``."""
    return float(np.sum(dec.shell_weights() * shell_norms(field, dec, weight)))


def norm_Bstar(field: PartialWaveField, dec: DyadicDecomposition, complete_only: bool = False,
               weight=None) -> float:
    """``sup_n 2^{-(n-m)/2} ||1_{F_n} w psi||`` over the shells covered by the grid."""
    prof = tail_profile(field, dec, complete_only, weight)
    return float(np.max(prof)) if prof.size else 0.0


def tail_profile(field: PartialWaveField, dec: DyadicDecomposition, complete_only: bool = True,
                 weight=None) -> np.ndarray:
    """``2^{-(n-m)/2} ||1_{F_n} w psi||`` per shell (complete shells only by default)."""
    prof = shell_norms(field, dec, weight) / dec.shell_weights()
    if complete_only:
        n_ok = sum(1 for n in range(1, dec.n_shells + 1) if dec.complete(n))
        prof = prof[:n_ok]
    return prof


def weighted_norm(field: PartialWaveField, dec: DyadicDecomposition, s: float) -> float:
    """``||<f>^s psi||`` with ``<f> = (1 + f^2)^{1/2}`` and ``f`` the shell function."""
    weight = (1.0 + dec.f**2) ** (0.5 * s)
    return float(np.sqrt(np.sum(shell_norms(field, dec, weight) ** 2)))


def norm_B_m(field: PartialWaveField, m: int) -> float:
    return norm_B(field, decompose_radius(field.grid, m))


def norm_Bstar_m(field: PartialWaveField, m: int) -> float:
    return norm_Bstar(field, decompose_radius(field.grid, m))


@dataclass
class NormReport:
    l2: float
    B: float
    Bstar: float
    shells: list
    kind: str
    m: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def norm_report(field: PartialWaveField, dec: DyadicDecomposition) -> NormReport:
    sh = shell_norms(field, dec)
    return NormReport(l2_norm(field), norm_B(field, dec), norm_Bstar(field, dec),
                      [float(x) for x in sh], dec.kind, dec.m)
