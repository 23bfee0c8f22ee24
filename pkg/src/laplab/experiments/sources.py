"""Versioned test-source family.

* bumps ``(1 - x^2)^6`` (in particular C^2) filling one dyadic shell (of ``tau`` or of ``2^m r``),
  one angular sector each;
* a Gaussian ``r e^{-r^2}`` in the ``l = 0`` sector of ``d = 3``;
* an off-centre Gaussian expanded in sectors (for truncation studies).

All profiles are given as reduced functions with analytic first and second
derivatives, so quintic interpolation is available to the solver.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import spherical_in

from ..efftime import EffTimeTable
from ..grid import RadialGrid
from ..radial.fields import PartialWaveField

SOURCE_FAMILY_VERSION = 1
# C^5: the finite-difference residual check sees the jump in u''' of rougher bumps
BUMP_POWER = 6
DEFAULT_SHELLS = (2, 3, 4)
DEFAULT_ELLS = (0, 1, 2)


def bump(r, a: float, b: float, power: int = BUMP_POWER):
    """``(1 - x^2)^power`` on ``[a, b]`` with ``x`` mapped to ``[-1, 1]``; returns ``(f, f', f'')``."""
    r = np.asarray(r, dtype=float)
    k = int(power)
    if k < 3:
        raise ValueError("bump power must be >= 3 for a C^2 profile")
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    x = (r - c) / h
    inside = np.abs(x) < 1
    s = np.where(inside, 1.0 - x * x, 0.0)
    f = s**k
    df = np.where(inside, -2.0 * k * x * s ** (k - 1) / h, 0.0)
    d2f = np.where(inside, (-2.0 * k * s ** (k - 1) + 4.0 * k * (k - 1) * x * x * s ** (k - 2)) / h**2, 0.0)
    return f, df, d2f


@dataclass(frozen=True)
class SourceSpec:
    """Label of one member of the family."""

    kind: str
    ell: int
    shell: int | None = None
    interval: tuple | None = None

    @property
    def label(self) -> str:
        if self.kind == "bump":
            return f"bump_n{self.shell}_l{self.ell}"
        return f"{self.kind}_l{self.ell}"


def shell_interval_tau(table: EffTimeTable, n: int) -> tuple:
    """Radii bounding the ``tau``-shell ``n`` (``[0, r(2)]`` for ``n = 1``)."""
    lo = 0.0 if n == 1 else table.radius_at_tau(2.0 ** (n - 1))
    hi = table.radius_at_tau(2.0**n)
    if not np.isfinite(hi):
        raise ValueError(f"shell {n} exceeds the effective-time table")
    return float(lo), float(hi)


def shell_interval_radius(n: int, m: int = 0) -> tuple:
    """Radii bounding shell ``n`` of ``2^m r``."""
    lo = 0.0 if n == 1 else 2.0 ** (n - 1 - m)
    return float(lo), float(2.0 ** (n - m))


def bump_field(grid: RadialGrid, ell: int, interval: tuple, scale: float = 1.0) -> PartialWaveField:
    f, df, d2f = bump(grid.nodes, *interval)
    return PartialWaveField(grid, (ell,), scale * f, scale * df, scale * d2f)


def gaussian_field(grid: RadialGrid, ell: int = 0, width: float = 1.0) -> PartialWaveField:
    """``r^{l+1} exp(-(r/width)^2)``."""
    r = grid.nodes
    s = ell + 1
    w2 = width * width
    g = np.exp(-r * r / w2)
    f = r**s * g
    df = (s * r ** (s - 1) - 2.0 * r ** (s + 1) / w2) * g
    d2f = (s * (s - 1) * r ** (s - 2) - 2.0 * (2 * s + 1) * r**s / w2 + 4.0 * r ** (s + 2) / w2**2) * g
    return PartialWaveField(grid, (ell,), f, df, d2f)


def offcenter_gaussian(grid: RadialGrid, r0: float, ells) -> PartialWaveField:
    """Sector coefficients of ``exp(-|x - x_0|^2)`` in ``d = 3`` with ``|x_0| = r0`` on the axis.

    The reduced coefficient of sector ``l`` is
    ``r e^{-r^2 - r0^2} sqrt(4 pi (2l+1)) i_l(2 r r0)``; the full norm is
    ``(pi/2)^{3/2}``.
    """
    if grid.dim != 3:
        raise ValueError("off-centre Gaussian is defined for d = 3")
    r = grid.nodes
    rows, drows, d2rows = [], [], []
    for l in ells:
        c = np.sqrt(4.0 * np.pi * (2 * l + 1))
        x = 2.0 * r * r0
        il = spherical_in(l, x)
        dil = spherical_in(l, x, derivative=True)
        # i_l'' from the modified spherical Bessel equation
        with np.errstate(divide="ignore", invalid="ignore"):
            d2il = np.where(x > 0, il * (1.0 + l * (l + 1) / np.maximum(x, 1e-300) ** 2)
                            - 2.0 * dil / np.maximum(x, 1e-300), (1.0 / 3.0 if l == 0 else
                                                                   (2.0 / 15.0 if l == 2 else 0.0)))
        e = np.exp(-r * r - r0 * r0)
        # f = c r e i_l(2 r r0)
        A = r * e
        dA = (1.0 - 2.0 * r * r) * e
        d2A = (-6.0 * r + 4.0 * r**3) * e
        B = il
        dB = 2.0 * r0 * dil
        d2B = 4.0 * r0 * r0 * d2il
        rows.append(c * A * B)
        drows.append(c * (dA * B + A * dB))
        d2rows.append(c * (d2A * B + 2.0 * dA * dB + A * d2B))
    return PartialWaveField(grid, tuple(ells), np.array(rows), np.array(drows), np.array(d2rows))


def source_family(grid: RadialGrid, table: EffTimeTable | None = None, *, shells=DEFAULT_SHELLS,
                  ells=DEFAULT_ELLS, gaussian: bool = True, m: int | None = None) -> dict:
    """The standard family ``{label: field}``.

    Bumps fill ``tau``-shells when ``table`` is given, shells of ``2^m r``
    otherwise.  Only bumps inside the grid are kept.
    """
    out = {}
    for n in shells:
        if table is not None:
            iv = shell_interval_tau(table, n)
        else:
            iv = shell_interval_radius(n, m or 0)
        if iv[1] > grid.r_max:
            continue
        for l in ells:
            if grid.dim == 1 and l > 1:
                continue
            out[SourceSpec("bump", l, n, iv).label] = bump_field(grid, l, iv)
    if gaussian and grid.dim == 3:
        width = 1.0 if m is None else 2.0 ** (-m)
        f = gaussian_field(grid, 0, width)
        out[SourceSpec("gaussian", 0).label] = f
    return out
