"""Partial-wave fields ``psi(r, omega) = r^{-(d-1)/2} sum_l u_l(r) Y_l(omega)``.

Only the reduced radial functions ``u_l`` are stored.  The ``L^2`` norm of
the field is ``sum_l int |u_l|^2 dr`` because the angular harmonics are
orthonormal; in ``d = 1`` the two "sectors" are the even and odd parts
on the half-line.
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .. import _hermite
from ..grid import RadialGrid


def sector_exponent(ell: int, dim: int) -> float:
    """Leading power ``s`` of the regular solution, ``u ~ r^s`` at the origin."""
    return ell + 0.5 * (dim - 1)


def check_ells(ells, dim: int) -> tuple:
    ells = tuple(int(l) for l in ells)
    if len(set(ells)) != len(ells):
        raise ValueError("duplicate angular indices")
    if any(l < 0 for l in ells):
        raise ValueError("angular indices must be non-negative")
    if dim == 1 and any(l > 1 for l in ells):
        raise ValueError("in d = 1 only the parity sectors l = 0 (even) and l = 1 (odd) exist")
    return ells


@dataclass(frozen=True, eq=False)
class Tail:
    """Continuation of a sector beyond ``R`` as ``u(R) * f(r)`` with ``f(R) = 1``.

    ``far`` is a :class:`laplab.radial.farfield.FarField` describing ``f``.
    """

    far: object
    amplitude: complex


@dataclass(frozen=True, eq=False)
class PartialWaveField:
    """Reduced radial functions on a grid.

    Attributes
    ----------
    grid : RadialGrid
    ells : tuple of int
        Angular index of each row.
    u, du : ndarray, shape (len(ells), len(grid))
        Values and radial derivatives.
    d2u : ndarray or None
        Second derivatives; when present, interpolation is quintic.
    z : complex or None
        Spectral parameter the field was produced at (metadata).
    tails : tuple or None
        One :class:`Tail` (or ``None``) per sector.
    """

    grid: RadialGrid
    ells: tuple
    u: np.ndarray
    du: np.ndarray
    d2u: np.ndarray | None = None
    z: complex | None = None
    tails: tuple | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        ells = check_ells(self.ells, self.grid.dim)
        object.__setattr__(self, "ells", ells)
        shape = (len(ells), len(self.grid))
        for name in ("u", "du", "d2u"):
            a = getattr(self, name)
            if a is None:
                continue
            a = np.asarray(a, dtype=complex).reshape(shape)
            object.__setattr__(self, name, a)
        if self.tails is not None and len(self.tails) != len(ells):
            raise ValueError("one tail entry per sector expected")

    # -- basic algebra ------------------------------------------------------
    @property
    def dim(self) -> int:
        return self.grid.dim

    def index(self, ell: int) -> int:
        return self.ells.index(ell)

    def sector(self, ell: int) -> "PartialWaveField":
        i = self.index(ell)
        sl = slice(i, i + 1)
        return replace(self, ells=(ell,), u=self.u[sl], du=self.du[sl],
                       d2u=None if self.d2u is None else self.d2u[sl],
                       tails=None if self.tails is None else (self.tails[i],))

    def scaled(self, c) -> "PartialWaveField":
        tails = None
        if self.tails is not None:
            tails = tuple(None if t is None else Tail(t.far, c * t.amplitude) for t in self.tails)
        return replace(self, u=c * self.u, du=c * self.du,
                       d2u=None if self.d2u is None else c * self.d2u, tails=tails)

    def conj(self) -> "PartialWaveField":
        tails = None
        if self.tails is not None:
            tails = tuple(None if t is None else Tail(t.far.conjugate(), np.conj(t.amplitude))
                          for t in self.tails)
        return replace(self, u=self.u.conj(), du=self.du.conj(),
                       d2u=None if self.d2u is None else self.d2u.conj(), tails=tails,
                       z=None if self.z is None else np.conj(self.z))

    def _combine(self, other: "PartialWaveField", sign: float) -> "PartialWaveField":
        if other.grid is not self.grid and not np.array_equal(other.grid.nodes, self.grid.nodes):
            raise ValueError("fields live on different grids")
        ells = tuple(sorted(set(self.ells) | set(other.ells)))
        n = len(self.grid)
        out = {k: np.zeros((len(ells), n), dtype=complex) for k in ("u", "du", "d2u")}
        has_d2 = self.d2u is not None and other.d2u is not None
        tails = []
        for i, l in enumerate(ells):
            ta = tb = None
            for f, sg in ((self, 1.0), (other, sign)):
                if l in f.ells:
                    j = f.index(l)
                    out["u"][i] += sg * f.u[j]
                    out["du"][i] += sg * f.du[j]
                    if has_d2:
                        out["d2u"][i] += sg * f.d2u[j]
            # tails survive only when both share the same profile
            t1 = self.tails[self.index(l)] if self.tails and l in self.ells else None
            t2 = other.tails[other.index(l)] if other.tails and l in other.ells else None
            if l not in other.ells:
                ta = t1
            elif l not in self.ells:
                ta = None if t2 is None else Tail(t2.far, sign * t2.amplitude)
            elif t1 is not None and t2 is not None and t1.far is t2.far:
                ta = Tail(t1.far, t1.amplitude + sign * t2.amplitude)
            tails.append(ta)
        return PartialWaveField(self.grid, ells, out["u"], out["du"], out["d2u"] if has_d2 else None,
                                self.z, tuple(tails) if any(t is not None for t in tails) else None)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __mul__(self, c):
        return self.scaled(c)

    __rmul__ = __mul__

    # -- evaluation ---------------------------------------------------------
    def evaluate(self, r=None, *, cell=None, t=None, deriv=0):
        """Hermite interpolant of every sector, shape ``(len(ells), ...)``."""
        return _hermite.evaluate(self.grid.nodes, self.u, self.du, self.d2u,
                                 cell=cell, t=t, r=r, deriv=deriv)

    # -- serialisation ------------------------------------------------------
    def header(self) -> dict:
        z = None if self.z is None else [float(np.real(self.z)), float(np.imag(self.z))]
        return {"dim": self.dim, "ells": list(self.ells), "L_max": max(self.ells),
                "z": z, "grid": self.grid.spec(), **self.meta}

    def to_csv(self, path) -> None:
        """CSV with one ``# {json header}`` line; columns ``r, Re u_l, Im u_l, ...``."""
        cols = ["r"]
        for l in self.ells:
            cols += [f"re_u{l}", f"im_u{l}", f"re_du{l}", f"im_du{l}"]
        data = [self.grid.nodes]
        for i in range(len(self.ells)):
            data += [self.u[i].real, self.u[i].imag, self.du[i].real, self.du[i].imag]
        arr = np.column_stack(data)
        buf = io.StringIO()
        buf.write("# " + json.dumps(self.header()) + "\n")
        w = csv.writer(buf)
        w.writerow(cols)
        w.writerows(arr.tolist())
        Path(path).write_text(buf.getvalue())

    @classmethod
    def from_csv(cls, path) -> "PartialWaveField":
        text = Path(path).read_text().splitlines()
        head = json.loads(text[0][2:])
        arr = np.loadtxt(text[2:], delimiter=",", ndmin=2)
        grid = RadialGrid(arr[:, 0], head["dim"])
        ells = tuple(head["ells"])
        u = np.array([arr[:, 1 + 4 * i] + 1j * arr[:, 2 + 4 * i] for i in range(len(ells))])
        du = np.array([arr[:, 3 + 4 * i] + 1j * arr[:, 4 + 4 * i] for i in range(len(ells))])
        z = None if head.get("z") is None else complex(*head["z"])
        return cls(grid, ells, u, du, z=z)


def field_from_function(grid: RadialGrid, ells, fun, dfun=None, d2fun=None, **kw) -> PartialWaveField:
    """Sample ``fun(ell, r)`` (and optionally its derivatives) on the grid.

    Without ``dfun`` the derivative is taken by complex-step-free central
    differences of ``fun``; supply analytic derivatives when accuracy matters.
    """
    ells = check_ells(ells, grid.dim)
    r = grid.nodes
    u = np.array([np.asarray(fun(l, r), dtype=complex) for l in ells])
    if dfun is None:
        eps = 1e-6 * np.maximum(r, 1.0)
        du = np.array([(np.asarray(fun(l, r + eps)) - np.asarray(fun(l, np.maximum(r - eps, 0.0))))
                       / (r + eps - np.maximum(r - eps, 0.0)) for l in ells])
    else:
        du = np.array([np.asarray(dfun(l, r), dtype=complex) for l in ells])
    d2u = None if d2fun is None else np.array([np.asarray(d2fun(l, r), dtype=complex) for l in ells])
    return PartialWaveField(grid, ells, u, du, d2u, **kw)
