"""Radial sampling shared by tables, fields and norms."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Strictly increasing radial nodes ``r_0 < r_1 < ... < r_N``.

    ``r_0`` may be zero for quadrature tables; the partial-wave solver needs
    ``r_0 = eps_core > 0``.
    """

    nodes: np.ndarray
    dim: int = 3

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("grid needs at least two nodes")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("grid nodes must be strictly increasing")
        if nodes[0] < 0:
            raise ValueError("grid nodes must be non-negative")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    def __len__(self):
        return self.nodes.size

    @property
    def r_min(self) -> float:
        return float(self.nodes[0])

    @property
    def r_max(self) -> float:
        return float(self.nodes[-1])

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.nodes)

    def spec(self) -> dict:
        return {"n": int(self.nodes.size), "r_min": self.r_min, "r_max": self.r_max,
                "dim": int(self.dim), "h_max": float(self.steps.max())}

    # -- constructors -------------------------------------------------------
    @classmethod
    def geometric(cls, r_min: float, r_max: float, ratio: float = 1.01, dim: int = 3,
                  include_origin: bool = False, h_max: float | None = None) -> "RadialGrid":
        """Geometric spacing from ``r_min`` capped at step ``h_max``."""
        return cls(_hybrid_nodes(r_min, r_max, ratio, h_max, include_origin), dim)

    @classmethod
    def for_wavenumber(cls, k_max: float, r_max: float, *, dim: int = 3, ratio: float = 1.01,
                       kh: float = 0.08, eps_core: float | None = None) -> "RadialGrid":
        """Solver grid: geometric near the origin, then ``k_max h <= kh``.

        ``eps_core`` defaults to ``1e-4`` times the wavelength ``2 pi / k_max``.
        """
        if eps_core is None:
            eps_core = 1e-4 * 2.0 * np.pi / k_max
        return cls(_hybrid_nodes(eps_core, r_max, ratio, kh / k_max, False), dim)


def _hybrid_nodes(r_min, r_max, ratio, h_max, include_origin):
    if r_min <= 0 or r_max <= r_min or ratio <= 1:
        raise ValueError("need 0 < r_min < r_max and ratio > 1")
    h_max = np.inf if h_max is None else float(h_max)
    # geometric part until the step reaches h_max
    r_switch = min(h_max / (ratio - 1.0), r_max)
    n_geo = max(int(np.ceil(np.log(r_switch / r_min) / np.log(ratio))), 1)
    geo = r_min * ratio ** np.arange(n_geo + 1)
    geo = geo[geo < r_switch]
    start = geo[-1]
    if r_max - start > 0:
        n_uni = max(int(np.ceil((r_max - start) / min(h_max, (r_max - start)))), 1)
        uni = np.linspace(start, r_max, n_uni + 1)[1:]
    else:
        uni = np.empty(0)
    nodes = np.concatenate([geo, uni])
    if nodes[-1] < r_max:
        nodes = np.append(nodes, r_max)
    if include_origin:
        nodes = np.concatenate([[0.0], nodes])
    return nodes
