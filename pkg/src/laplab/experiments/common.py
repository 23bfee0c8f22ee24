"""Shared plumbing of the experiment runners: grids, per-energy contexts, work pool."""
from __future__ import annotations

import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..efftime import EffTimeTable, build_efftime, default_table_grid, speed_a
from ..grid import RadialGrid
from ..norms import DyadicDecomposition, decompose_tau
from ..potential import PotentialSpec, eval_potential
from .plan import GridOptions, SweepPlan
from .sources import source_family

LOWER_BOUND_LABEL = "empirical lower bound on the operator norm (finite test family)"


def potential_floor(spec: PotentialSpec, r_max: float) -> float:
    """``min(0, min_r (V + q))`` sampled on a log grid."""
    r = np.geomspace(1e-4, max(r_max, 1.0), 4000)
    V, _, _, q = eval_potential(spec, r)
    return float(min(0.0, np.min(V + q)))


def solver_grid(spec: PotentialSpec, z: complex, opts: GridOptions) -> RadialGrid:
    """Grid resolving the largest local wavenumber ``|2(z - V)|^{1/2}``."""
    k = np.sqrt(2.0 * abs(complex(z) - potential_floor(spec, opts.r_max)))
    return RadialGrid.for_wavenumber(max(float(k), 1.0), opts.r_max, dim=spec.dim,
                                     ratio=opts.ratio, kh=opts.kh)


def table_for(spec: PotentialSpec, lam: float, r_max: float) -> EffTimeTable:
    grid = default_table_grid(r_max=max(1e4, 2.0 * r_max), dim=spec.dim)
    return build_efftime(spec.without_q(), lam, grid)


@dataclass(eq=False)
class EnergyContext:
    """Everything that depends on ``lam`` but not on ``mu``."""

    spec: PotentialSpec
    lam: float
    grid: RadialGrid
    table: EffTimeTable
    dec: DyadicDecomposition
    sources: dict

    @property
    def a_quad(self) -> np.ndarray:
        """``a(lam, r)`` at the quadrature points of ``dec``."""
        return speed_a(self.spec.without_q(), self.lam, self.dec.r)

    @property
    def tau_quad(self) -> np.ndarray:
        return self.dec.f


_CONTEXTS: dict = {}


def energy_context(plan: SweepPlan, lam: float, ells=None, shells=None) -> EnergyContext:
    """Grid, ``tau`` table, shell decomposition and sources at ``lam`` (cached per process)."""
    ells = tuple(plan.ells if ells is None else ells)
    shells = tuple(plan.shells if shells is None else shells)
    key = (json.dumps(plan.spec.to_dict(), sort_keys=True), float(lam), plan.grid, ells, shells,
           plan.gaussian)
    ctx = _CONTEXTS.get(key)
    if ctx is None:
        ctx = _CONTEXTS[key] = _make_context(plan, lam, ells, shells)
    return ctx


def _make_context(plan: SweepPlan, lam: float, ells, shells) -> EnergyContext:
    grid = solver_grid(plan.spec, lam, plan.grid)
    table = table_for(plan.spec, lam, plan.grid.r_max)
    dec = decompose_tau(grid, table)
    src = source_family(grid, table, shells=shells, ells=ells, gaussian=plan.gaussian)
    return EnergyContext(plan.spec, float(lam), grid, table, dec, src)


def node_cut(grid: RadialGrid, r_cut: float) -> float:
    """Largest node not exceeding ``r_cut`` (so a window ends on a cell edge)."""
    nodes = grid.nodes
    return float(nodes[max(int(np.searchsorted(nodes, r_cut, side="right")) - 1, 0)])


def default_jobs() -> int:
    try:
        return max(len(os.sched_getaffinity(0)), 1)
    except AttributeError:  # pragma: no cover - non-Linux
        return max(os.cpu_count() or 1, 1)


def run_pool(func, tasks, jobs: int = 1) -> list:
    """``[func(*t) for t in tasks]``, in a process pool when ``jobs > 1``.

    Results come back in task order, so aggregation does not depend on
    scheduling.
    """
    tasks = list(tasks)
    if jobs <= 1 or len(tasks) <= 1:
        return [func(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as ex:
        futs = [ex.submit(func, *t) for t in tasks]
        return [f.result() for f in futs]


def growth(values) -> float:
    """Ratio of the last to the first entry of a sequence ordered by decreasing ``mu``."""
    v = np.asarray(values, dtype=float)
    return float(v[-1] / v[0])


def spread(values) -> float:
    """``max / min`` of a positive series."""
    v = np.asarray(values, dtype=float)
    return float(np.max(v) / np.min(v))


def fit_slope(x, y) -> float:
    """Least-squares slope of ``y`` against ``x``."""
    return float(np.polyfit(np.asarray(x, float), np.asarray(y, float), 1)[0])
