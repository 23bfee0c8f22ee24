"""High-energy decay ``||R(z)||_{B(m) -> B*(m)} ~ 2^{-m}`` on dyadic energy windows."""
from __future__ import annotations

import numpy as np

from ..efftime import SpectralParam
from ..grid import RadialGrid
from ..norms import decompose_radius, norm_B, norm_Bstar
from ..radial.fields import PartialWaveField
from ..radial.operators import apply_p_r
from ..radial.resolvent import RESIDUAL_TOL, apply_resolvent
from .common import LOWER_BOUND_LABEL, fit_slope, potential_floor, run_pool
from .plan import SweepPlan, check
from .report import ExperimentReport
from .sources import source_family

SLOPE_RANGE = (-1.15, -0.85)
FLAT_RANGE = (-0.15, 0.15)
IDENTITY_TOL = 1e-5
R0_LEVEL = 64.0  # grid radius in units of the level-0 problem


def level_energy(m: int, aperture: float) -> SpectralParam:
    """``lam = 2^{2m+1}`` and ``mu = b lam^{1/2} / 2`` inside the window ``(2^{2m}, 2^{2m+2}]``."""
    lam = 2.0 ** (2 * m + 1)
    return SpectralParam(lam, 0.5 * aperture * np.sqrt(lam))


def level_grid(spec, m: int, opts) -> RadialGrid:
    """Grid of the level-``m`` problem: radius ``R0 2^{-m}``, step resolving ``k ~ 2^m``."""
    zp = level_energy(m, 1.0)
    k = np.sqrt(2.0 * abs(zp.lam - potential_floor(spec, 1.0)))
    return RadialGrid.for_wavenumber(k, R0_LEVEL * 2.0 ** (-m), dim=spec.dim, ratio=opts.ratio,
                                     kh=opts.kh)


def dilate(field: PartialWaveField, m: int, grid: RadialGrid | None = None) -> PartialWaveField:
    """``U_m`` in reduced form: ``u -> 2^{m(d-1)/2} u(2^{-m} r)`` on the grid scaled by ``2^m``."""
    f = 2.0**m
    c = f ** (0.5 * (field.dim - 1))
    grid = grid or RadialGrid(field.grid.nodes * f, field.dim)
    d2 = None if field.d2u is None else c * field.d2u / f**2
    return PartialWaveField(grid, field.ells, c * field.u, c * field.du / f, d2, z=field.z)


def _level(plan: SweepPlan, m: int) -> dict:
    spec = plan.spec
    zp = level_energy(m, plan.aperture)
    grid = level_grid(spec, m, plan.grid)
    dec = decompose_radius(grid, m)
    sources = source_family(grid, None, shells=plan.shells, ells=plan.ells, gaussian=plan.gaussian, m=m)
    tol = plan.tol or RESIDUAL_TOL
    modes = {}
    # rescaled problem on the dilated grid: H_h with h = 2^{-m} at w = 2^{-2m} z
    h = 2.0 ** (-m)
    spec_h = spec.rescaled(h)
    zp_h = SpectralParam(zp.lam * h * h, zp.mu * h * h, zp.sign)
    grid_h = RadialGrid(grid.nodes / h, grid.dim)
    modes_h = {}
    recs = []
    for lab, psi in sources.items():
        phi = apply_resolvent(spec, zp, psi, modes=modes, residual_tol=tol)
        nB = norm_B(psi, dec)
        # U_m R(z) U_m^{-1} = 2^{-2m} R_h(w): compare on matching nodes
        psi_h = dilate(psi, m, grid_h)
        chi = apply_resolvent(spec_h, zp_h, psi_h, modes=modes_h, residual_tol=tol)
        lhs = dilate(phi, m, grid_h).u
        rhs = h * h * chi.u
        ident = float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))
        bstar = norm_Bstar(phi, dec)
        dil = norm_Bstar(dilate(phi, m, grid_h), decompose_radius(grid_h, 0))
        recs.append({"m": m, "lambda": zp.lam, "mu": zp.mu, "source": lab,
                     "ratio": bstar / nB, "p_r_ratio": norm_Bstar(apply_p_r(phi), dec) / nB,
                     "scaling_identity": ident,
                     "dilation_norm_factor": dil / bstar,
                     "dilation_norm_expected": 2.0 ** (0.5 * m * (grid.dim - 1)),
                     "residual": phi.meta["residual"], "nodes": len(grid)})
    return recs


def high_energy_scaling(plan: SweepPlan) -> ExperimentReport:
    """Slope of ``log2`` of the empirical ``B(m) -> B*(m)`` norm against ``m``.

    PASS when the slope lies in ``[-1.15, -0.85]``, the ``p_r`` variant is
    flat within ``+-0.15`` and the dilation identity holds to ``1e-5``.
    """
    check(plan)
    ms = sorted(plan.m_range)
    rep = ExperimentReport("high-energy", meta={"plan": plan.to_dict(), "norms": LOWER_BOUND_LABEL})
    for recs in run_pool(_level, [(plan, m) for m in ms], plan.jobs):
        for r in recs:
            rep.add(**r)
    sup = {q: np.array([max(r[q] for r in rep.records if r["m"] == m) for m in ms])
           for q in ("ratio", "p_r_ratio")}
    slope = fit_slope(ms, np.log2(sup["ratio"]))
    flat = fit_slope(ms, np.log2(sup["p_r_ratio"]))
    rep.meta["sup_ratio"] = sup["ratio"].tolist()
    rep.meta["sup_p_r_ratio"] = sup["p_r_ratio"].tolist()
    rep.verdict("resolvent_slope", "||R(z) psi||_B*(m) <= C 2^-m ||psi||_B(m)",
                SLOPE_RANGE[0] <= slope <= SLOPE_RANGE[1], slope, SLOPE_RANGE[1],
                detail=f"range {SLOPE_RANGE}")
    rep.verdict("p_r_resolvent_slope", "||p_r R(z) psi||_B*(m) <= C ||psi||_B(m)",
                FLAT_RANGE[0] <= flat <= FLAT_RANGE[1], flat, FLAT_RANGE[1], detail=f"range {FLAT_RANGE}")
    ident = max(r["scaling_identity"] for r in rep.records)
    rep.verdict("scaling_identity", "U_m R(z) U_m^-1 = 2^-2m R_h(2^-2m z)", ident <= IDENTITY_TOL,
                ident, IDENTITY_TOL)
    dil = max(abs(r["dilation_norm_factor"] / r["dilation_norm_expected"] - 1.0) for r in rep.records)
    rep.verdict("dilation_norm_identity", "||U_m phi||_B*(0) = 2^{m(d-1)/2} ||phi||_B*(m)",
                dil <= 1e-8, dil, 1e-8)
    res = max(r["residual"] for r in rep.records)
    rep.verdict("residual", "(H - z) R(z) psi = psi on [2 r0, R/2]", res <= (plan.tol or RESIDUAL_TOL),
                res, plan.tol or RESIDUAL_TOL)
    return rep
