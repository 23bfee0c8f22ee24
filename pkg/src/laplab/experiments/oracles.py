"""Algebraic oracles of the resolvent on the full ``(lam, mu, l)`` test matrix."""
from __future__ import annotations

import numpy as np

from ..efftime import SpectralParam
from ..norms import inner, plain_quadrature, shell_norms, l2_norm
from ..radial.fields import PartialWaveField
from ..radial.modes import WRONSKIAN_TOL
from ..radial.resolvent import RESIDUAL_TOL, apply_resolvent
from .common import energy_context, node_cut, run_pool
from .plan import SweepPlan, check
from .report import ExperimentReport

FIRST_IDENTITY_TOL = 1e-5
IM_IDENTITY_TOL = 1e-6


def stacked_source(sources: dict, ells) -> PartialWaveField:
    """One field carrying the shell bump of every sector in ``ells``."""
    rows = [sources[f"bump_n2_l{l}"] for l in ells]
    out = rows[0]
    for f in rows[1:]:
        out = out + f
    return out


def window_norm(field: PartialWaveField, r_cut: float) -> float:
    """``L^2`` norm of the grid part on ``[0, r_cut]``."""
    dec = plain_quadrature(field.grid)
    return float(np.sqrt(np.sum(shell_norms(field, dec, (dec.r <= r_cut).astype(float)) ** 2)))


def _point(plan: SweepPlan, lam: float, mu: float) -> list:
    ells = tuple(range(plan.lmax + 1))
    ctx = energy_context(plan, lam, ells=ells, shells=(2,))
    psi = stacked_source(ctx.sources, ells)
    zp = SpectralParam(lam, mu, plan.sign)
    modes = {}
    phi = apply_resolvent(plan.spec, zp, psi, check=False, modes=modes)
    # R(conj z) psi = conj(R(z) psi) for real sources; then R(z) R(conj z) psi
    phi_bar = phi.conj()
    chi = apply_resolvent(plan.spec, zp, phi_bar, check=False, modes=modes)
    cut = node_cut(ctx.grid, 0.5 * ctx.grid.r_max)
    lhs = phi - phi_bar
    rhs = chi.scaled(zp.z - np.conj(zp.z))
    first = window_norm(lhs - rhs, cut) / window_norm(lhs, cut)
    recs = []
    for ell in ells:
        p_l, f_l = psi.sector(ell), phi.sector(ell)
        im = inner(p_l, f_l).imag
        mass = mu * l2_norm(f_l) ** 2
        recs.append({"lambda": lam, "mu": mu, "ell": ell,
                     "im_identity": abs(im - zp.s * mass) / abs(mass),
                     "wronskian_variation": modes[ell].wronskian_variation,
                     "residual": phi.meta["residual"], "residual_second": chi.meta["residual"],
                     "first_identity": first})
    return recs


def resolvent_oracles(plan: SweepPlan) -> ExperimentReport:
    """Residual, first-resolvent identity, imaginary-part identity and Wronskian checks.

    The test vector carries a ``C^2`` bump on ``tau``-shell 2 in every sector
    ``l <= lmax``; the second parameter of the first identity is ``conj z``.
    """
    check(plan)
    rep = ExperimentReport("resolvent", meta={"plan": plan.to_dict()})
    tasks = [(plan, lam, mu) for lam in plan.lams for mu in plan.mus]
    for recs in run_pool(_point, tasks, plan.jobs):
        for r in recs:
            rep.add(**r)
    # the nested solve R(z) R(conj z) psi is recorded but not judged: its
    # source spans the whole grid and the FD check loses ~1/mu there
    res = max(r["residual"] for r in rep.records)
    first = max(r["first_identity"] for r in rep.records)
    im = max(r["im_identity"] for r in rep.records)
    wr = max(r["wronskian_variation"] for r in rep.records)
    tol = plan.tol
    rep.verdict("residual", "(H - z) R(z) psi = psi on [2 r0, R/2]", res <= (tol or RESIDUAL_TOL),
                res, tol or RESIDUAL_TOL)
    rep.verdict("first_resolvent_identity", "R(z) - R(z') = (z - z') R(z) R(z') with z' = conj z",
                first <= FIRST_IDENTITY_TOL, first, FIRST_IDENTITY_TOL)
    rep.verdict("imaginary_part_identity", "Im <psi, R(z) psi> = Im z ||R(z) psi||^2 per sector",
                im <= IM_IDENTITY_TOL, im, IM_IDENTITY_TOL)
    rep.verdict("wronskian_constancy", "W(u_reg, u_out) constant in r", wr <= WRONSKIAN_TOL,
                wr, WRONSKIAN_TOL)
    return rep
