"""Hoelder continuity of ``z -> R(z)`` between weighted ``L^2`` spaces."""
from __future__ import annotations

import numpy as np
from scipy.integrate import trapezoid

from ..efftime import SpectralParam, build_efftime, default_table_grid, speed_a
from ..norms import plain_quadrature
from ..radial.fields import sector_exponent
from ..radial.farfield import outgoing_far_field
from ..radial.modes import solve_modes
from ..radial.resolvent import RESIDUAL_TOL, apply_resolvent
from .common import energy_context, fit_slope
from .plan import SweepPlan, check
from .report import ExperimentReport

EXPONENT_SLACK = 0.05
TAIL_STEP = 4e-4  # relative radial step of the tail quadrature


class TauWeight:
    """``<tau>^{p}`` for radii up to ``r_max`` (linear ``tau`` beyond the table)."""

    def __init__(self, spec, lam: float, r_max: float):
        self.table = build_efftime(spec.without_q(), lam, default_table_grid(r_max=r_max, dim=spec.dim))
        self.r_end = self.table.r[-1]
        self.slope = 1.0 / self.table.a[-1]
        self.t_end = self.table.tau_values[-1]

    def tau(self, r):
        r = np.asarray(r, dtype=float)
        inside = np.minimum(r, self.r_end)
        t = np.asarray(self.table.tau(inside))
        return np.where(r > self.r_end, self.t_end + (r - self.r_end) * self.slope, t)

    def __call__(self, r, p: float):
        t = self.tau(r)
        return (1.0 + t * t) ** (0.5 * p)


def _grid_mass(fields, coeffs, weight) -> float:
    """``int_0^R w^2 |sum_j c_j u_j|^2`` summed over sectors (grid part)."""
    grid = fields[0].grid
    dec = plain_quadrature(grid)
    total = 0.0
    w2 = weight(dec.r) ** 2
    for i, ell in enumerate(fields[0].ells):
        vals = sum(c * f.evaluate(cell=dec.cell, t=dec.t)[i] for f, c in zip(fields, coeffs))
        total += float(np.sum(np.abs(vals) ** 2 * w2 * dec.w))
        s = sector_exponent(ell, grid.dim)
        u0 = sum(c * f.u[i, 0] for f, c in zip(fields, coeffs))
        total += abs(u0) ** 2 * float(weight(np.array([grid.r_min]))[0]) ** 2 * grid.r_min / (2 * s + 1)
    return total


def _tail_values(far, amp, r, multiplier=None):
    """``amp * f(r)`` (times ``multiplier(far, r)``) on ``[R, R_far]``, zero beyond a decaying far field."""
    out = np.zeros(r.shape, dtype=complex)
    ok = r <= far.R_far
    out[ok] = amp * far.profile(r[ok])
    if multiplier is not None:
        out[ok] *= multiplier(far, r[ok])
    return out


def tail_difference_mass(fa, fb, weight, p: float, multiplier=None, s_tail: float = 1.0) -> float:
    """``int_R^inf <tau>^{2p} |phi_a - phi_b|^2`` from the stored tails.

    Beyond the last tabulated radius the non-decaying profile contributes
    ``|phi_b(R_end)|^2 w(R_end) R_end / (2 s_tail - 1)``.
    """
    total = 0.0
    for i in range(len(fa.ells)):
        ta, tb = fa.tails[i], fb.tails[i]
        R = ta.far.R
        r_end = max(ta.far.R_far, tb.far.R_far)
        n = int(np.ceil(np.log(r_end / R) / TAIL_STEP)) + 1
        r = np.geomspace(R, r_end, n)
        diff = _tail_values(ta.far, ta.amplitude, r, multiplier) - _tail_values(tb.far, tb.amplitude, r,
                                                                                  multiplier)
        w2 = weight(r, p) ** 2
        total += float(trapezoid(np.abs(diff) ** 2 * w2, r))
        for t in (ta, tb):
            if not t.far.decaying:
                end = np.array([t.far.R_far])
                v = _tail_values(t.far, t.amplitude, end, multiplier)[0]
                total += abs(v) ** 2 * float(weight(end, p)[0]) ** 2 * end[0] / (2.0 * s_tail - 1.0)
    return total


def _momentum_multiplier(spec, lam):
    """Tail factor of ``a^{-1} p_r`` on ``u = amp f``: ``-i (y - c/r) / a``."""
    spec0 = spec.without_q()
    c = 0.5 * (spec.dim - 1)

    def m(far, r):
        return -1j * (far.y(r) - c / r) / speed_a(spec0, lam, r)
    return m


def hoelder_probe(plan: SweepPlan, lam: float = 1.0) -> ExperimentReport:
    """``D_j = ||R(z_j) psi - R(lam + i0) psi||_{L^2_{-s}} / ||psi||_{L^2_s}`` with ``|z_j - lam| = 2^{-j}``.

    The same is measured for ``a^{-1} p_r R``.  Weights are ``<tau(lam, .)>^{+-s}``;
    the fitted exponent of ``log D`` against ``log |z - z'|`` must reach
    ``gamma - 0.05``.
    """
    check(plan)
    from ..radial.operators import apply_a_inv_p_r

    s = plan.hoelder_s
    ctx = energy_context(plan, lam)
    grid = ctx.grid
    js = sorted(plan.hoelder_j)
    zs = [SpectralParam(lam, 2.0 ** (-j), plan.sign) for j in js]
    zero = SpectralParam(lam, 0.0, plan.sign)
    ells = sorted({l for psi in ctx.sources.values() for l in psi.ells})
    # far fields of the smallest mu set the range the boundary value must cover
    modes = {j: {} for j in js}
    r_far = 0.0
    for j, zp in zip(js, zs):
        for ell in ells:
            mp = solve_modes(plan.spec, ell, zp, grid)
            modes[j][ell] = mp
            r_far = max(r_far, mp.far.R_far)
    modes0 = {ell: solve_modes(plan.spec, ell, zero, grid,
                               far=outgoing_far_field(plan.spec, ell, zero, grid.r_max, r_far_min=r_far))
              for ell in ells}
    weight = TauWeight(plan.spec, lam, max(4.0 * r_far, 1e4))
    mult = _momentum_multiplier(plan.spec, lam)
    rep = ExperimentReport("hoelder", meta={"plan": plan.to_dict(), "lambda": lam, "s": s,
                                            "weights": "<tau(lambda, r)>^(+-s)"})
    tol = plan.tol or RESIDUAL_TOL
    for lab, psi in ctx.sources.items():
        npsi = np.sqrt(_grid_mass([psi], [1.0], lambda r: weight(r, s)))
        phi0 = apply_resolvent(plan.spec, zero, psi, modes=modes0, residual_tol=tol)
        pphi0 = apply_a_inv_p_r(plan.spec, lam, phi0)
        for j, zp in zip(js, zs):
            phi = apply_resolvent(plan.spec, zp, psi, modes=modes[j], residual_tol=tol)
            m_grid = _grid_mass([phi, phi0], [1.0, -1.0], lambda r: weight(r, -s))
            m_tail = tail_difference_mass(phi, phi0, weight, -s, s_tail=s)
            pphi = apply_a_inv_p_r(plan.spec, lam, phi)
            p_grid = _grid_mass([pphi, pphi0], [1.0, -1.0], lambda r: weight(r, -s))
            p_tail = tail_difference_mass(phi, phi0, weight, -s, multiplier=mult, s_tail=s)
            rep.add(source=lab, j=j, dz=2.0 ** (-j),
                    D=np.sqrt(m_grid + m_tail) / npsi, D_p=np.sqrt(p_grid + p_tail) / npsi,
                    tail_fraction=m_tail / (m_grid + m_tail), residual=phi.meta["residual"])
    dz = np.array([2.0 ** (-j) for j in js])
    target = plan.hoelder_gamma - EXPONENT_SLACK
    for q, name in (("D", "resolvent"), ("D_p", "a_inv_p_r_resolvent")):
        D = np.array([max(r[q] for r in rep.records if r["j"] == j) for j in js])
        slope = fit_slope(np.log(dz), np.log(D))
        rep.meta[f"{q}_sup"] = D.tolist()
        rep.verdict(f"hoelder_exponent_{name}", "||R(z) - R(z')||_{L2_s -> L2_-s} <= C |z - z'|^gamma",
                    slope >= target, slope, target)
        mono = bool(np.all(np.diff(D) < 0))
        rep.meta[f"{q}_monotone"] = mono
    return rep
