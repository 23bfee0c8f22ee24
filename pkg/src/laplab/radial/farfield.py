"""Outgoing solutions beyond the last grid node.

Past ``R`` the outgoing solution is carried by its logarithmic derivative
``y = u'/u``, which solves the Riccati equation ``y' = Q - y^2`` with
``Q = 2 (V_eff - z)``.  It is started from the second-order WKB expansion
far out and integrated inward, which is the stable direction for the
outgoing branch.  Tail masses ``int_R^inf u_a u_b`` are obtained the same way.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp

from .. import _hermite
from ..efftime import SpectralParam
from ..errors import NumericalAccuracyError
from ..potential import PotentialSpec, eval_potential, eval_q_derivative
from .fields import sector_exponent

_DECAY_TARGET = 25.0  # |u|^2 falls by exp(-50) over the integration range


def reduced_potential(spec: PotentialSpec, ell: int, r, deriv: int = 0):
    """``V + q + [l(l+d-2) + (d-1)(d-3)/4] / (2 r^2)`` and, optionally, derivatives."""
    r = np.asarray(r, dtype=float)
    s = sector_exponent(ell, spec.dim)
    kappa = s * (s - 1.0)
    V, dV, d2V, q = eval_potential(spec, r)
    out = V + q + 0.5 * kappa / r**2
    if deriv == 0:
        return out
    dq = eval_q_derivative(spec, r).reshape(r.shape)
    d1 = dV + dq - kappa / r**3
    if deriv == 1:
        return out, d1
    step = 1e-4 * np.maximum(r, 1.0)
    d2q = (eval_q_derivative(spec, r + step).reshape(r.shape)
           - eval_q_derivative(spec, r - step).reshape(r.shape)) / (2 * step)
    return out, d1, d2V + d2q + 3.0 * kappa / r**4


def _local_k(spec, ell, zp: SpectralParam, r):
    """Local wavenumber with the branch that makes ``exp(i s k r)`` outgoing/decaying."""
    Veff = reduced_potential(spec, ell, r)
    w = 2.0 * (zp.z - Veff)
    k = np.sqrt(np.asarray(w, dtype=complex))
    if zp.mu == 0:
        k = np.where(np.real(w) < 0, 1j * zp.s * np.sqrt(np.abs(np.real(w))), k)
    return k


def wkb_logderiv(spec: PotentialSpec, ell: int, zp: SpectralParam, r, error: bool = False):
    """Second-order WKB value of ``u'/u`` for the outgoing solution.

    With ``error=True`` also return the size of the first neglected term,
    estimated as ``|y2|^2 / |y1|``.
    """
    r = np.asarray(r, dtype=float)
    Veff, d1, d2 = reduced_potential(spec, ell, r, deriv=2)
    z = zp.z
    sk = zp.s * _local_k(spec, ell, zp, r)
    y1 = d1 / (4.0 * (z - Veff))
    dy1 = d2 / (4.0 * (z - Veff)) + d1 * d1 / (4.0 * (z - Veff) ** 2)
    y2 = 1j * (dy1 + y1 * y1) / (2.0 * sk)
    y = 1j * sk + y1 + y2
    if error:
        return y, np.abs(y2) ** 2 / np.maximum(np.abs(y1), 1e-300)
    return y


@dataclass(frozen=True, eq=False)
class FarField:
    """Log-derivative of the outgoing solution on ``[R, R_far]``."""

    spec: PotentialSpec
    ell: int
    zp: SpectralParam
    R: float
    R_far: float
    decaying: bool
    _sol: object

    def y(self, r):
        r = np.asarray(r, dtype=float)
        if np.any(r < self.R * (1 - 1e-12)) or np.any(r > self.R_far * (1 + 1e-12)):
            raise ValueError("radius outside the far-field range")
        v = self._sol(np.log(r))
        return (v[0] + 1j * v[1]) / r

    @property
    def y_R(self) -> complex:
        return complex(self.y(self.R))

    def log_profile(self, r) -> np.ndarray:
        """``int_R^r y`` at sorted radii ``r`` in ``[R, R_far]`` (``log f`` with ``f(R) = 1``)."""
        r = np.asarray(r, dtype=float)
        if r.size == 0:
            return np.zeros(0, dtype=complex)
        # w = r y is smooth in x = log r; integrate it on a fine log sample
        x_end = np.log(max(float(r.max()), self.R))
        n = max(int(np.ceil((x_end - np.log(self.R)) / 2e-3)), 8) + 1
        xs = np.linspace(np.log(self.R), x_end, n)
        v = self._sol(xs)
        w = v[0] + 1j * v[1]
        cre = cumulative_simpson(w.real, x=xs, initial=0.0)
        cim = cumulative_simpson(w.imag, x=xs, initial=0.0)
        x = np.log(np.clip(r, self.R, None))
        # the integrand is the derivative of the cumulative sums: cubic Hermite in x
        return (_hermite.evaluate(xs, cre, w.real, r=x) + 1j * _hermite.evaluate(xs, cim, w.imag, r=x))

    def profile(self, r) -> np.ndarray:
        """``f(r) = u_out(r) / u_out(R)``."""
        return np.exp(self.log_profile(r))

    def conjugate(self) -> "FarField":
        """Far field of the conjugate parameter (``conj`` of every profile)."""
        return FarField(self.spec, self.ell, self.zp.conjugate(), self.R, self.R_far, self.decaying,
                        _ConjSol(self._sol))


class _ConjSol:
    def __init__(self, sol):
        self.sol = sol

    def __call__(self, x):
        v = np.array(self.sol(x), copy=True)
        v[1] = -v[1]
        return v


def _complex_jac(deriv):
    """Real 2x2 Jacobian of a holomorphic right-hand side with derivative ``deriv``."""
    def jac(r, v):
        d = complex(deriv(r, v))
        return np.array([[d.real, -d.imag], [d.imag, d.real]])
    return jac


def _decay_radius(spec, ell, zp, R):
    """Smallest ``R_far`` (by doubling) with ``int_R^R_far Im(s k) >= target``."""
    R_far = 2.0 * R
    while R_far < 1e8 * R:
        r = np.geomspace(R, R_far, 400)
        gamma = np.imag(zp.s * _local_k(spec, ell, zp, r))
        if np.trapezoid(gamma, r) >= _DECAY_TARGET:
            return R_far
        R_far *= 2.0
    return R_far


def _accurate_radius(spec, ell, zp, R, rtol):
    """Smallest ``R_far`` (by doubling) where the WKB start is accurate to ``rtol``.

    An inaccurate start leaves an incoming admixture that the stiff solver
    would have to resolve all the way back to ``R``.
    """
    R_far = 2.0 * R
    while R_far < 1e9 * R:
        y, err = wkb_logderiv(spec, ell, zp, R_far, error=True)
        if err <= 0.1 * rtol * abs(y):
            return R_far
        R_far *= 2.0
    return R_far


def outgoing_far_field(spec: PotentialSpec, ell: int, zp: SpectralParam, R: float,
                       rtol: float = 1e-11, r_far_min: float = 0.0) -> FarField:
    """Integrate the outgoing log-derivative from far out back to ``R``.

    ``r_far_min`` extends the range, e.g. to compare with a slower-decaying tail.
    """
    decaying = zp.mu > 0 or np.real(2 * (zp.z - reduced_potential(spec, ell, 1e3 * R))) < 0
    R_far = _decay_radius(spec, ell, zp, R) if decaying else _accurate_radius(spec, ell, zp, R, rtol)
    R_far = max(R_far, float(r_far_min))
    y_far = complex(wkb_logderiv(spec, ell, zp, R_far))

    # w = r y in x = log r: the solution is then close to a power law and
    # an A-stable implicit rule takes steps set by smoothness alone (the
    # linearisation 1 - 2w is oscillatory for real z). Radau needs a real state.
    def rhs(x, v):
        r = np.exp(x)
        w = v[0] + 1j * v[1]
        f = w + 2.0 * r * r * (reduced_potential(spec, ell, r) - zp.z) - w * w
        return [f.real, f.imag]

    jac = _complex_jac(lambda x, v: 1.0 - 2.0 * (v[0] + 1j * v[1]))
    w_far = R_far * y_far
    w_near = R * complex(wkb_logderiv(spec, ell, zp, R))
    sol = solve_ivp(rhs, (np.log(R_far), np.log(R)), [w_far.real, w_far.imag], method="Radau",
                    jac=jac, rtol=rtol, atol=rtol * min(abs(w_far), abs(w_near)), dense_output=True)
    if not sol.success:
        raise NumericalAccuracyError(f"far-field Riccati integration failed for l={ell}: {sol.message}")
    return FarField(spec, ell, zp, float(R), float(R_far), bool(decaying), sol.sol)


def tail_pair(fa: FarField, fb: FarField, conj_a: bool = False, rtol: float = 1e-10) -> complex:
    """``int_R^inf f_a f_b dr`` where ``f = u / u(R)`` (``conj(f_a)`` if requested).

    Returns ``inf`` when the product does not decay.
    """
    if abs(fa.R - fb.R) > 1e-12 * fa.R:
        raise ValueError("far fields start at different radii")
    R, R_end = fa.R, min(fa.R_far, fb.R_far)

    def ysum(r):
        ya = fa.y(r)
        return (np.conj(ya) if conj_a else ya) + fb.y(r)

    s_end = complex(ysum(R_end))
    if s_end.real >= 0 or (not fa.decaying and not fb.decaying):
        return complex(np.inf)
    rho_end = -1.0 / s_end

    # sigma = rho / r in x = log r
    def rhs(x, v):
        r = np.exp(x)
        f = -1.0 - (v[0] + 1j * v[1]) * (1.0 + r * ysum(r))
        return [f.real, f.imag]

    sigma_end = rho_end / R_end
    jac = _complex_jac(lambda x, v: -(1.0 + np.exp(x) * ysum(np.exp(x))))
    sol = solve_ivp(rhs, (np.log(R_end), np.log(R)), [sigma_end.real, sigma_end.imag],
                    method="Radau", jac=jac, rtol=rtol, atol=1e-3 * rtol * abs(sigma_end))
    if not sol.success:
        raise NumericalAccuracyError(f"tail integration failed: {sol.message}")
    return R * complex(sol.y[0, -1], sol.y[1, -1])
