"""Smooth cutoffs in the effective time and the bounded weight ``theta``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def chi(t, deriv: int = 0):
    """C^2 step: 1 for ``t <= 1``, 0 for ``t >= 2``, non-increasing.

    Built from ``s(u) = 1 - u^3 (10 - 15 u + 6 u^2)`` on ``u = t - 1``.
    """
    u = np.clip(np.asarray(t, dtype=float) - 1.0, 0.0, 1.0)
    if deriv == 0:
        out = 1.0 - u**3 * (10.0 - 15.0 * u + 6.0 * u * u)
    elif deriv == 1:
        out = -30.0 * u * u * (1.0 - u) ** 2
    elif deriv == 2:
        out = -60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)
    else:
        raise ValueError("deriv must be 0, 1 or 2")
    return float(out) if np.ndim(out) == 0 else out


def cutoff_chi(kind: str, indices, tau):
    """``chi_n = chi(tau / 2^n)``, ``bar_chi_n = 1 - chi_n``, ``chi_mn = bar_chi_m chi_n``."""
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be non-negative")
    if kind == "chi_n":
        n = indices if np.ndim(indices) == 0 else indices[0]
        return chi(tau / 2.0**n)
    if kind == "bar_chi_n":
        n = indices if np.ndim(indices) == 0 else indices[0]
        return 1.0 - chi(tau / 2.0**n)
    if kind == "chi_mn":
        m, n = indices
        if n < m:
            raise ValueError(f"chi_mn needs n >= m, got m={m}, n={n}")
        return (1.0 - chi(tau / 2.0**m)) * chi(tau / 2.0**n)
    raise ValueError(f"unknown cutoff kind {kind!r}")


@dataclass(frozen=True)
class ThetaWeight:
    delta: float = 1.0
    R: float = 1.0

    def __post_init__(self):
        if self.delta <= 0 or self.R < 1:
            raise ValueError("need delta > 0 and R >= 1")


def theta_eval(w: ThetaWeight, tau):
    """``(theta, theta', theta'')`` with ``theta = delta^-1 [1 - (1 + tau/R)^-delta]``."""
    tau = np.asarray(tau, dtype=float)
    d, R = w.delta, w.R
    x = 1.0 + tau / R
    th = -np.expm1(-d * np.log1p(tau / R)) / d
    th1 = x ** (-1.0 - d) / R
    th2 = -(1.0 + d) * x ** (-2.0 - d) / R**2
    return th, th1, th2


def check_theta_inequalities(w: ThetaWeight, tau) -> dict:
    """Fitted constants and margins for the three inequality groups on ``tau > 0``.

    Returns, per group, the constants that make the two-sided bound hold on
    the sample (``c`` lower, ``C`` upper) and the margin of the constant-free
    sides (``theta <= tau/R``, ``theta' <= theta/tau``, ``theta'' <= 0``).
    """
    tau = np.asarray(tau, dtype=float)
    tau = tau[tau > 0]
    th, th1, th2 = theta_eval(w, tau)
    d, R = w.delta, w.R
    lower = np.minimum(1.0, tau / R)
    out = {
        "theta_lower_c": float(np.min(th / lower)),
        "theta_upper_C": float(np.max(th)),
        "theta_le_tau_over_R": float(np.min(tau / R - th)),
        "dtheta_lower_c": float(np.min(th1 / (np.minimum(R, tau) ** d * tau ** (-1 - d) * th))),
        "dtheta_le_theta_over_tau": float(np.min(th / tau - th1)),
        "d2theta_nonneg": float(np.min(-th2)),
        "d2theta_upper_C2": float(np.max(-th2 / (tau**-2.0 * th))),
    }
    out["passed"] = (out["theta_lower_c"] > 0 and out["theta_le_tau_over_R"] >= -1e-15
                     and out["dtheta_lower_c"] > 0 and out["dtheta_le_theta_over_tau"] >= -1e-15
                     and out["d2theta_nonneg"] >= 0 and np.isfinite(out["d2theta_upper_C2"]))
    return out
