"""Classical orbits of ``|p|^2/2 + V(|x|)`` and the escape inequality.

Orbits are integrated with a 4th-order Yoshida composition of velocity
Verlet.  The step is ``eta * |x| / |p|``, which resolves the motion at every
scale; orbits with outgoing initial momentum never approach the origin.
The radial force is read from a cubic-Hermite table in ``log r`` so the hot
loop is independent of the potential family.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ._accel import maybe_njit
from .efftime import EffTimeTable, build_efftime, default_table_grid
from .errors import DomainError
from .grid import RadialGrid
from .potential import PotentialSpec, eval_potential

_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_W0 = 1.0 - 2.0 * _W1
YOSHIDA = np.array([_W1, _W0, _W1])


@dataclass(frozen=True)
class ForceTable:
    """``V'`` and ``V''`` on a geometric grid ``r_min * q^i``."""

    log_r_min: float
    dlog: float
    dV: np.ndarray
    d2V: np.ndarray
    r_max: float


def force_table(spec: PotentialSpec, r_min: float = 1e-4, r_max: float = 1e5, n: int = 200_001) -> ForceTable:
    r = np.geomspace(r_min, r_max, n)
    _, dV, d2V, _ = eval_potential(spec, r)
    return ForceTable(float(np.log(r_min)), float(np.log(r_max / r_min) / (n - 1)),
                      np.ascontiguousarray(dV), np.ascontiguousarray(d2V), float(r_max))


@maybe_njit
def _dV_at(r, log_r_min, dlog, dV, d2V):
    x = (np.log(r) - log_r_min) / dlog
    i = int(np.floor(x))
    if i < 0:
        i = 0
    if i > dV.shape[0] - 2:
        i = dV.shape[0] - 2
    t = x - i
    r0 = np.exp(log_r_min + i * dlog)
    h = r0 * (np.exp(dlog) - 1.0)
    t2 = t * t
    t3 = t2 * t
    return ((2 * t3 - 3 * t2 + 1) * dV[i] + (t3 - 2 * t2 + t) * h * d2V[i]
            + (-2 * t3 + 3 * t2) * dV[i + 1] + (t3 - t2) * h * d2V[i + 1])


@maybe_njit
def _orbit_kernel(x0, p0, t_end, eta, log_r_min, dlog, dV, d2V, r_cap, coeffs, max_steps, stride):
    d = x0.shape[0]
    n_rec = max_steps // stride + 2
    T = np.empty(n_rec)
    X = np.empty((n_rec, d))
    P = np.empty((n_rec, d))
    x = x0.copy()
    p = p0.copy()
    t = 0.0
    k = 0
    T[0] = t
    X[0] = x
    P[0] = p
    k = 1
    step = 0
    while t < t_end and step < max_steps:
        r = np.sqrt(np.sum(x * x))
        if r > r_cap:
            break
        pn = np.sqrt(np.sum(p * p))
        dt = eta * r / max(pn, 1e-12)
        if t + dt > t_end:
            dt = t_end - t
        for c in coeffs:
            h = c * dt
            rr = np.sqrt(np.sum(x * x))
            f = _dV_at(rr, log_r_min, dlog, dV, d2V) / rr
            p = p - 0.5 * h * f * x
            x = x + h * p
            rr = np.sqrt(np.sum(x * x))
            f = _dV_at(rr, log_r_min, dlog, dV, d2V) / rr
            p = p - 0.5 * h * f * x
        t += dt
        step += 1
        if step % stride == 0 or t >= t_end:
            T[k] = t
            X[k] = x
            P[k] = p
            k += 1
    return T[:k], X[:k], P[:k]


@dataclass(frozen=True)
class OrbitState:
    t: float
    x: np.ndarray
    p: np.ndarray


@dataclass(eq=False)
class OrbitTrace:
    """Sampled orbit with derived radial quantities."""

    lam: float
    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def r(self) -> np.ndarray:
        return np.linalg.norm(self.x, axis=1)

    @property
    def p_r(self) -> np.ndarray:
        return np.sum(self.x * self.p, axis=1) / self.r

    def state(self, i: int) -> OrbitState:
        return OrbitState(float(self.t[i]), self.x[i].copy(), self.p[i].copy())

    def energy(self, spec: PotentialSpec) -> np.ndarray:
        return 0.5 * np.sum(self.p**2, axis=1) + eval_potential(spec, self.r)[0]

    def to_csv(self, path) -> None:
        d = self.x.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t"] + [f"x{i}" for i in range(d)] + [f"p{i}" for i in range(d)])
            for row in np.column_stack([self.t, self.x, self.p]):
                w.writerow([repr(float(v)) for v in row])


def integrate_orbit(spec: PotentialSpec, x0, p0, t_end: float, *, eta: float = 0.01,
                    table: ForceTable | None = None, stride: int = 1, max_steps: int = 2_000_000,
                    lam: float | None = None) -> OrbitTrace:
    """Integrate Hamilton's equations for ``V`` (the short-range part is excluded)."""
    x0 = np.asarray(x0, dtype=float)
    p0 = np.asarray(p0, dtype=float)
    if np.linalg.norm(x0) == 0:
        raise DomainError("orbits must start away from the origin")
    table = table if table is not None else force_table(spec.without_q())
    T, X, P = _orbit_kernel(x0, p0, float(t_end), float(eta), table.log_r_min, table.dlog,
                            table.dV, table.d2V, table.r_max, YOSHIDA, int(max_steps), int(stride))
    if lam is None:
        lam = 0.5 * float(p0 @ p0) + float(eval_potential(spec, float(np.linalg.norm(x0)))[0])
    return OrbitTrace(float(lam), T, X, P, {"eta": eta, "steps_cap_hit": T[-1] < t_end})


def random_outgoing_state(spec: PotentialSpec, lam: float, rng: np.random.Generator,
                          r_range=(0.1, 10.0), dim: int | None = None):
    """Start ``x0`` with ``|x0|`` log-uniform in ``r_range`` and ``|p| = a(lam, x0)``, ``p_r > 0``."""
    d = dim or spec.dim
    r0 = float(np.exp(rng.uniform(np.log(r_range[0]), np.log(r_range[1]))))
    e = rng.normal(size=d)
    x0 = r0 * e / np.linalg.norm(e)
    speed = np.sqrt(2.0 * lam - 2.0 * eval_potential(spec, r0)[0])
    while True:
        v = rng.normal(size=d)
        v /= np.linalg.norm(v)
        if v @ x0 > 1e-3 * r0:
            break
    return x0, speed * v


@dataclass
class EscapeReport:
    lam: float
    n_orbits: int
    min_margin: float
    min_d2tau: float
    min_d2tau_fd: float
    max_energy_drift: float
    passed: bool
    orbit_margins: list = field(default_factory=list)
    orbit_d2tau: list = field(default_factory=list)

    def to_dict(self, per_orbit: bool = False):
        d = dict(self.__dict__)
        if not per_orbit:
            d.pop("orbit_margins")
            d.pop("orbit_d2tau")
        return d


def d2tau_along_orbit(trace: OrbitTrace, spec: PotentialSpec):
    """``d^2/dt^2 tau(lam, x(t))`` from Hamilton's equations.

    ``tau'' = a^{-1} [(|p|^2 - p_r^2)/r - V'] + a^{-3} V' p_r^2``
    """
    r = trace.r
    pr = trace.p_r
    p2 = np.sum(trace.p**2, axis=1)
    V, dV, _, _ = eval_potential(spec.without_q(), r)
    a = np.sqrt(2.0 * max(trace.lam, 0.0) - 2.0 * V)
    return ((p2 - pr * pr) / r - dV) / a + dV * pr * pr / a**3


def _fd_second(t, y):
    """Second derivative on a non-uniform sample (three-point formula)."""
    h0 = t[1:-1] - t[:-2]
    h1 = t[2:] - t[1:-1]
    return 2.0 * (h0 * y[2:] - (h0 + h1) * y[1:-1] + h1 * y[:-2]) / (h0 * h1 * (h0 + h1))


def escape_margin(trace: OrbitTrace, table: EffTimeTable) -> np.ndarray:
    """``tau(x(t)) - tau(x_0) - t p_r(0) / a(x_0)``; non-negative by convexity of ``tau``."""
    r = trace.r
    tau = np.asarray(table.tau(r))
    a0 = 1.0 / float(table.tau(r[0], deriv=1))
    return tau - tau[0] - trace.t * trace.p_r[0] / a0


def check_escape_inequality(spec: PotentialSpec, lam: float, n_orbits: int = 100, *, seed: int = 0,
                            t_end: float = 200.0, eta: float = 0.01, tol: float = 1e-6,
                            table: EffTimeTable | None = None) -> EscapeReport:
    """Sample outgoing orbits at energy ``lam`` and test the escape inequality.

    Also checks ``d^2 tau / dt^2 >= -tol`` both from the closed form and by
    finite differences of ``tau(x(t))``.
    """
    rng = np.random.default_rng(seed)
    V_only = spec.without_q()
    ftab = force_table(V_only)
    tmax_r = 2.0 * (np.sqrt(2.0 * lam + 2.0 * abs(V_only.c0)) + 1.0) * t_end + 20.0
    if table is None:
        table = build_efftime(V_only, lam, default_table_grid(r_max=max(1e4, tmax_r), dim=spec.dim))
    min_m = np.inf
    min_d2 = np.inf
    min_fd = np.inf
    drift = 0.0
    margins, d2s = [], []
    for _ in range(n_orbits):
        x0, p0 = random_outgoing_state(V_only, lam, rng)
        tr = integrate_orbit(V_only, x0, p0, t_end, eta=eta, table=ftab, lam=lam)
        E = tr.energy(V_only)
        scale = max(abs(lam), abs(float(eval_potential(V_only, tr.r[0])[0])))
        drift = max(drift, float(np.max(np.abs(E - lam))) / scale)
        margins.append(float(np.min(escape_margin(tr, table))))
        d2s.append(float(np.min(d2tau_along_orbit(tr, V_only))))
        min_m = min(min_m, margins[-1])
        min_d2 = min(min_d2, d2s[-1])
        # finite differences on a coarser subsample keep rounding error small
        sub = slice(None, None, 20)
        ts, taus = tr.t[sub], np.asarray(table.tau(tr.r[sub]))
        if ts.size >= 3:
            min_fd = min(min_fd, float(np.min(_fd_second(ts, taus))))
    passed = min_m >= -tol and min_d2 >= -tol
    return EscapeReport(float(lam), n_orbits, min_m, min_d2, min_fd, drift, bool(passed), margins, d2s)
