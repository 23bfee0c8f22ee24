"""Hot loops of the partial-wave solver.

The reduced equation ``u'' = Q(r) u`` is discretised cell by cell with the
4-stage Gauss-Legendre collocation method (order 8).  For a linear system
each step is a 2x2 transfer matrix ``T_n`` mapping ``(u, u')`` at ``r_n`` to
``r_{n+1}``; the stage values of ``u`` are ``P_n @ (u_n, u'_n)``.  Gauss
collocation preserves the Wronskian exactly, so ``det T_n = 1``.

Both a numba and a numpy path are provided; :data:`laplab._accel.USE_NUMBA`
selects the default.
"""
import numpy as np

from .._accel import USE_NUMBA, maybe_njit


def _gauss_legendre_tableau(s=4):
    x, w = np.polynomial.legendre.leggauss(s)
    c = 0.5 * (x + 1.0)
    b = 0.5 * w
    A = np.empty((s, s))
    for j in range(s):
        # Lagrange basis polynomial L_j on the nodes c, integrated from 0 to c_i
        others = np.delete(c, j)
        coeffs = np.poly(others) / np.prod(c[j] - others)
        integ = np.polyint(coeffs)
        A[:, j] = np.polyval(integ, c) - np.polyval(integ, 0.0)
    return c, b, A


GL_C, GL_B, GL_A = _gauss_legendre_tableau(4)
_AA = GL_A @ GL_A
_A1 = GL_A.sum(axis=1)


def transfer_numpy(h, Q):
    """Transfer matrices ``T`` (N, 2, 2) and stage maps ``P`` (N, 4, 2).

    ``h``: cell lengths (N,); ``Q``: coefficient at the stage radii (N, 4).
    """
    N = h.size
    hQ = h[:, None]
    # (I - h^2 A A D) u = Y_u 1 + h (A 1) Y_v
    M = np.eye(4)[None, :, :] - (h * h)[:, None, None] * _AA[None, :, :] * Q[:, None, :]
    rhs = np.empty((N, 4, 2), dtype=complex)
    rhs[:, :, 0] = 1.0
    rhs[:, :, 1] = hQ * _A1[None, :]
    U = np.linalg.solve(M, rhs)  # columns: Y = e1, Y = e2
    # v_stage = Y_v 1 + h A (Q u)
    QU = Q[:, :, None] * U
    V = np.einsum("jk,nkc->njc", GL_A, QU) * hQ[:, :, None]
    V[:, :, 1] += 1.0
    T = np.empty((N, 2, 2), dtype=complex)
    T[:, 0, 0] = 1.0 + h * (V[:, :, 0] @ GL_B)
    T[:, 0, 1] = h * (V[:, :, 1] @ GL_B)
    T[:, 1, 0] = h * (QU[:, :, 0] @ GL_B)
    T[:, 1, 1] = 1.0 + h * (QU[:, :, 1] @ GL_B)
    return T, U


def propagate_numpy(T, y0, forward=True):
    """Nodal ``(u, u')`` from repeated application of ``T`` (or its inverse)."""
    N = T.shape[0]
    Y = np.empty((N + 1, 2), dtype=complex)
    if forward:
        Y[0] = y0
        for n in range(N):
            Y[n + 1] = T[n] @ Y[n]
    else:
        Y[N] = y0
        for n in range(N - 1, -1, -1):
            t = T[n]
            det = t[0, 0] * t[1, 1] - t[0, 1] * t[1, 0]
            y = Y[n + 1]
            Y[n, 0] = (t[1, 1] * y[0] - t[0, 1] * y[1]) / det
            Y[n, 1] = (-t[1, 0] * y[0] + t[0, 0] * y[1]) / det
    return Y


@maybe_njit
def _transfer_nb(h, Q, AA, A1, A, B):
    N = h.shape[0]
    T = np.empty((N, 2, 2), dtype=np.complex128)
    U = np.empty((N, 4, 2), dtype=np.complex128)
    M = np.empty((4, 4), dtype=np.complex128)
    R = np.empty((4, 2), dtype=np.complex128)
    for n in range(N):
        hn = h[n]
        for i in range(4):
            for j in range(4):
                M[i, j] = (1.0 if i == j else 0.0) - hn * hn * AA[i, j] * Q[n, j]
            R[i, 0] = 1.0
            R[i, 1] = hn * A1[i]
        # Gaussian elimination with partial pivoting
        for k in range(4):
            p = k
            best = abs(M[k, k])
            for i in range(k + 1, 4):
                if abs(M[i, k]) > best:
                    best = abs(M[i, k])
                    p = i
            if p != k:
                for j in range(4):
                    tmp = M[k, j]
                    M[k, j] = M[p, j]
                    M[p, j] = tmp
                for j in range(2):
                    tmp = R[k, j]
                    R[k, j] = R[p, j]
                    R[p, j] = tmp
            for i in range(k + 1, 4):
                f = M[i, k] / M[k, k]
                for j in range(k, 4):
                    M[i, j] -= f * M[k, j]
                for j in range(2):
                    R[i, j] -= f * R[k, j]
        for k in range(3, -1, -1):
            for c in range(2):
                acc = R[k, c]
                for j in range(k + 1, 4):
                    acc -= M[k, j] * U[n, j, c]
                U[n, k, c] = acc / M[k, k]
        t00 = 0.0 + 0.0j
        t01 = 0.0 + 0.0j
        t10 = 0.0 + 0.0j
        t11 = 0.0 + 0.0j
        for j in range(4):
            v0 = 0.0 + 0.0j
            v1 = 1.0 + 0.0j
            for k in range(4):
                v0 += hn * A[j, k] * Q[n, k] * U[n, k, 0]
                v1 += hn * A[j, k] * Q[n, k] * U[n, k, 1]
            t00 += B[j] * v0
            t01 += B[j] * v1
            t10 += B[j] * Q[n, j] * U[n, j, 0]
            t11 += B[j] * Q[n, j] * U[n, j, 1]
        T[n, 0, 0] = 1.0 + hn * t00
        T[n, 0, 1] = hn * t01
        T[n, 1, 0] = hn * t10
        T[n, 1, 1] = 1.0 + hn * t11
    return T, U


@maybe_njit
def _propagate_nb(T, y0, forward):
    N = T.shape[0]
    Y = np.empty((N + 1, 2), dtype=np.complex128)
    if forward:
        Y[0, 0] = y0[0]
        Y[0, 1] = y0[1]
        for n in range(N):
            Y[n + 1, 0] = T[n, 0, 0] * Y[n, 0] + T[n, 0, 1] * Y[n, 1]
            Y[n + 1, 1] = T[n, 1, 0] * Y[n, 0] + T[n, 1, 1] * Y[n, 1]
    else:
        Y[N, 0] = y0[0]
        Y[N, 1] = y0[1]
        for n in range(N - 1, -1, -1):
            det = T[n, 0, 0] * T[n, 1, 1] - T[n, 0, 1] * T[n, 1, 0]
            a = Y[n + 1, 0]
            b = Y[n + 1, 1]
            Y[n, 0] = (T[n, 1, 1] * a - T[n, 0, 1] * b) / det
            Y[n, 1] = (-T[n, 1, 0] * a + T[n, 0, 0] * b) / det
    return Y


def transfer_numba(h, Q):
    return _transfer_nb(np.ascontiguousarray(h, dtype=np.float64),
                        np.ascontiguousarray(Q, dtype=np.complex128), _AA, _A1, GL_A, GL_B)


def propagate_numba(T, y0, forward=True):
    return _propagate_nb(np.ascontiguousarray(T), np.asarray(y0, dtype=np.complex128), forward)


if USE_NUMBA:
    transfer = transfer_numba
    propagate = propagate_numba
else:
    transfer = transfer_numpy
    propagate = propagate_numpy
