# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops: Thomas elimination and one linearly implicit relaxation step."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()

NAME = "cython"
cdef double _PIVOT_RTOL = 1e-14
PIVOT_RTOL = _PIVOT_RTOL


cdef Py_ssize_t _thomas(const double[:] lower, const double[:] diag, const double[:] upper,
                        const double[:] rhs, double[:] x, double[:] cp) noexcept nogil:
    cdef Py_ssize_t n = diag.shape[0], k
    cdef double scale = 0.0, piv
    for k in range(n):
        if fabs(diag[k]) > scale:
            scale = fabs(diag[k])
    cdef double tol = _PIVOT_RTOL * scale
    piv = diag[0]
    if fabs(piv) <= tol:
        return 0
    if n > 1:
        cp[0] = upper[0] / piv
    x[0] = rhs[0] / piv
    for k in range(1, n):
        piv = diag[k] - lower[k - 1] * cp[k - 1]
        if fabs(piv) <= tol:
            return k
        if k < n - 1:
            cp[k] = upper[k] / piv
        x[k] = (rhs[k] - lower[k - 1] * x[k - 1]) / piv
    for k in range(n - 2, -1, -1):
        x[k] -= cp[k] * x[k + 1]
    return -1


def thomas(lower, diag, upper, rhs):
    """Solve a tridiagonal system; returns ``(x, bad)`` with ``bad = -1`` on success."""
    cdef const double[:] lo = np.ascontiguousarray(lower, dtype=np.float64)
    cdef const double[:] di = np.ascontiguousarray(diag, dtype=np.float64)
    cdef const double[:] up = np.ascontiguousarray(upper, dtype=np.float64)
    cdef const double[:] b = np.ascontiguousarray(rhs, dtype=np.float64)
    cdef Py_ssize_t n = di.shape[0], bad
    x = np.empty(n)
    cp = np.empty(max(n - 1, 1))
    cdef double[:] xv = x
    cdef double[:] cv = cp
    with nogil:
        bad = _thomas(lo, di, up, b, xv, cv)
    return x, bad


def relax_step(u, phi, forcing, double h, double dt):
    """Advance ``u`` by one averaged step with frozen potential ``phi``.

    Solves ``(I - dt/2 L - dt/2 phi) v = (I + dt/2 L + dt/2 phi) u + dt * forcing``
    on the interior nodes, ``L`` the three-point Laplacian.  Returns ``(v, bad)``.
    """
    cdef const double[:] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef const double[:] pv = np.ascontiguousarray(phi, dtype=np.float64)
    cdef const double[:] fv = np.ascontiguousarray(forcing, dtype=np.float64)
    cdef Py_ssize_t size = uv.shape[0], J = size - 2, j, k
    cdef double a = dt / (2.0 * h * h), half = 0.5 * dt, piv, scale = 0.0, tol, d, rhs
    out = np.zeros(size)
    cp = np.empty(max(J, 1))
    cdef double[:] ov = out
    cdef double[:] cv = cp
    cdef Py_ssize_t bad = -1
    with nogil:
        for j in range(1, J + 1):
            d = fabs(1.0 + 2.0 * a - half * pv[j])
            if d > scale:
                scale = d
        tol = _PIVOT_RTOL * scale
        # forward sweep; ov[j] holds the modified right-hand side
        for j in range(1, J + 1):
            k = j - 1
            d = 1.0 + 2.0 * a - half * pv[j]
            rhs = (uv[j] + a * (uv[j - 1] - 2.0 * uv[j] + uv[j + 1])
                   + half * pv[j] * uv[j] + dt * fv[j])
            if k == 0:
                piv = d
                if fabs(piv) <= tol:
                    bad = 0
                    break
                ov[j] = rhs / piv
            else:
                piv = d + a * cv[k - 1]
                if fabs(piv) <= tol:
                    bad = k
                    break
                ov[j] = (rhs + a * ov[j - 1]) / piv
            cv[k] = -a / piv
        if bad < 0:
            for j in range(J - 1, 0, -1):
                ov[j] -= cv[j - 1] * ov[j + 1]
    return out, bad
