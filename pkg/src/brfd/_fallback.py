"""Pure-Python versions of the compiled kernels (same signatures and results)."""
import numpy as np

NAME = "python"
PIVOT_RTOL = 1e-14


def thomas(lower, diag, upper, rhs):
    """Solve a tridiagonal system; returns ``(x, bad)`` with ``bad = -1`` on success."""
    lo = np.asarray(lower, dtype=float).tolist()
    di = np.asarray(diag, dtype=float).tolist()
    up = np.asarray(upper, dtype=float).tolist()
    b = np.asarray(rhs, dtype=float).tolist()
    n = len(di)
    tol = PIVOT_RTOL * max(abs(d) for d in di)
    x = [0.0] * n
    cp = [0.0] * n
    piv = di[0]
    if abs(piv) <= tol:
        return np.zeros(n), 0
    if n > 1:
        cp[0] = up[0] / piv
    x[0] = b[0] / piv
    for k in range(1, n):
        piv = di[k] - lo[k - 1] * cp[k - 1]
        if abs(piv) <= tol:
            return np.zeros(n), k
        if k < n - 1:
            cp[k] = up[k] / piv
        x[k] = (b[k] - lo[k - 1] * x[k - 1]) / piv
    for k in range(n - 2, -1, -1):
        x[k] -= cp[k] * x[k + 1]
    return np.array(x), -1


def relax_step(u, phi, forcing, h, dt):
    """Advance ``u`` by one averaged step with frozen potential ``phi``.

    Solves ``(I - dt/2 L - dt/2 phi) v = (I + dt/2 L + dt/2 phi) u + dt * forcing``
    on the interior nodes, ``L`` the three-point Laplacian.  Returns ``(v, bad)``.
    """
    uv = np.asarray(u, dtype=float).tolist()
    pv = np.asarray(phi, dtype=float).tolist()
    fv = np.asarray(forcing, dtype=float).tolist()
    size = len(uv)
    J = size - 2
    a = dt / (2.0 * h * h)
    half = 0.5 * dt
    diag = [1.0 + 2.0 * a - half * pv[j] for j in range(1, J + 1)]
    tol = PIVOT_RTOL * max(abs(d) for d in diag)
    out = [0.0] * size
    cp = [0.0] * J
    for j in range(1, J + 1):
        k = j - 1
        rhs = (uv[j] + a * (uv[j - 1] - 2.0 * uv[j] + uv[j + 1])
               + half * pv[j] * uv[j] + dt * fv[j])
        if k == 0:
            piv = diag[0]
            if abs(piv) <= tol:
                return np.zeros(size), 0
            out[j] = rhs / piv
        else:
            piv = diag[k] + a * cp[k - 1]
            if abs(piv) <= tol:
                return np.zeros(size), k
            out[j] = (rhs + a * out[j - 1]) / piv
        cp[k] = -a / piv
    for j in range(J - 1, 0, -1):
        out[j] -= cp[j - 1] * out[j + 1]
    return np.array(out), -1
