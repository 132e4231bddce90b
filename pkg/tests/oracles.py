"""Independent reference computations used only by the tests."""
from fractions import Fraction

import numpy as np


def dense_solve(A, b):
    """Gaussian elimination with partial pivoting on a dense copy."""
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    n = len(b)
    for k in range(n - 1):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if p != k:
            A[[k, p]] = A[[p, k]]
            b[[k, p]] = b[[p, k]]
        factors = A[k + 1:, k] / A[k, k]
        A[k + 1:, k:] -= np.outer(factors, A[k, k:])
        b[k + 1:] -= factors * b[k]
    x = np.zeros(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - A[k, k + 1:] @ x[k + 1:]) / A[k, k]
    return x


def dense_tridiagonal(lower, diag, upper):
    return np.diag(diag) + np.diag(lower, -1) + np.diag(upper, 1)


def exact_bridge_coefficients():
    """Monomial coefficients (in y = x/delta) of the delta = 1 bridge, by exact rational elimination."""
    def row(y, k):
        out = []
        for i in range(8):
            if i < k:
                out.append(Fraction(0))
            else:
                c = 1
                for j in range(k):
                    c *= i - j
                out.append(Fraction(c) * Fraction(y) ** (i - k))
        return out

    A = [row(1, k) for k in range(4)] + [row(2, k) for k in range(4)]
    b = [Fraction(v) for v in (1, 1, 0, 0, 2, 0, 0, 0)]
    n = 8
    M = [A[i] + [b[i]] for i in range(n)]
    for k in range(n):
        p = next(i for i in range(k, n) if M[i][k] != 0)
        M[k], M[p] = M[p], M[k]
        for i in range(n):
            if i != k and M[i][k] != 0:
                f = M[i][k] / M[k][k]
                M[i] = [a - f * c for a, c in zip(M[i], M[k])]
    return [M[i][n] / M[i][i] for i in range(n)]


def sine_mode(m, k=1):
    """Discrete sine mode on the mesh nodes and its Laplacian eigenvalue ``lambda_k``."""
    j = np.arange(m.J + 2)
    s = np.sin(k * np.pi * j * m.h / m.L)
    s[0] = s[-1] = 0.0
    lam = 4.0 / m.h ** 2 * np.sin(k * np.pi * m.h / (2 * m.L)) ** 2
    return s, lam


def gauss_legendre(fun, a, b, n=20):
    x, w = np.polynomial.legendre.leggauss(n)
    t = 0.5 * (b - a) * x + 0.5 * (a + b)
    return 0.5 * (b - a) * np.sum(w * fun(t))
