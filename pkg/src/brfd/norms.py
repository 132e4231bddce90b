"""Discrete inner products and norms on the nodal and staggered spaces."""
from __future__ import annotations

import math

import numpy as np

from .grid import DimensionError, Mesh, forward_difference

# above this many terms sums are accumulated exactly (math.fsum)
COMPENSATED_THRESHOLD = 10_000


def _sum(terms: np.ndarray) -> float:
    if terms.size > COMPENSATED_THRESHOLD:
        return math.fsum(terms.tolist())
    s = 0.0
    for t in terms.tolist():
        s += t
    return s


def _pair(v, z, size):
    a = np.asarray(v, dtype=float)
    b = np.asarray(z, dtype=float)
    if a.shape != (size,) or b.shape != (size,):
        raise DimensionError(f"expected {size} values, got {a.shape} and {b.shape}")
    return a, b


def inner_interior(v, z, m: Mesh) -> float:
    """``h * sum_{j=1..J} v_j z_j``."""
    a, b = _pair(v, z, m.J + 2)
    return m.h * _sum(a[1:-1] * b[1:-1])


def inner_staggered(z, w, m: Mesh) -> float:
    """``h * sum_{j=0..J} z_j w_j``."""
    a, b = _pair(z, w, m.J + 1)
    return m.h * _sum(a * b)


def norm_l2(v, m: Mesh) -> float:
    return math.sqrt(inner_interior(v, v, m))


def norm_l2_staggered(z, m: Mesh) -> float:
    return math.sqrt(inner_staggered(z, z, m))


def norm_inf(v) -> float:
    """Max modulus over every node, endpoints included."""
    a = np.asarray(v, dtype=float)
    return float(np.max(np.abs(a))) if a.size else 0.0


norm_inf_staggered = norm_inf


def seminorm_h1(v, m: Mesh) -> float:
    """Staggered L2 norm of the forward difference; a norm on the zero-boundary space."""
    return norm_l2_staggered(forward_difference(v, m), m)
