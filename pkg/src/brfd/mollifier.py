"""Odd C^3 saturation ``n_delta``: identity on [0, delta], a degree-7 bridge on
(delta, 2 delta], and the constant 2 delta beyond.

The bridge for ``delta = 1`` is computed once, in the variable
``r = 2 - x/delta`` (distance to the right knot), and rescaled as
``p_delta(x) = delta * p_1(x/delta)``.  Expanding about the right knot makes
``p_1 = 2 + r^4 * (...)`` with the four lowest coefficients fixed exactly by
the flat conditions there, so rounding can never lift the bridge above 2.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import perm

import numpy as np

from .grid import GridFunction, InteriorGridFunction


def _hermite_row(r: float, order: int) -> list[float]:
    return [perm(i, order) * r ** (i - order) if i >= order else 0.0 for i in range(8)]


@lru_cache(maxsize=1)
def _bridge_coefficients() -> tuple[float, ...]:
    # Conditions in r: at r = 0 (x = 2 delta) value 2 and zero derivatives,
    # at r = 1 (x = delta) value 1, slope dp/dr = -1, zero 2nd and 3rd derivative.
    A = np.array([_hermite_row(0.0, k) for k in range(4)] + [_hermite_row(1.0, k) for k in range(4)])
    b = np.array([2.0, 0.0, 0.0, 0.0, 1.0, -1.0, 0.0, 0.0])
    # Block lower-triangular: the r = 0 rows are diagonal in c_0..c_3.
    low = b[:4] / np.diag(A[:4, :4])
    high = np.linalg.solve(A[4:, 4:], b[4:] - A[4:, :4] @ low)
    return tuple(np.concatenate([low, high]).tolist())


def _poly_derivative(coeffs, r, order):
    """Horner evaluation of the ``order``-th r-derivative of sum c_i r^i."""
    c = [perm(i, order) * coeffs[i] for i in range(order, len(coeffs))]
    out = np.zeros_like(r) + c[-1]
    for ci in reversed(c[:-1]):
        out = out * r + ci
    return out


@dataclass(frozen=True)
class Mollifier:
    delta: float
    coeffs: tuple = field(default_factory=_bridge_coefficients, repr=False)

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"delta must be positive, got {self.delta}")

    def __call__(self, x, order: int = 0):
        return evaluate(self, x, order)

    @property
    def bound(self) -> float:
        """``sup |n_delta| = 2 delta``."""
        return 2.0 * self.delta


def build(delta: float) -> Mollifier:
    return Mollifier(float(delta))


def _bridge(moll: Mollifier, ax: np.ndarray, order: int) -> np.ndarray:
    d = moll.delta
    r = 2.0 - ax / d
    if order == 0:
        # p_1 = c0 + r^4 (c4 + c5 r + ...), c1..c3 exactly zero
        tail = _poly_derivative(moll.coeffs[4:], r, 0)
        return d * (moll.coeffs[0] + r ** 4 * tail)
    # d/dx = -(1/delta) d/dr
    return (-1.0) ** order * d ** (1 - order) * _poly_derivative(moll.coeffs, r, order)


def evaluate(moll: Mollifier, x, order: int = 0):
    """``n_delta`` or one of its first three derivatives, elementwise.

    At the knots the value (order 0) comes from the identity/constant branch
    and derivatives (order >= 1) from the polynomial; the joins agree there.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError(f"order must be 0..3, got {order}")
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    d = moll.delta
    if order == 0:
        inner = ax <= d
        outer = ax > 2.0 * d
    else:
        inner = ax < d
        outer = ax > 2.0 * d
    mid = ~(inner | outer)
    out = np.empty_like(ax)
    if order == 0:
        out[inner] = ax[inner]
        out[outer] = 2.0 * d
    else:
        out[inner] = 1.0 if order == 1 else 0.0
        out[outer] = 0.0
    if mid.any():
        out[mid] = _bridge(moll, ax[mid], order)
    # odd function: even-order derivatives are odd, odd-order ones even
    if order % 2 == 0:
        out = np.where(x < 0, -out, out)
        if order == 0:
            out[inner] = x[inner]
    return float(out) if scalar else out


def apply(moll: Mollifier, v: GridFunction) -> GridFunction:
    out = evaluate(moll, np.asarray(v, dtype=float))
    return InteriorGridFunction(out) if isinstance(v, InteriorGridFunction) else GridFunction(out)
