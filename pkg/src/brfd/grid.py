"""Uniform meshes, discrete function spaces and the basic difference operators.

Grid functions are stored as full-length arrays indexed ``0..J+1`` (nodal
functions) or ``0..J`` (staggered functions on cell midpoints).  Members of
the zero-boundary space always carry their two endpoint zeros explicitly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class DimensionError(ValueError):
    """Raised when a grid function does not conform to a mesh or to its partner."""


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != 1:
        raise DimensionError(f"grid functions are 1-D, got shape {arr.shape}")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class Mesh:
    """Uniform partition of ``[x_a, x_b]`` with ``J`` interior nodes."""

    x_a: float
    x_b: float
    J: int
    h: float = field(init=False)
    L: float = field(init=False)

    def __post_init__(self):
        if not (self.x_b > self.x_a):
            raise ValueError(f"x_b must exceed x_a, got [{self.x_a}, {self.x_b}]")
        if int(self.J) != self.J or self.J < 1:
            raise ValueError(f"J must be a positive integer, got {self.J!r}")
        object.__setattr__(self, "J", int(self.J))
        L = float(self.x_b) - float(self.x_a)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "h", L / (self.J + 1))

    @property
    def size(self) -> int:
        """Number of nodes, ``J + 2``."""
        return self.J + 2

    def node(self, j: int) -> float:
        if j == 0:
            return float(self.x_a)
        if j == self.J + 1:
            return float(self.x_b)
        if not 0 < j <= self.J:
            raise IndexError(f"node index {j} outside 0..{self.J + 1}")
        return self.x_a + j * self.h

    @property
    def nodes(self) -> np.ndarray:
        x = self.x_a + self.h * np.arange(self.J + 2)
        x[0] = self.x_a
        x[-1] = self.x_b
        return x

    @property
    def midpoints(self) -> np.ndarray:
        return self.x_a + self.h * (np.arange(self.J + 1) + 0.5)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform partition of ``[0, T]`` into ``N`` steps."""

    T: float
    N: int
    tau: float = field(init=False)

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError(f"T must be positive, got {self.T}")
        if int(self.N) != self.N or self.N < 1:
            raise ValueError(f"N must be a positive integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "tau", float(self.T) / self.N)

    def t(self, n: int) -> float:
        """Node time ``t_n``; ``t_N`` is returned as ``T`` exactly."""
        if n == self.N:
            return float(self.T)
        return n * self.tau

    def t_half(self, n: int) -> float:
        """Intermediate time ``t_n + tau/2``."""
        return self.t(n) + 0.5 * self.tau

    @property
    def t_quarter(self) -> float:
        return 0.25 * self.tau


class GridFunction:
    """Nodal values ``v_0 .. v_{J+1}`` (read-only)."""

    __slots__ = ("values",)

    def __init__(self, values):
        self.values = _frozen(values)

    def __len__(self):
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __repr__(self):
        return f"{type(self).__name__}({self.values.tolist()!r})"

    def __eq__(self, other):
        if not isinstance(other, GridFunction):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    __hash__ = None

    def conforms(self, m: Mesh) -> bool:
        return len(self.values) == m.J + 2

    # Arithmetic keeps the zero-boundary subtype only when both operands have it.
    def _combine(self, other, op):
        ov = other.values if isinstance(other, GridFunction) else other
        if isinstance(other, GridFunction) and len(ov) != len(self.values):
            raise DimensionError(f"length {len(self.values)} vs {len(ov)}")
        out = op(self.values, ov)
        if isinstance(self, InteriorGridFunction) and (
            isinstance(other, InteriorGridFunction) or np.isscalar(other) and op in (np.multiply, np.divide)
        ):
            return InteriorGridFunction(out)
        return GridFunction(out)

    def __add__(self, other):
        return self._combine(other, np.add)

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            return hadamard(self, other)
        return self._combine(other, np.multiply)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, GridFunction):
            raise TypeError("division of grid functions is not defined")
        return self._combine(other, np.divide)

    def __neg__(self):
        return type(self)(-self.values)


class InteriorGridFunction(GridFunction):
    """Member of the zero-boundary space; endpoints are zeroed on construction."""

    __slots__ = ()

    def __init__(self, values):
        arr = np.array(values, dtype=float)
        if arr.ndim != 1 or arr.size < 3:
            raise DimensionError(f"need at least 3 nodal values, got shape {arr.shape}")
        arr[0] = 0.0
        arr[-1] = 0.0
        self.values = _frozen(arr)

    @classmethod
    def from_interior(cls, interior) -> "InteriorGridFunction":
        interior = np.asarray(interior, dtype=float)
        arr = np.zeros(interior.size + 2)
        arr[1:-1] = interior
        return cls(arr)

    @classmethod
    def zeros(cls, m: Mesh) -> "InteriorGridFunction":
        return cls(np.zeros(m.J + 2))


class StaggeredFunction:
    """Values ``z_0 .. z_J`` on the cell midpoints (read-only)."""

    __slots__ = ("values",)

    def __init__(self, values):
        self.values = _frozen(values)

    def __len__(self):
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def __repr__(self):
        return f"StaggeredFunction({self.values.tolist()!r})"

    def conforms(self, m: Mesh) -> bool:
        return len(self.values) == m.J + 1


def _check(v, m: Mesh, size: int | None = None):
    size = m.J + 2 if size is None else size
    if len(v) != size:
        raise DimensionError(f"expected {size} values for J={m.J}, got {len(v)}")


def laplacian(v: InteriorGridFunction, m: Mesh) -> InteriorGridFunction:
    """Central second difference at the interior nodes, zero at both endpoints."""
    _check(v, m)
    a = np.asarray(v, dtype=float)
    out = np.zeros_like(a)
    out[1:-1] = (a[:-2] - 2.0 * a[1:-1] + a[2:]) / (m.h * m.h)
    return InteriorGridFunction(out)


def forward_difference(v: GridFunction, m: Mesh) -> StaggeredFunction:
    _check(v, m)
    a = np.asarray(v, dtype=float)
    return StaggeredFunction(np.diff(a) / m.h)


def hadamard(v: GridFunction, w: GridFunction) -> GridFunction:
    """Nodewise product; the result lies in the zero-boundary space if either factor does."""
    if len(v) != len(w):
        raise DimensionError(f"length {len(v)} vs {len(w)}")
    out = np.asarray(v, dtype=float) * np.asarray(w, dtype=float)
    if isinstance(v, InteriorGridFunction) or isinstance(w, InteriorGridFunction):
        return InteriorGridFunction(out)
    return GridFunction(out)


def sample(z: Callable, m: Mesh, interior: bool = False) -> GridFunction:
    """Nodal interpolant of ``z``; with ``interior`` the endpoints are forced to 0.

    ``z`` is called once on the node array and must broadcast; scalar-only
    callables are retried node by node.
    """
    x = m.nodes
    try:
        vals = np.broadcast_to(np.asarray(z(x), dtype=float), x.shape)
    except TypeError:
        vals = np.array([z(float(xj)) for xj in x], dtype=float)
    return InteriorGridFunction(vals) if interior else GridFunction(vals)


def compose(q: Callable, *w: GridFunction) -> GridFunction:
    """Apply ``q`` nodewise to one or more conforming grid functions."""
    if not w:
        raise TypeError("compose needs at least one grid function")
    n = len(w[0])
    for wi in w[1:]:
        if len(wi) != n:
            raise DimensionError(f"length {n} vs {len(wi)}")
    arrays = [np.asarray(wi, dtype=float) for wi in w]
    try:
        out = np.broadcast_to(np.asarray(q(*arrays), dtype=float), (n,))
    except TypeError:
        out = np.array([q(*args) for args in zip(*(a.tolist() for a in arrays))], dtype=float)
    return GridFunction(out)
