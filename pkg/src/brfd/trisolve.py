"""Per-step tridiagonal operator, its Thomas solve, and the step-size condition.

The operator of one averaged step with time increment ``dt`` and frozen
potential ``phi`` is

    v  ->  v - (dt/2) Lap_h v - (dt/2) phi * v

restricted to the interior nodes.  This is the existence-proof operator
``2v - tau Lap_h v - tau n(zeta) v`` divided by two, so residuals are
measured against the leading-1 form.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _backend
from .grid import DimensionError, Mesh


class SingularSystemError(ArithmeticError):
    """A pivot of the Thomas elimination fell below the relative threshold."""

    def __init__(self, pivot_index: int, step: int | None = None):
        self.pivot_index = pivot_index
        self.step = step
        where = f" at time step {step}" if step is not None else ""
        super().__init__(f"singular tridiagonal system{where}: vanishing pivot at row {pivot_index}")


@dataclass(frozen=True)
class Tridiagonal:
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=float)
        lo = np.array(self.lower, dtype=float)
        up = np.array(self.upper, dtype=float)
        if d.ndim != 1 or d.size < 1 or lo.shape != (d.size - 1,) or up.shape != (d.size - 1,):
            raise DimensionError(
                f"inconsistent band lengths: lower {lo.shape}, diag {d.shape}, upper {up.shape}"
            )
        for name, arr in (("lower", lo), ("diag", d), ("upper", up)):
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    @property
    def J(self) -> int:
        return self.diag.size

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        y = self.diag * x
        y[1:] += self.lower * x[:-1]
        y[:-1] += self.upper * x[1:]
        return y

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.lower, -1) + np.diag(self.upper, 1)


def assemble_step_operator(m: Mesh, dt: float, phi) -> Tridiagonal:
    """Matrix of ``v - (dt/2) Lap_h v - (dt/2) phi * v`` on the ``J`` interior unknowns."""
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    phi = np.asarray(phi, dtype=float)
    if phi.shape != (m.J + 2,):
        raise DimensionError(f"phi has {phi.size} values, mesh needs {m.J + 2}")
    a = dt / (2.0 * m.h * m.h)
    diag = 1.0 + 2.0 * a - 0.5 * dt * phi[1:-1]
    off = np.full(m.J - 1, -a)
    return Tridiagonal(off, diag, off)


def solve(t: Tridiagonal, rhs) -> np.ndarray:
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (t.J,):
        raise DimensionError(f"rhs has shape {rhs.shape}, operator is {t.J}x{t.J}")
    x, bad = _backend.kernels.thomas(t.lower, t.diag, t.upper, rhs)
    if bad >= 0:
        raise SingularSystemError(bad)
    return x


@dataclass(frozen=True)
class StepCondition:
    passed: bool
    margin: float  # 1/2 - dt * phi_bound / 4; nonnegative iff passed

    def __bool__(self):
        return self.passed


def check_step_condition(dt: float, phi_bound: float) -> StepCondition:
    """Sufficient condition ``dt * phi_bound / 4 <= 1/2`` for a uniquely solvable step.

    ``phi_bound`` bounds the potential's max norm (``2*delta`` for the
    mollified scheme).  Failing does not imply singularity.
    """
    if dt < 0 or phi_bound < 0:
        raise ValueError(f"dt and phi_bound must be nonnegative, got {dt}, {phi_bound}")
    margin = 0.5 - dt * phi_bound / 4.0
    return StepCondition(margin >= 0.0, margin)
