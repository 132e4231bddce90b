"""Relaxation time stepping for the semilinear heat equation.

The relaxation method carries, next to ``U^n``, a potential ``Phi^{n+1/2}``
approximating ``g(u)`` at the half-integer times.  Every step then solves one
linear tridiagonal system:

* Step I:   ``U^{1/2}`` from ``U^0`` over ``tau/2`` with the potential frozen at ``g(u^0)``;
* Step II:  ``Phi^{1/2} = g(U^{1/2})`` and ``U^1`` from ``U^0`` over ``tau``;
* Step III: ``Phi^{n+1/2} = 2 g(U^n) - Phi^{n-1/2}`` and ``U^{n+1}`` from ``U^n``.

Each solve is ``(U' - U)/dt = Lap_h(U'+U)/2 + phi (U'+U)/2 + F`` with ``F``
the forcing averaged between the two endpoint times of the step.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import _backend
from .grid import GridFunction, InteriorGridFunction, Mesh, TimeGrid
from .mollifier import Mollifier, build as build_mollifier
from .problems import Problem
from .trisolve import SingularSystemError, Tridiagonal, check_step_condition, solve


class StepConditionWarning(RuntimeWarning):
    """The sufficient solvability condition ``tau * sup|phi| / 4 <= 1/2`` failed."""


class NewtonConvergenceError(ArithmeticError):
    def __init__(self, step: int, residual: float, iterations: int):
        self.step = step
        self.residual = residual
        super().__init__(
            f"Newton iteration did not converge at time step {step}: "
            f"residual {residual:.3e} after {iterations} iterations"
        )


@dataclass(frozen=True)
class BRFD:
    name = "brfd"


@dataclass(frozen=True)
class MBRFD:
    delta: float
    name = "mbrfd"

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError(f"MBRFD needs delta > 0, got {self.delta}")

    @property
    def mollifier(self) -> Mollifier:
        return build_mollifier(self.delta)


@dataclass(frozen=True)
class BRFDSuboptimalInit:
    """Relaxation scheme started with ``Phi^{1/2} = g(u^0)`` (no half step)."""

    name = "brfd_suboptimal"


@dataclass(frozen=True)
class CrankNicolsonNewton:
    """Trapezoidal Crank-Nicolson reference, each step solved by Newton's method."""

    tol: float = 1e-12
    max_iter: int = 25
    name = "cn_newton"

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError(f"Newton tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValueError(f"max_iter must be at least 1, got {self.max_iter}")


SchemeVariant = Union[BRFD, MBRFD, BRFDSuboptimalInit, CrankNicolsonNewton]


@dataclass(frozen=True)
class SchemeState:
    n: int
    U: InteriorGridFunction
    Phi: Optional[GridFunction] = None  # Phi^{n-1/2}, present for n >= 1
    U_half: Optional[InteriorGridFunction] = None


@dataclass
class Trajectory:
    variant: SchemeVariant
    mesh: Mesh
    time_grid: TimeGrid
    stride: int
    states: list = field(default_factory=list)
    U_half: Optional[InteriorGridFunction] = None
    phi: list = field(default_factory=list)  # Phi^{n+1/2}, n = 0..N-1 (relaxation variants)
    condition_margin: float = np.inf
    condition_passed: bool = True

    @property
    def times(self) -> np.ndarray:
        return np.array([self.time_grid.t(s.n) for s in self.states])

    @property
    def final(self) -> SchemeState:
        return self.states[-1]

    def U_array(self) -> np.ndarray:
        return np.array([s.U.values for s in self.states])


# ------------------------------------------------------------------ helpers

def _forcing(problem: Problem, m: Mesh, ta: float, tb: float) -> np.ndarray:
    x = m.nodes
    fa = np.broadcast_to(np.asarray(problem.f(np.float64(ta), x), dtype=float), x.shape)
    fb = np.broadcast_to(np.asarray(problem.f(np.float64(tb), x), dtype=float), x.shape)
    out = 0.5 * (fa + fb)
    out[0] = out[-1] = 0.0
    return out


def _g(problem: Problem, v: np.ndarray) -> np.ndarray:
    return np.broadcast_to(np.asarray(problem.g(v), dtype=float), v.shape).copy()


def _advance(U: np.ndarray, phi: np.ndarray, F: np.ndarray, m: Mesh, dt: float, step: int) -> np.ndarray:
    out, bad = _backend.kernels.relax_step(U, phi, F, m.h, dt)
    if bad >= 0:
        raise SingularSystemError(bad, step)
    return out


def _potential(variant: SchemeVariant, phi: np.ndarray) -> np.ndarray:
    """The coefficient the linear system actually sees."""
    if isinstance(variant, MBRFD):
        return variant.mollifier(phi)
    return phi


def _nonlinear_arg(variant: SchemeVariant, U: np.ndarray) -> np.ndarray:
    if isinstance(variant, MBRFD):
        return variant.mollifier(U)
    return U


# -------------------------------------------------------------------- steps

def step_I(problem: Problem, m: Mesh, tg: TimeGrid):
    """``U^0 = I_h u0`` and the half step ``U^{1/2}`` with potential ``g(u^0)``.

    Linear in the unknown: the potential is evaluated at the initial data,
    never at ``U^{1/2}``.  This is the same for every relaxation variant.
    """
    problem.check_compatible(m)
    x = m.nodes
    U0 = np.broadcast_to(np.asarray(problem.u0(x), dtype=float), x.shape).copy()
    U0[0] = U0[-1] = 0.0
    F = _forcing(problem, m, 0.0, 0.5 * tg.tau)
    U_half = _advance(U0, _g(problem, U0), F, m, 0.5 * tg.tau, step=0)
    return InteriorGridFunction(U0), InteriorGridFunction(U_half)


def step_II(state: SchemeState, problem: Problem, m: Mesh, tg: TimeGrid, variant: SchemeVariant = BRFD()) -> SchemeState:
    """``Phi^{1/2}`` from the half step, then ``U^1`` over a full step from ``U^0``."""
    U0 = state.U.values
    if isinstance(variant, BRFDSuboptimalInit):
        phi = _g(problem, U0)
    else:
        if state.U_half is None:
            raise ValueError("step II needs U_half from step I")
        phi = _g(problem, _nonlinear_arg(variant, state.U_half.values))
    F = _forcing(problem, m, 0.0, tg.t(1))
    U1 = _advance(U0, _potential(variant, phi), F, m, tg.tau, step=1)
    return SchemeState(1, InteriorGridFunction(U1), GridFunction(phi), state.U_half)


def step_III(state: SchemeState, problem: Problem, m: Mesh, tg: TimeGrid, variant: SchemeVariant = BRFD()) -> SchemeState:
    """Reflect the potential, ``Phi^{n+1/2} = 2 g(U^n) - Phi^{n-1/2}``, then advance to ``U^{n+1}``."""
    n = state.n
    if n < 1 or state.Phi is None:
        raise ValueError("step III needs n >= 1 and Phi^{n-1/2}")
    Un = state.U.values
    phi = 2.0 * _g(problem, _nonlinear_arg(variant, Un)) - state.Phi.values
    F = _forcing(problem, m, tg.t(n), tg.t(n + 1))
    U1 = _advance(Un, _potential(variant, phi), F, m, tg.tau, step=n + 1)
    return SchemeState(n + 1, InteriorGridFunction(U1), GridFunction(phi), state.U_half)


# ---------------------------------------------------- Crank-Nicolson/Newton

def _cn_step(U: np.ndarray, problem: Problem, m: Mesh, tg: TimeGrid, n: int, variant: CrankNicolsonNewton) -> np.ndarray:
    tau, h2 = tg.tau, m.h * m.h
    F = _forcing(problem, m, tg.t(n), tg.t(n + 1))[1:-1]

    def lap(v):
        return (v[:-2] - 2.0 * v[1:-1] + v[2:]) / h2

    known = U[1:-1] + 0.5 * tau * (lap(U) + _g(problem, U)[1:-1] * U[1:-1]) + tau * F
    v = U.copy()
    off = np.full(m.J - 1, -0.5 * tau / h2)
    for it in range(variant.max_iter + 1):
        gv = _g(problem, v)[1:-1]
        res = v[1:-1] - 0.5 * tau * (lap(v) + gv * v[1:-1]) - known
        rnorm = float(np.max(np.abs(res)))
        if rnorm <= variant.tol * (1.0 + float(np.max(np.abs(v)))):
            return v
        if it == variant.max_iter:
            break
        dg = np.broadcast_to(np.asarray(problem.g_prime(v[1:-1]), dtype=float), gv.shape)
        jac = Tridiagonal(off, 1.0 + tau / h2 - 0.5 * tau * (gv + dg * v[1:-1]), off)
        try:
            v[1:-1] -= solve(jac, res)
        except SingularSystemError as exc:
            raise SingularSystemError(exc.pivot_index, n + 1) from None
    raise NewtonConvergenceError(n + 1, rnorm, variant.max_iter)


# ---------------------------------------------------------------------- run

def run(problem: Problem, m: Mesh, tg: TimeGrid, variant: SchemeVariant = BRFD(), record_stride: int = 1) -> Trajectory:
    """Integrate from ``t = 0`` to ``T``; snapshots every ``record_stride`` steps plus the last.

    The step condition is checked with ``sup |Phi^{n+1/2}|`` per step (``2 delta``
    once for MBRFD); a failure issues one :class:`StepConditionWarning`.
    """
    if record_stride < 1:
        raise ValueError(f"record_stride must be >= 1, got {record_stride}")
    traj = Trajectory(variant, m, tg, record_stride)

    def keep(state):
        if state.n % record_stride == 0 or state.n == tg.N:
            traj.states.append(state)

    def check(bound):
        cond = check_step_condition(tg.tau, bound)
        traj.condition_margin = min(traj.condition_margin, cond.margin)
        traj.condition_passed = traj.condition_passed and cond.passed

    if isinstance(variant, CrankNicolsonNewton):
        problem.check_compatible(m)
        x = m.nodes
        U = np.broadcast_to(np.asarray(problem.u0(x), dtype=float), x.shape).copy()
        U[0] = U[-1] = 0.0
        keep(SchemeState(0, InteriorGridFunction(U)))
        for n in range(tg.N):
            U = _cn_step(U, problem, m, tg, n, variant)
            keep(SchemeState(n + 1, InteriorGridFunction(U)))
        traj.condition_margin = float("nan")
        return traj

    U0, U_half = step_I(problem, m, tg)
    traj.U_half = U_half
    state = SchemeState(0, U0, None, U_half)
    keep(state)
    if isinstance(variant, MBRFD):
        check(variant.mollifier.bound)
    else:
        check(float(np.max(np.abs(_g(problem, U0.values)))))
    for n in range(tg.N):
        state = (step_II if n == 0 else step_III)(state, problem, m, tg, variant)
        traj.phi.append(state.Phi)
        if not isinstance(variant, MBRFD):
            check(float(np.max(np.abs(state.Phi.values))))
        keep(state)
    if not traj.condition_passed:
        warnings.warn(
            f"step condition tau*sup|phi|/4 <= 1/2 violated (margin {traj.condition_margin:.3e}); "
            "solvability is not guaranteed",
            StepConditionWarning,
            stacklevel=2,
        )
    return traj
