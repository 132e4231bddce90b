"""Problem data for ``u_t = u_xx + g(u) u + f`` with homogeneous Dirichlet ends.

Besides the data containers this module holds manufactured solutions, a
small named catalog, and the consistency-residual probes: each probe inserts
the exact solution into one of the scheme's defining relations and returns
the defect, obtained by plain rearrangement of that relation.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .grid import InteriorGridFunction, Mesh, TimeGrid, laplacian
from .trisolve import Tridiagonal, solve

COMPAT_TOL = 1e-12


class MissingExactSolutionError(ValueError):
    pass


class IncompatibleDataError(ValueError):
    """Initial data violates the zero boundary values."""


@dataclass(frozen=True)
class ExactSolution:
    """``u`` and the derivatives the probes need, all vectorized in ``(t, x)``."""

    u: Callable
    u_t: Callable
    u_x: Callable
    u_xx: Callable


@dataclass(frozen=True)
class Problem:
    g: Callable
    g_prime: Callable
    f: Callable
    u0: Callable
    exact: Optional[ExactSolution] = None
    name: str = "custom"

    def check_compatible(self, m: Mesh, tol: float = COMPAT_TOL):
        ends = np.array([self.u0(np.float64(m.x_a)), self.u0(np.float64(m.x_b))], dtype=float)
        if np.max(np.abs(ends)) > tol:
            raise IncompatibleDataError(
                f"u0 must vanish at both ends, got u0({m.x_a})={ends[0]:.3e}, u0({m.x_b})={ends[1]:.3e}"
            )
        if self.exact is not None:
            x = m.nodes
            gap = np.max(np.abs(_eval(self.u0, x) - _eval_tx(self.exact.u, 0.0, x)))
            if gap > tol:
                raise IncompatibleDataError(f"u0 differs from exact u(0, .) by {gap:.3e}")

    def require_exact(self) -> ExactSolution:
        if self.exact is None:
            raise MissingExactSolutionError(f"problem {self.name!r} has no exact solution")
        return self.exact


def _eval(fun, x):
    return np.broadcast_to(np.asarray(fun(x), dtype=float), np.shape(x)).copy()


def _eval_tx(fun, t, x):
    return np.broadcast_to(np.asarray(fun(np.float64(t), x), dtype=float), np.shape(x)).copy()


def manufacture(exact: ExactSolution, g: Callable, g_prime: Callable, name: str = "manufactured") -> Problem:
    """Problem whose forcing ``f = u_t - u_xx - g(u) u`` makes ``exact`` a solution."""

    def f(t, x):
        u = exact.u(t, x)
        return exact.u_t(t, x) - exact.u_xx(t, x) - g(u) * u

    return Problem(g=g, g_prime=g_prime, f=f, u0=lambda x: exact.u(0.0, x), exact=exact, name=name)


# ---------------------------------------------------------------- catalog

def _zero_tx(t, x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _zero_u(u):
    return np.zeros_like(np.asarray(u, dtype=float))


def _sine_mode(x_a: float, L: float, k: int, rate: Callable, rate_dt: Callable) -> ExactSolution:
    w = k * np.pi / L
    return ExactSolution(
        u=lambda t, x: rate(t) * np.sin(w * (x - x_a)),
        u_t=lambda t, x: rate_dt(t) * np.sin(w * (x - x_a)),
        u_x=lambda t, x: w * rate(t) * np.cos(w * (x - x_a)),
        u_xx=lambda t, x: -w * w * rate(t) * np.sin(w * (x - x_a)),
    )


def linear_heat_mode(k: int = 1, x_a: float = 0.0, x_b: float = 1.0) -> Problem:
    lam = (k * np.pi / (x_b - x_a)) ** 2
    exact = _sine_mode(x_a, x_b - x_a, k, lambda t: np.exp(-lam * t), lambda t: -lam * np.exp(-lam * t))
    return Problem(
        g=_zero_u, g_prime=_zero_u, f=_zero_tx,
        u0=lambda x: exact.u(0.0, x), exact=exact, name=f"linear_heat_mode_{k}",
    )


def mms_exp_sine(g: Callable, g_prime: Callable, name: str, x_a: float = 0.0, x_b: float = 1.0) -> Problem:
    """``u = exp(-t) sin(pi (x - x_a)/L)`` with forcing manufactured for ``g``."""
    exact = _sine_mode(x_a, x_b - x_a, 1, lambda t: np.exp(-t), lambda t: -np.exp(-t))
    return manufacture(exact, g, g_prime, name=name)


def zero_problem(x_a: float = 0.0, x_b: float = 1.0) -> Problem:
    exact = ExactSolution(_zero_tx, _zero_tx, _zero_tx, _zero_tx)
    return Problem(
        g=lambda u: np.asarray(u, dtype=float), g_prime=lambda u: np.ones_like(np.asarray(u, dtype=float)),
        f=_zero_tx, u0=lambda x: np.zeros_like(np.asarray(x, dtype=float)), exact=exact, name="zero",
    )


CATALOG = ("linear_heat_mode_k", "mms_exp_sine_gsin", "mms_exp_sine_gu", "zero")


def get_problem(name: str, x_a: float = 0.0, x_b: float = 1.0, k: int = 1) -> Problem:
    """Look up a catalog problem; ``linear_heat_mode_<k>`` picks the mode directly."""
    if name == "zero":
        return zero_problem(x_a, x_b)
    if name == "mms_exp_sine_gsin":
        return mms_exp_sine(np.sin, np.cos, name, x_a, x_b)
    if name == "mms_exp_sine_gu":
        return mms_exp_sine(lambda u: u, lambda u: np.ones_like(u), name, x_a, x_b)
    match = re.fullmatch(r"linear_heat_mode_(k|\d+)", name)
    if match:
        mode = k if match.group(1) == "k" else int(match.group(1))
        if mode < 1:
            raise ValueError(f"mode number must be positive, got {mode}")
        return linear_heat_mode(mode, x_a, x_b)
    raise KeyError(f"unknown problem {name!r}; catalog: {', '.join(CATALOG)}")


# --------------------------------------------------------- residual probes

def _finish(values: np.ndarray, raw: bool):
    if raw:
        return values
    return InteriorGridFunction(values)


def residual_time_node(problem: Problem, m: Mesh, tg: TimeGrid, n: int, raw: bool = False):
    """Defect of the exact solution in the node-to-node relation, ``r^{n+1/2}``.

    Uses the continuous ``u_xx``; spatial truncation is probed separately by
    :func:`residual_space`.  With ``raw`` the unzeroed endpoint values are
    returned as a plain array.
    """
    ex = problem.require_exact()
    if not 0 <= n <= tg.N - 1:
        raise IndexError(f"n must lie in 0..{tg.N - 1}, got {n}")
    x, t0, t1, th = m.nodes, tg.t(n), tg.t(n + 1), tg.t_half(n)
    u0, u1, uh = (_eval_tx(ex.u, t, x) for t in (t0, t1, th))
    r = (
        (u1 - u0) / tg.tau
        - 0.5 * (_eval_tx(ex.u_xx, t1, x) + _eval_tx(ex.u_xx, t0, x))
        - _eval(problem.g, uh) * 0.5 * (u1 + u0)
        - 0.5 * (_eval_tx(problem.f, t1, x) + _eval_tx(problem.f, t0, x))
    )
    return _finish(r, raw)


def residual_half_node(problem: Problem, m: Mesh, tg: TimeGrid, raw: bool = False):
    """Defect of the exact solution in the initial half-step relation, ``r^{1/4}``."""
    ex = problem.require_exact()
    x, th = m.nodes, 0.5 * tg.tau
    u0, uh = _eval_tx(ex.u, 0.0, x), _eval_tx(ex.u, th, x)
    r = (
        (uh - u0) / th
        - 0.5 * (_eval_tx(ex.u_xx, th, x) + _eval_tx(ex.u_xx, 0.0, x))
        - _eval(problem.g, u0) * 0.5 * (uh + u0)
        - 0.5 * (_eval_tx(problem.f, th, x) + _eval_tx(problem.f, 0.0, x))
    )
    return _finish(r, raw)


def half_node_parts(problem: Problem, m: Mesh, tg: TimeGrid) -> dict[str, InteriorGridFunction]:
    """Split ``r^{1/4} = A - B - C - D`` against the PDE at ``t = tau/4``.

    A: time difference quotient, B: averaged ``u_xx``, C: frozen nonlinearity
    (first order in tau), D: averaged forcing.
    """
    ex = problem.require_exact()
    x, th, tq = m.nodes, 0.5 * tg.tau, 0.25 * tg.tau
    u0, uh, uq = (_eval_tx(ex.u, t, x) for t in (0.0, th, tq))
    g0, gq = _eval(problem.g, u0), _eval(problem.g, uq)
    parts = {
        "A": (uh - u0) / th - _eval_tx(ex.u_t, tq, x),
        "B": 0.5 * (_eval_tx(ex.u_xx, th, x) + _eval_tx(ex.u_xx, 0.0, x)) - _eval_tx(ex.u_xx, tq, x),
        "C": -(gq - g0) * uq + g0 * (0.5 * (uh + u0) - uq),
        "D": 0.5 * (_eval_tx(problem.f, th, x) + _eval_tx(problem.f, 0.0, x)) - _eval_tx(problem.f, tq, x),
    }
    return {k: InteriorGridFunction(v) for k, v in parts.items()}


def residual_space(problem: Problem, m: Mesh, tg: TimeGrid, n: Optional[int] = None) -> InteriorGridFunction:
    """Spatial part ``r - s``: sampled averaged ``u_xx`` minus ``Lap_h`` of the averaged samples.

    ``n=None`` selects the initial half step (times ``0`` and ``tau/2``).
    """
    ex = problem.require_exact()
    if n is None:
        ta, tb = 0.0, 0.5 * tg.tau
    else:
        if not 0 <= n <= tg.N - 1:
            raise IndexError(f"n must lie in 0..{tg.N - 1}, got {n}")
        ta, tb = tg.t(n), tg.t(n + 1)
    x = m.nodes
    uxx = InteriorGridFunction(0.5 * (_eval_tx(ex.u_xx, ta, x) + _eval_tx(ex.u_xx, tb, x)))
    avg = InteriorGridFunction(0.5 * (_eval_tx(ex.u, ta, x) + _eval_tx(ex.u, tb, x)))
    return uxx - laplacian(avg, m)


def residual_midpoint(problem: Problem, m: Mesh, tg: TimeGrid, n: int) -> InteriorGridFunction:
    """``r^n = (g(u^{n+1/2}) + g(u^{n-1/2}))/2 - g(u^n)`` for ``1 <= n <= N-1``."""
    ex = problem.require_exact()
    if not 1 <= n <= tg.N - 1:
        raise IndexError(f"n must lie in 1..{tg.N - 1}, got {n}")
    x = m.nodes
    g = problem.g
    r = (
        0.5 * (_eval(g, _eval_tx(ex.u, tg.t_half(n), x)) + _eval(g, _eval_tx(ex.u, tg.t_half(n - 1), x)))
        - _eval(g, _eval_tx(ex.u, tg.t(n), x))
    )
    return InteriorGridFunction(r)


# ------------------------------------------------------ elliptic projection

def _laplacian_matrix(m: Mesh) -> Tridiagonal:
    c = 1.0 / (m.h * m.h)
    off = np.full(m.J - 1, c)
    return Tridiagonal(off, np.full(m.J, -2.0 * c), off)


def elliptic_projection(v_xx_samples, m: Mesh) -> InteriorGridFunction:
    """The ``w`` in the zero-boundary space with ``Lap_h w = I_h(v'')`` at interior nodes."""
    rhs = np.asarray(v_xx_samples, dtype=float)
    if rhs.shape != (m.J + 2,):
        raise ValueError(f"expected {m.J + 2} samples, got {rhs.shape}")
    return InteriorGridFunction.from_interior(solve(_laplacian_matrix(m), rhs[1:-1]))


def project(v_xx: Callable, m: Mesh) -> InteriorGridFunction:
    """Elliptic projection of a function given through its second derivative."""
    return elliptic_projection(InteriorGridFunction(_eval(v_xx, m.nodes)), m)


def project_exact(exact: ExactSolution, t: float, m: Mesh) -> InteriorGridFunction:
    return project(lambda x: exact.u_xx(t, x), m)


def elliptic_defect(v: Callable, v_xx: Callable, m: Mesh) -> InteriorGridFunction:
    """``r^E(v) = (12/h^2) (Lap_h I_h v - I_h v'')``, by rearrangement."""
    x = m.nodes
    lap = laplacian(InteriorGridFunction(_eval(v, x)), m)
    return (lap - InteriorGridFunction(_eval(v_xx, x))) * (12.0 / (m.h * m.h))
