"""Error measurement against exact solutions and refinement studies."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np

from .grid import Mesh, TimeGrid
from .norms import norm_inf, norm_l2, seminorm_h1
from .problems import Problem
from .scheme import BRFD, MBRFD, SchemeVariant, Trajectory, run

FLOOR = 1e-13
PRE_ASYMPTOTIC_SPREAD = 0.3
COUPLINGS = ("proportional", "fixed_h", "fixed_tau")


@dataclass(frozen=True)
class RefinementPlan:
    """Halving sequence starting from ``J0`` interior nodes and ``N0`` steps.

    ``proportional`` doubles both ``J+1`` and ``N`` per level (``tau = c h``),
    ``fixed_h`` doubles only ``N``, ``fixed_tau`` doubles only ``J+1``.
    """

    J0: int
    N0: int
    levels: int = 4
    coupling: str = "proportional"
    x_a: float = 0.0
    x_b: float = 1.0
    T: float = 1.0

    def __post_init__(self):
        if self.levels < 2:
            raise ValueError(f"a study needs at least 2 levels, got {self.levels}")
        if self.coupling not in COUPLINGS:
            raise ValueError(f"coupling must be one of {COUPLINGS}, got {self.coupling!r}")
        if self.J0 < 1 or self.N0 < 1:
            raise ValueError(f"J0 and N0 must be positive, got {self.J0}, {self.N0}")

    def grids(self) -> list[tuple[Mesh, TimeGrid]]:
        out = []
        for i in range(self.levels):
            sx = 1 if self.coupling == "fixed_h" else 2 ** i
            st = 1 if self.coupling == "fixed_tau" else 2 ** i
            out.append((Mesh(self.x_a, self.x_b, (self.J0 + 1) * sx - 1), TimeGrid(self.T, self.N0 * st)))
        return out

    def step_sizes(self) -> list[float]:
        """The refined quantity per level: ``tau`` for ``fixed_h``, else ``h``."""
        if self.coupling == "fixed_h":
            return [tg.tau for _, tg in self.grids()]
        return [m.h for m, _ in self.grids()]


@dataclass(frozen=True)
class Errors:
    traj_h1: float
    half_h1: float
    phi_h1: float
    l2: float
    inf: float


@dataclass(frozen=True)
class LevelResult:
    level: int
    J: int
    N: int
    h: float
    tau: float
    err_traj_h1: float
    err_half_h1: float
    err_phi_h1: float
    err_l2: float
    err_inf: float
    condition_margin: float


@dataclass(frozen=True)
class OrderFit:
    slope: Optional[float]  # least squares over all levels; None when at floor
    per_pair: tuple
    at_floor: bool = False
    pre_asymptotic: bool = False
    slope_trimmed: Optional[float] = None  # coarsest level dropped
    levels_used: int = 0

    @property
    def order(self) -> Optional[float]:
        if self.pre_asymptotic and self.slope_trimmed is not None:
            return self.slope_trimmed
        return self.slope


@dataclass
class ConvergenceReport:
    plan: RefinementPlan
    variant: SchemeVariant
    levels: list = field(default_factory=list)
    orders: dict = field(default_factory=dict)
    coincidence: Optional[float] = None  # MBRFD vs BRFD max deviation, when checked

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(lv, name) for lv in self.levels])

    def to_dict(self) -> dict:
        return {
            "levels": [asdict(lv) for lv in self.levels],
            "fitted_orders": {k: v.order for k, v in self.orders.items()},
            "fits": {k: asdict(v) for k, v in self.orders.items()},
            "guards": {
                "at_floor": {k: v.at_floor for k, v in self.orders.items()},
                "pre_asymptotic": {k: v.pre_asymptotic for k, v in self.orders.items()},
            },
        }


def _lsq_slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def estimate_order(errs, steps) -> OrderFit:
    """Least-squares slope of ``log err`` against ``log step`` plus per-pair slopes.

    Any error below ``FLOOR`` (or nonpositive) sets ``at_floor`` and no slope is
    returned.  When per-pair slopes spread by more than 0.3 the fit is repeated
    without the coarsest level and the fit is flagged pre-asymptotic.
    """
    errs = np.asarray(errs, dtype=float)
    steps = np.asarray(steps, dtype=float)
    if errs.size < 2 or errs.shape != steps.shape:
        raise ValueError("need at least two matching (err, step) levels")
    if np.any(steps <= 0) or np.any(np.diff(steps) >= 0):
        raise ValueError("steps must be positive and strictly decreasing")
    if np.any(~np.isfinite(errs)) or np.any(errs < FLOOR):
        return OrderFit(None, (), at_floor=True, levels_used=0)
    pairs = tuple(float(v) for v in np.log(errs[:-1] / errs[1:]) / np.log(steps[:-1] / steps[1:]))
    slope = _lsq_slope(steps, errs)
    pre = len(pairs) > 1 and (max(pairs) - min(pairs)) > PRE_ASYMPTOTIC_SPREAD
    trimmed = _lsq_slope(steps[1:], errs[1:]) if pre else None
    return OrderFit(slope, pairs, False, pre, trimmed, errs.size)


def fit_above_floor(errs, steps) -> OrderFit:
    """Drop levels at or below the floor from the fine end, then fit the rest."""
    errs = list(errs)
    steps = list(steps)
    dropped = False
    while len(errs) > 2 and not (errs[-1] >= FLOOR and np.isfinite(errs[-1])):
        errs.pop()
        steps.pop()
        dropped = True
    fit = estimate_order(errs, steps)
    return replace(fit, at_floor=True) if dropped else fit


def measure_errors(traj: Trajectory, problem: Problem) -> Errors:
    """Maxima over the run of the ``|.|_{1,h}`` errors, plus L2 and max-norm trajectory errors.

    Entries that a variant does not produce (half step, potential) are ``nan``.
    """
    ex = problem.require_exact()
    if traj.stride != 1:
        raise ValueError("error measurement needs every step recorded (stride 1)")
    m, tg = traj.mesh, traj.time_grid
    x = m.nodes

    def exact_at(t):
        u = np.broadcast_to(np.asarray(ex.u(np.float64(t), x), dtype=float), x.shape).copy()
        u[0] = u[-1] = 0.0
        return u

    h1 = l2 = inf = 0.0
    for s in traj.states:
        e = exact_at(tg.t(s.n)) - s.U.values
        h1 = max(h1, seminorm_h1(e, m))
        l2 = max(l2, norm_l2(e, m))
        inf = max(inf, norm_inf(e))
    half = math.nan
    if traj.U_half is not None:
        half = seminorm_h1(exact_at(0.5 * tg.tau) - traj.U_half.values, m)
    phi = math.nan
    if traj.phi:
        phi = 0.0
        for n, P in enumerate(traj.phi):
            gu = np.asarray(problem.g(np.asarray(ex.u(np.float64(tg.t_half(n)), x), dtype=float)), dtype=float)
            phi = max(phi, seminorm_h1(np.broadcast_to(gu, x.shape) - P.values, m))
    return Errors(h1, half, phi, l2, inf)


def coincidence(problem: Problem, m: Mesh, tg: TimeGrid, delta: float) -> float:
    """Largest max-norm gap between MBRFD(delta) and BRFD over all ``U^n``, ``U^{1/2}``, ``Phi``."""
    a = run(problem, m, tg, BRFD())
    b = run(problem, m, tg, MBRFD(delta))
    gap = norm_inf(a.U_half.values - b.U_half.values)
    for sa, sb in zip(a.states, b.states):
        gap = max(gap, norm_inf(sa.U.values - sb.U.values))
    for pa, pb in zip(a.phi, b.phi):
        gap = max(gap, norm_inf(pa.values - pb.values))
    return gap


def _one_level(i, m, tg, problem, variant) -> LevelResult:
    traj = run(problem, m, tg, variant)
    e = measure_errors(traj, problem)
    return LevelResult(i, m.J, tg.N, m.h, tg.tau, e.traj_h1, e.half_h1, e.phi_h1, e.l2, e.inf, traj.condition_margin)


def refinement_study(problem: Problem, plan: RefinementPlan, variant: SchemeVariant = BRFD(), jobs: int = 1) -> ConvergenceReport:
    grids = plan.grids()
    args = [(i, m, tg, problem, variant) for i, (m, tg) in enumerate(grids)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            levels = list(pool.map(lambda a: _one_level(*a), args))
    else:
        levels = [_one_level(*a) for a in args]
    report = ConvergenceReport(plan, variant, levels)
    steps = plan.step_sizes()
    for key, col in (("traj_h1", "err_traj_h1"), ("half_h1", "err_half_h1"), ("phi_h1", "err_phi_h1")):
        errs = report.column(col)
        if np.all(np.isnan(errs)):
            continue
        report.orders[key] = fit_above_floor(errs, steps)
    if isinstance(variant, MBRFD):
        report.coincidence = max(coincidence(problem, m, tg, variant.delta) for m, tg in grids)
    return report
