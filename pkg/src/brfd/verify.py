"""Built-in invariant battery behind ``brfd verify``."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import grid
from .grid import InteriorGridFunction, Mesh, forward_difference
from .mollifier import _bridge, build, evaluate
from .norms import inner_interior, inner_staggered, norm_inf, norm_l2, seminorm_h1
from .problems import elliptic_defect, project
from .trisolve import Tridiagonal, solve


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_interior(rng, m: Mesh) -> InteriorGridFunction:
    return InteriorGridFunction(np.r_[0.0, rng.standard_normal(m.J), 0.0])


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def check_summation_by_parts(rng, laplacian=grid.laplacian, pairs=1000, sizes=(9, 99, 999)) -> CheckResult:
    worst = 0.0
    for J in sizes:
        m = Mesh(0.0, 1.0, J)
        for _ in range(pairs // len(sizes) + 1):
            v, z = _random_interior(rng, m), _random_interior(rng, m)
            left = inner_interior(laplacian(v, m), z, m)
            mid = -inner_staggered(forward_difference(v, m), forward_difference(z, m), m)
            right = inner_interior(v, laplacian(z, m), m)
            worst = max(worst, _rel(left, mid), _rel(mid, right))
    return CheckResult("summation_by_parts", worst <= 1e-12, f"max relative error {worst:.2e}")


def check_energy_identity(rng, laplacian=grid.laplacian, samples=300, sizes=(9, 99, 999)) -> CheckResult:
    worst = 0.0
    for J in sizes:
        m = Mesh(0.0, 1.0, J)
        for _ in range(samples // len(sizes) + 1):
            v = _random_interior(rng, m)
            worst = max(worst, _rel(inner_interior(laplacian(v, m), v, m), -seminorm_h1(v, m) ** 2))
    return CheckResult("energy_identity", worst <= 1e-12, f"max relative error {worst:.2e}")


def check_sobolev_poincare(rng, samples=1000, meshes=((0.0, 1.0, 9), (-1.0, 2.0, 50), (0.0, 5.0, 400))) -> CheckResult:
    bad = 0
    for x_a, x_b, J in meshes:
        m = Mesh(x_a, x_b, J)
        for i in range(samples):
            # alternate rough and smooth-ish shapes
            v = _random_interior(rng, m)
            if i % 2:
                v = InteriorGridFunction(np.cumsum(v.values) - np.linspace(0, np.sum(v.values), m.J + 2))
            h1 = seminorm_h1(v, m)
            bad += norm_inf(v) > np.sqrt(m.L) * h1
            bad += norm_l2(v, m) > m.L * h1
    return CheckResult("sobolev_poincare", bool(bad == 0), f"{bad} violations")


def check_mollifier(rng) -> CheckResult:
    worst_cond = worst_join = 0.0
    bounded = identity = True
    for delta in (0.1, 1.0, 10.0):
        mol = build(delta)
        lo, hi = delta, 2 * delta
        # Hermite data of the bridge at both knots
        data = {lo: (lo, 1.0, 0.0, 0.0), hi: (hi, 0.0, 0.0, 0.0)}
        for knot, want in data.items():
            for order in range(4):
                got = _bridge(mol, np.array([knot]), order)[0]
                worst_cond = max(worst_cond, abs(got - want[order]) / max(1.0, delta ** (1 - order)))
        # one-sided limits through the public evaluator
        for knot in (lo, hi):
            for order in range(4):
                inside = evaluate(mol, knot, order) if order else _bridge(mol, np.array([knot]), 0)[0]
                outer = evaluate(mol, knot, 0) if order == 0 else (1.0 if (knot == lo and order == 1) else 0.0)
                worst_join = max(worst_join, abs(inside - outer) / max(1.0, delta ** (1 - order)))
        x = rng.uniform(-10 * delta, 10 * delta, 20_000)
        bounded &= bool(np.all(np.abs(evaluate(mol, x)) <= 2 * delta))
        y = rng.uniform(-delta, delta, 1000)
        identity &= bool(np.array_equal(evaluate(mol, y), y))
    ok = worst_cond <= 1e-10 and worst_join <= 1e-9 and bounded and identity
    return CheckResult(
        "mollifier",
        ok,
        f"hermite {worst_cond:.1e}, joins {worst_join:.1e}, bounded={bounded}, identity={identity}",
    )


def check_thomas_vs_dense(rng, systems=200, max_J=400) -> CheckResult:
    worst = 0.0
    for _ in range(systems):
        J = int(rng.integers(1, max_J + 1))
        lo, up = rng.uniform(-1, 1, J - 1), rng.uniform(-1, 1, J - 1)
        d = (np.abs(np.r_[lo, 0.0]) + np.abs(np.r_[0.0, up]) + rng.uniform(0.5, 2.0, J)) * rng.choice([-1, 1], J)
        t = Tridiagonal(lo, d, up)
        b = rng.standard_normal(J)
        x = solve(t, b)
        ref = np.linalg.solve(t.to_dense(), b)
        worst = max(worst, np.max(np.abs(x - ref)) / np.max(np.abs(ref)))
    return CheckResult("thomas_vs_dense", bool(worst <= 1e-12), f"max relative discrepancy {worst:.2e}")


def check_elliptic_projection(rng=None) -> CheckResult:
    ok = True
    parts = []
    for Jp in (20, 40, 80):
        m = Mesh(0.0, 1.0, Jp - 1)
        v = lambda x: np.sin(np.pi * x)
        vxx = lambda x: -np.pi ** 2 * np.sin(np.pi * x)
        Rv = project(vxx, m)
        lhs = seminorm_h1(Rv - InteriorGridFunction(v(m.nodes)), m)
        rhs = m.L / 12 * m.h ** 2 * norm_l2(elliptic_defect(v, vxx, m), m)
        ok &= lhs <= rhs
        parts.append(f"J+1={Jp}: {lhs:.3e}<={rhs:.3e}")
    return CheckResult("elliptic_projection_bound", bool(ok), "; ".join(parts))


def run_battery(seed: int = 20240601, laplacian=grid.laplacian) -> list[CheckResult]:
    """Run every check; ``laplacian`` may be swapped to exercise failure paths."""
    rng = np.random.default_rng(seed)
    return [
        check_summation_by_parts(rng, laplacian),
        check_energy_identity(rng, laplacian),
        check_sobolev_poincare(rng),
        check_mollifier(rng),
        check_thomas_vs_dense(rng),
        check_elliptic_projection(rng),
    ]


def timed_battery(**kwargs):
    start = time.perf_counter()
    results = run_battery(**kwargs)
    return results, time.perf_counter() - start
