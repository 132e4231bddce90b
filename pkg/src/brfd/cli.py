"""Command line front end: ``brfd solve``, ``brfd study`` and ``brfd verify``.

Exit codes: 0 ok, 1 verify failure, 2 config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import _backend
from .convergence import COUPLINGS, RefinementPlan, measure_errors, refinement_study
from .grid import Mesh, TimeGrid
from .norms import inner_interior, norm_inf, norm_l2, seminorm_h1
from .problems import CATALOG, IncompatibleDataError, get_problem
from .scheme import BRFD, MBRFD, BRFDSuboptimalInit, CrankNicolsonNewton, NewtonConvergenceError, run
from .trisolve import SingularSystemError

SCHEMA_VERSION = 1
VARIANTS = ("brfd", "mbrfd", "brfd_suboptimal", "cn_newton")
STUDY_COLUMNS = (
    "level", "J", "N", "h", "tau", "err_traj_h1", "err_half_h1", "err_phi_h1",
    "err_l2", "err_inf", "condition_margin",
)

# JSON Schema of the study report (draft 2020-12).
REPORT_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "config", "levels", "fitted_orders", "guards"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "config": {"type": "object"},
        "levels": {
            "type": "array",
            "items": {
                "type": "object",
                "required": list(STUDY_COLUMNS),
                "properties": {c: {"type": ["number", "null"]} for c in STUDY_COLUMNS},
            },
        },
        "fitted_orders": {
            "type": "object",
            "required": ["traj_h1", "half_h1", "phi_h1"],
            "properties": {k: {"type": ["number", "null"]} for k in ("traj_h1", "half_h1", "phi_h1")},
        },
        "guards": {
            "type": "object",
            "required": ["at_floor", "pre_asymptotic"],
            "properties": {"at_floor": {"type": "object"}, "pre_asymptotic": {"type": "object"}},
        },
        "coincidence": {"type": ["object", "null"]},
    },
}


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        self.field = field_name
        flag = _FLAG_NAMES.get(field_name)
        where = f"'{field_name}' (--{flag})" if flag else f"'{field_name}'"
        super().__init__(f"invalid config field {where}: {message}")


@dataclass
class StudyConfig:
    problem: str = "mms_exp_sine_gsin"
    k: int = 1
    x_a: float = 0.0
    x_b: float = 1.0
    T: float = 1.0
    J0: int = 19
    N0: int = 20
    levels: int = 4
    coupling: str = "proportional"
    variant: str = "brfd"
    delta: Optional[float] = None
    newton_tol: float = 1e-12
    newton_max_iter: int = 25
    record_stride: int = 1
    jobs: int = 1
    out_csv: Optional[str] = None
    out_json: Optional[str] = None

    def validate(self):
        if not isinstance(self.problem, str):
            raise ConfigError("problem", "must be a catalog name")
        try:
            get_problem(self.problem, self.x_a, self.x_b, self.k)
        except (KeyError, ValueError) as exc:
            raise ConfigError("problem", str(exc)) from None
        for name in ("J0", "N0", "levels", "record_stride", "jobs", "newton_max_iter", "k"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(name, f"must be a positive integer, got {value!r}")
        if self.levels < 2:
            raise ConfigError("levels", "a study needs at least 2 levels")
        if not self.x_b > self.x_a:
            raise ConfigError("x_b", f"must exceed x_a={self.x_a}")
        if not self.T > 0:
            raise ConfigError("T", "must be positive")
        if self.coupling not in COUPLINGS:
            raise ConfigError("coupling", f"must be one of {', '.join(COUPLINGS)}")
        if self.variant not in VARIANTS:
            raise ConfigError("variant", f"must be one of {', '.join(VARIANTS)}")
        if self.variant == "mbrfd" and (self.delta is None or not self.delta > 0):
            raise ConfigError("delta", "mbrfd needs delta > 0")
        if not self.newton_tol > 0:
            raise ConfigError("newton_tol", "must be positive")

    def scheme_variant(self):
        if self.variant == "mbrfd":
            return MBRFD(float(self.delta))
        if self.variant == "brfd_suboptimal":
            return BRFDSuboptimalInit()
        if self.variant == "cn_newton":
            return CrankNicolsonNewton(self.newton_tol, self.newton_max_iter)
        return BRFD()

    def build_problem(self):
        return get_problem(self.problem, self.x_a, self.x_b, self.k)


_FLAG_FIELDS = {
    "problem": "problem", "k": "k", "x_a": "x_a", "x_b": "x_b", "T": "T", "J": "J0", "N": "N0",
    "levels": "levels", "tau_coupling": "coupling", "variant": "variant", "delta": "delta",
    "newton_tol": "newton_tol", "stride": "record_stride", "jobs": "jobs",
    "out_csv": "out_csv", "out_json": "out_json",
}


_FLAG_NAMES = {name: flag.replace("_", "-") for flag, name in _FLAG_FIELDS.items()}


def load_config(args) -> StudyConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError("config", str(exc)) from None
        if not isinstance(data, dict):
            raise ConfigError("config", "top level must be an object")
        known = {f.name for f in dataclasses.fields(StudyConfig)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(unknown[0], "unknown field")
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[name] = value
    cfg = StudyConfig(**data)
    cfg.validate()
    return cfg


# ------------------------------------------------------------- formatting

def fmt(x) -> str:
    """Round-trip float text (17 significant digits), locale independent."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _json_clean(obj):
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        obj = float(obj)
        return None if not math.isfinite(obj) else obj
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _write_json(path, payload):
    text = json.dumps(_json_clean(payload), indent=2, allow_nan=False)
    if path:
        Path(path).write_text(text + "\n")
    return text


# --------------------------------------------------------------- commands

def cmd_solve(cfg: StudyConfig) -> int:
    problem = cfg.build_problem()
    m, tg = Mesh(cfg.x_a, cfg.x_b, cfg.J0), TimeGrid(cfg.T, cfg.N0)
    start = time.perf_counter()
    traj = run(problem, m, tg, cfg.scheme_variant(), cfg.record_stride)
    wall = time.perf_counter() - start
    out_csv = cfg.out_csv or "solution.csv"
    x = m.nodes
    with open(out_csv, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "t", "x", "U"])
        for s in traj.states:
            t = tg.t(s.n)
            for xj, uj in zip(x, s.U.values):
                w.writerow([s.n, fmt(t), fmt(xj), fmt(uj)])
    U = traj.final.U
    summary = {
        "schema_version": SCHEMA_VERSION,
        "config": dataclasses.asdict(cfg),
        "backend": _backend.BACKEND,
        "final_time": tg.T,
        "final_norms": {"l2": norm_l2(U, m), "inf": norm_inf(U), "h1": seminorm_h1(U, m)},
        "condition_margin": traj.condition_margin,
        "condition_passed": traj.condition_passed,
        "wall_time_s": wall,
    }
    if problem.name.startswith("linear_heat_mode_"):
        mode = np.sin(cfg.k * np.pi * (x - cfg.x_a) / m.L)
        mode[0] = mode[-1] = 0.0
        summary["mode_amplitude"] = inner_interior(U, mode, m) / inner_interior(mode, mode, m)
    if problem.exact is not None and cfg.record_stride == 1:
        e = measure_errors(traj, problem)
        summary["errors"] = dataclasses.asdict(e)
    text = _write_json(cfg.out_json or "summary.json", summary)
    print(text)
    return 0


def format_table(report) -> str:
    cols = ("level", "J", "N", "h", "tau", "err_traj_h1", "err_half_h1", "err_phi_h1", "condition_margin")
    rows = [cols] + [
        tuple(str(getattr(lv, c)) if c in ("level", "J", "N") else f"{getattr(lv, c):.4e}" for c in cols)
        for lv in report.levels
    ]
    widths = [max(len(r[i]) for r in rows) for i in range(len(cols))]
    lines = ["  ".join(v.rjust(w) for v, w in zip(r, widths)) for r in rows]
    orders = "  ".join(
        f"{k}: {'n/a' if v.order is None else f'{v.order:.3f}'}" for k, v in report.orders.items()
    )
    return "\n".join(lines + ["fitted orders  " + orders])


def study_payload(cfg: StudyConfig, report) -> dict:
    body = report.to_dict()
    fitted = {k: body["fitted_orders"].get(k) for k in ("traj_h1", "half_h1", "phi_h1")}
    payload = {
        "schema_version": SCHEMA_VERSION,
        "config": dataclasses.asdict(cfg),
        "levels": body["levels"],
        "fitted_orders": fitted,
        "fits": body["fits"],
        "guards": body["guards"],
        "coincidence": None,
    }
    if report.coincidence is not None:
        payload["coincidence"] = {
            "delta": cfg.delta,
            "max_deviation_inf": report.coincidence,
            "identical_to_brfd": report.coincidence <= 1e-13,
        }
    return payload


def cmd_study(cfg: StudyConfig) -> int:
    problem = cfg.build_problem()
    plan = RefinementPlan(cfg.J0, cfg.N0, cfg.levels, cfg.coupling, cfg.x_a, cfg.x_b, cfg.T)
    report = refinement_study(problem, plan, cfg.scheme_variant(), jobs=cfg.jobs)
    with open(cfg.out_csv or "study.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(STUDY_COLUMNS)
        for lv in report.levels:
            w.writerow([fmt(getattr(lv, c)) for c in STUDY_COLUMNS])
    payload = study_payload(cfg, report)
    _write_json(cfg.out_json or "study.json", payload)
    print(format_table(report))
    if payload["coincidence"] is not None:
        c = payload["coincidence"]
        print(f"MBRFD(delta={c['delta']}) vs BRFD: max deviation {c['max_deviation_inf']:.3e}"
              f" -> {'identical' if c['identical_to_brfd'] else 'different'}")
    return 0


def cmd_verify(laplacian=None) -> int:
    from .verify import timed_battery

    kwargs = {} if laplacian is None else {"laplacian": laplacian}
    results, wall = timed_battery(**kwargs)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name.ljust(width)}  {r.detail}")
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} passed in {wall:.2f}s (backend: {_backend.BACKEND})")
    if failed:
        print(f"verify failed: {', '.join(failed)}", file=sys.stderr)
        return 1
    return 0


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="brfd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config file; flags override its fields")
        p.add_argument("--problem", help=f"catalog problem: {', '.join(CATALOG)}")
        p.add_argument("--k", type=int, help="mode number for linear_heat_mode_k")
        p.add_argument("--x-a", dest="x_a", type=float)
        p.add_argument("--x-b", dest="x_b", type=float)
        p.add_argument("--T", type=float, help="final time")
        p.add_argument("--J", type=int, help="interior nodes (coarsest level for study)")
        p.add_argument("--N", type=int, help="time steps (coarsest level for study)")
        p.add_argument("--variant", choices=VARIANTS)
        p.add_argument("--delta", type=float, help="mollifier parameter for mbrfd")
        p.add_argument("--newton-tol", dest="newton_tol", type=float)
        p.add_argument("--stride", type=int, help="record every n-th step")
        p.add_argument("--out-csv", dest="out_csv")
        p.add_argument("--out-json", dest="out_json")

    p_solve = sub.add_parser("solve", help="single run, CSV snapshots and JSON summary")
    common(p_solve)
    p_study = sub.add_parser("study", help="refinement study with fitted orders")
    common(p_study)
    p_study.add_argument("--levels", type=int)
    p_study.add_argument("--tau-coupling", dest="tau_coupling", choices=COUPLINGS)
    p_study.add_argument("--jobs", type=int, help="levels run concurrently")
    sub.add_parser("verify", help="run the invariant battery")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        return cmd_verify()
    try:
        cfg = load_config(args)
    except (ConfigError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "solve":
            return cmd_solve(cfg)
        return cmd_study(cfg)
    except IncompatibleDataError as exc:
        print(f"error: invalid config field 'problem': {exc}", file=sys.stderr)
        return 2
    except (SingularSystemError, NewtonConvergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
