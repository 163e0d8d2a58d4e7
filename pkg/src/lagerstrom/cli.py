"""Command-line front end: solve, ie, asym, sweep, verify, identities.

Emits machine-readable tables (CSV with 17 significant digits, or JSON) for
plotting and regression; identical invocations produce byte-identical files.
Exit codes: 0 success, 1 solver error, 2 flag error, 3 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import asymptotics, integral_eq, verify
from .asymptotics import CaseId
from .errors import (AccuracyError, BracketFailureError, DomainError,
                     FitError, IntegrationFailureError, NonConvergenceError,
                     ResolutionFailureError, UnsupportedParameterError)
from .integral_eq import KIND_U_MINUS_ONE, PicardConfig
from .ode_shoot import (ConstantK, GeneralF, ModelParams, ShootingConfig,
                        extract_C, shoot)

_SOLVER_ERRORS = (AccuracyError, BracketFailureError, IntegrationFailureError,
                  NonConvergenceError, ResolutionFailureError, FitError)


@dataclass
class RunConfig:
    command: str
    n: Optional[float] = None
    k: Optional[float] = None
    f_table: Optional[str] = None
    eps: Optional[float] = None
    eps_grid: list = field(default_factory=list)
    case: Optional[tuple] = None
    tol: Optional[float] = None
    order: int = 3
    grid: Optional[tuple] = None
    grid_variable: str = "r"
    out: Optional[str] = None
    format: str = "csv"


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def _emit(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _table_text(columns: dict, summary: dict, fmt: str) -> str:
    if fmt == "json":
        payload = {"summary": summary,
                   "columns": {k: [float(x) for x in v]
                               for k, v in columns.items()}}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    for key in sorted(summary):
        buf.write(f"# {key}={_fmt(summary[key])}\n")
    writer = csv.writer(buf, lineterminator="\n")
    names = list(columns)
    writer.writerow(names)
    for row in zip(*columns.values()):
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _report_text(report: verify.Report, fmt: str) -> str:
    return report.to_json() if fmt == "json" else report.to_csv()


def _load_f_table(path: str):
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise DomainError(f"f-table line not two columns: {line!r}")
            rows.append((float(parts[0]), float(parts[1])))
    if len(rows) < 2:
        raise DomainError("f-table needs at least two (u, f(u)) samples")
    rows.sort()
    us = np.array([r[0] for r in rows])
    fs = np.array([r[1] for r in rows])
    if us[0] > 0.0 or us[-1] < 1.0:
        raise DomainError("f-table samples must cover [0, 1]")
    interp = PchipInterpolator(us, fs)
    return GeneralF(f=lambda u: float(interp(np.clip(u, us[0], us[-1]))))


def _params_from(cfg: RunConfig) -> ModelParams:
    if cfg.n is None or cfg.eps is None:
        raise DomainError("--n and --eps are required")
    if cfg.f_table is not None:
        if cfg.k is not None:
            raise DomainError("--k and --f-table are mutually exclusive")
        nonlinearity = _load_f_table(cfg.f_table)
    else:
        nonlinearity = ConstantK(cfg.k if cfg.k is not None else 0.0)
    return ModelParams(n=cfg.n, eps=cfg.eps, nonlinearity=nonlinearity)


def _cmd_solve(cfg: RunConfig) -> int:
    params = _params_from(cfg)
    scfg = ShootingConfig(root_tol=cfg.tol or 1e-8)
    c_star, prof = shoot(params, scfg)
    C = extract_C((c_star, prof), params,
                  bvp_tol=max(1e-6, 10.0 * scfg.root_tol))
    columns = {"r": prof.r_grid, "u": prof.u, "u_prime": prof.u_prime,
               "w": prof.w}
    summary = {"c_star": c_star, "C": C, "u_inf": prof.u_inf,
               "u_inf_bound": prof.u_inf_bound}
    _emit(_table_text(columns, summary, cfg.format), cfg.out)
    return 0


def _cmd_ie(cfg: RunConfig) -> int:
    params = _params_from(cfg)
    pcfg = PicardConfig()
    if cfg.tol is not None:
        pcfg = PicardConfig(tol=cfg.tol * 1e-2, boundary_tol=cfg.tol)
    C, profile, diags = integral_eq.solve_C(params, pcfg)
    value_name = "v" if profile.kind == KIND_U_MINUS_ONE else "g"
    columns = {"rho": profile.rho_grid, value_name: profile.values,
               "u": profile.u(params)}
    summary = {"C": C, "Phi": diags.phi, "iterations": diags.iterations,
               "final_residual": diags.final_residual}
    _emit(_table_text(columns, summary, cfg.format), cfg.out)
    return 0


def _cmd_asym(cfg: RunConfig) -> int:
    if cfg.case is None:
        raise DomainError("--case n,k is required")
    if cfg.eps is None:
        raise DomainError("--eps is required")
    case = CaseId(*cfg.case)
    lo, hi, count = cfg.grid if cfg.grid is not None else (1.0, 10.0, 101)
    grid = np.geomspace(lo, hi, count) if lo > 0 else np.linspace(lo, hi, count)
    if cfg.grid_variable == "r":
        order = min(cfg.order, asymptotics.INNER_MAX_ORDER[(case.n, case.k)])
        values = asymptotics.inner_u(case, cfg.eps, grid, order)
        columns = {"r": grid, "u_inner": np.atleast_1d(values)}
    else:
        order = min(cfg.order, 2)
        values = asymptotics.outer_u(case, cfg.eps, grid, order)
        columns = {"rho": grid, "u_outer": np.atleast_1d(values)}
    summary = {"C_series": asymptotics.c_asym(case, cfg.eps, 3),
               "eps": cfg.eps, "order": order}
    _emit(_table_text(columns, summary, cfg.format), cfg.out)
    return 0


def _sweep_one(case: CaseId, eps: float, tol: float) -> dict:
    params = ModelParams(n=float(case.n), eps=eps,
                         nonlinearity=ConstantK(float(case.k)))
    c_star, prof = shoot(params, ShootingConfig(root_tol=tol))
    C_shoot = extract_C((c_star, prof), params, bvp_tol=max(1e-6, 10.0 * tol))
    C_picard, _, diags = integral_eq.solve_C(params)
    try:
        C_series = asymptotics.c_asym(case, eps, 3)
    except DomainError:
        C_series = math.nan
    return {"eps": eps, "c_star": c_star, "C": C_shoot,
            "C_picard": C_picard, "C_series": C_series, "Phi": diags.phi}


def _cmd_sweep(cfg: RunConfig) -> int:
    if cfg.case is None:
        raise DomainError("--case n,k is required")
    if not cfg.eps_grid:
        raise DomainError("--eps-grid is required")
    case = CaseId(*cfg.case)
    tol = cfg.tol or 1e-8
    with ThreadPoolExecutor(max_workers=min(4, len(cfg.eps_grid))) as pool:
        rows = list(pool.map(lambda e: _sweep_one(case, e, tol),
                             cfg.eps_grid))
    columns = {key: np.array([row[key] for row in rows])
               for key in ("eps", "c_star", "C", "C_picard", "C_series",
                           "Phi")}
    _emit(_table_text(columns, {"case": f"{case.n},{case.k}"}, cfg.format),
          cfg.out)
    return 0


def _cmd_identities(cfg: RunConfig) -> int:
    report = verify.identity_suite(cfg.tol or 1e-8)
    _emit(_report_text(report, cfg.format), cfg.out)
    return 0 if report.all_passed() else 3


def _cmd_verify(cfg: RunConfig) -> int:
    if cfg.case is None:
        raise DomainError("--case n,k is required")
    case = CaseId(*cfg.case)
    eps_list = cfg.eps_grid or [0.05, 0.1]
    tol = cfg.tol or 1e-6
    report = verify.Report(metadata={"suite": "cross_solver",
                                     "case": f"{case.n},{case.k}",
                                     "eps": list(eps_list), "tol": tol,
                                     "timestamp": None})
    params_list = []
    for eps in eps_list:
        params = ModelParams(n=float(case.n), eps=eps,
                             nonlinearity=ConstantK(float(case.k)))
        params_list.append(params)
        c_star, prof = shoot(params)
        _, rescaled, _ = integral_eq.solve_C(params)
        r_ie, u_ie = integral_eq.as_radial(rescaled, params)
        metrics = verify.compare_profiles(
            (r_ie, u_ie), prof, (1.0, 5.0 / eps))
        report.add(f"cross_solver_sup_norm[eps={eps}]", metrics.sup_norm,
                   0.0, tol, inequality="le")
    mono = verify.monotonicity_suite(params_list)
    report.checks.extend(mono.checks)
    _emit(_report_text(report, cfg.format), cfg.out)
    return 0 if report.all_passed() else 3


_COMMANDS = {
    "solve": _cmd_solve,
    "ie": _cmd_ie,
    "asym": _cmd_asym,
    "sweep": _cmd_sweep,
    "verify": _cmd_verify,
    "identities": _cmd_identities,
}


def _parse_case(text: str) -> tuple:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected --case n,k")
    return int(parts[0]), int(parts[1])


def _parse_grid(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected --grid lo:hi:count")
    lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    if count < 2 or hi <= lo:
        raise argparse.ArgumentTypeError("grid needs hi > lo and count >= 2")
    return lo, hi, count


def _parse_eps_grid(text: str) -> list:
    return [float(x) for x in text.split(",") if x]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lagerstrom",
        description="Boundary-value laboratory: shooting, integral-equation "
                    "iteration, and asymptotic expansions, cross-verified.")
    sub = parser.add_subparsers(dest="command", required=True)
    specs = {
        "solve": "solve the BVP by shooting; emit the profile table",
        "ie": "solve via the integral equation; emit the rescaled profile",
        "asym": "evaluate closed-form expansions on a grid",
        "sweep": "per-eps summary rows over an eps grid",
        "verify": "cross-solver and property checks; nonzero exit on failure",
        "identities": "closed-form identity suite against quadrature",
    }
    for name, help_text in specs.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--n", type=float, help="dimension-like exponent n >= 1")
        p.add_argument("--k", type=float,
                       help="constant quadratic-slope coefficient f(u) = k")
        p.add_argument("--f-table", dest="f_table",
                       help="two-column CSV of (u, f(u)) samples on [0, 1]")
        p.add_argument("--eps", type=float, help="perturbation parameter")
        p.add_argument("--eps-grid", dest="eps_grid", type=_parse_eps_grid,
                       default=[], help="comma-separated eps values")
        p.add_argument("--case", type=_parse_case,
                       help="closed-form case n,k (2,0 | 3,0 | 2,1)")
        p.add_argument("--tol", type=float, help="primary tolerance")
        p.add_argument("--order", type=int, default=3,
                       help="expansion truncation order")
        p.add_argument("--grid", type=_parse_grid,
                       help="evaluation grid lo:hi:count (geometric)")
        p.add_argument("--grid-variable", dest="grid_variable",
                       choices=("r", "rho"), default="r",
                       help="asym: r gives the inner expansion, rho the outer")
        p.add_argument("--out", help="output file (stdout if omitted)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    cfg = RunConfig(command=args.command, n=args.n, k=args.k,
                    f_table=args.f_table, eps=args.eps,
                    eps_grid=args.eps_grid, case=args.case, tol=args.tol,
                    order=args.order, grid=args.grid,
                    grid_variable=args.grid_variable, out=args.out,
                    format=args.format)
    if cfg.tol is not None and not cfg.tol > 0.0:
        print("error: --tol must be positive", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[cfg.command](cfg)
    except (DomainError, UnsupportedParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except _SOLVER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
