"""Cross-validation harness: identity suite, solver-vs-solver comparison,
empirical convergence orders, monotonicity/property suites, and coefficient
fitting from numerics.  Everything here is deterministic: fixed grids, no
randomness, so reports reproduce bit-for-bit for identical configuration."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import PchipInterpolator

from . import asymptotics, integral_eq, specfun
from .asymptotics import OUTER_L1_COEFF, OUTER_L1_COEFF_HINCH, CaseId
from .errors import DomainError, FitError
from .ode_shoot import (ModelParams, ShootingConfig, SolutionProfile,
                        nonlinearity_ops, shoot)

__all__ = [
    "CheckResult",
    "Report",
    "ErrorMetrics",
    "identity_suite",
    "compare_profiles",
    "order_estimate",
    "monotonicity_suite",
    "coefficient_fit",
    "first_integral_drift",
    "fit_outer_l1_correction",
    "hinch_adjudication",
]


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass
class CheckResult:
    name: str
    measured: float
    reference: float
    tolerance: float
    passed: bool


@dataclass
class Report:
    """Named check results plus the configuration that produced them."""

    checks: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def add(self, name: str, measured: float, reference: float,
            tolerance: float, inequality: Optional[str] = None) -> CheckResult:
        """Append a check.  Default form is |measured - reference| <= tolerance;
        inequality "le"/"ge" declares one-sided forms
        measured <= reference + tolerance (resp. >= reference - tolerance)."""
        if inequality == "le":
            passed = measured <= reference + tolerance
        elif inequality == "ge":
            passed = measured >= reference - tolerance
        else:
            passed = abs(measured - reference) <= tolerance
        check = CheckResult(name, float(measured), float(reference),
                            float(tolerance), bool(passed))
        self.checks.append(check)
        return check

    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if not c.passed]

    def to_json(self) -> str:
        payload = {
            "metadata": self.metadata,
            "checks": [
                {"name": c.name,
                 "measured": c.measured,
                 "reference": c.reference,
                 "tolerance": c.tolerance,
                 "passed": c.passed}
                for c in self.checks
            ],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["name", "measured", "reference", "tolerance", "passed"])
        for c in self.checks:
            writer.writerow([c.name, _fmt(c.measured), _fmt(c.reference),
                             _fmt(c.tolerance), c.passed])
        return buf.getvalue()


@dataclass
class ErrorMetrics:
    sup_norm: float
    l2_norm: float
    location_of_max: float


def _as_xy(profile):
    if isinstance(profile, SolutionProfile):
        return np.asarray(profile.r_grid), np.asarray(profile.u)
    x, y = profile
    return np.asarray(x, dtype=float), np.asarray(y, dtype=float)


def compare_profiles(a, b, domain) -> ErrorMetrics:
    """Norms of the difference between two profiles over `domain`.

    Profiles are SolutionProfile objects or (grid, values) pairs in the same
    x-variable.  b is interpolated onto a's grid by monotone cubic
    interpolation (overshoot-free, so sup-norms stay honest).
    """
    lo, hi = float(domain[0]), float(domain[1])
    ax, ay = _as_xy(a)
    bx, by = _as_xy(b)
    if lo >= hi:
        raise DomainError("domain must be a nonempty interval")
    for x, who in ((ax, "first"), (bx, "second")):
        if x[0] > lo or x[-1] < hi:
            raise DomainError(
                f"{who} profile covers [{x[0]:.6g}, {x[-1]:.6g}], not "
                f"[{lo:.6g}, {hi:.6g}]")
    mask = (ax >= lo) & (ax <= hi)
    if mask.sum() < 2:
        raise DomainError("fewer than two grid points of the first profile "
                          "fall inside the domain")
    x = ax[mask]
    diff = ay[mask] - PchipInterpolator(bx, by)(x)
    i_max = int(np.argmax(np.abs(diff)))
    sup = float(np.abs(diff[i_max]))
    l2 = float(math.sqrt(np.trapezoid(diff * diff, x)))
    return ErrorMetrics(sup_norm=sup, l2_norm=l2,
                        location_of_max=float(x[i_max]))


def order_estimate(samples: Sequence) -> float:
    """Least-squares slope of log err against log h.

    `samples` is a sequence of (h, err) with h strictly decreasing and
    err > 0; at least three samples are required.
    """
    if len(samples) < 3:
        raise FitError("order estimation needs at least 3 samples")
    h = np.array([s[0] for s in samples], dtype=float)
    err = np.array([s[1] for s in samples], dtype=float)
    if not (np.all(np.diff(h) < 0.0) and np.all(h > 0.0)):
        raise FitError("h must be positive and strictly decreasing")
    if not np.all(err > 0.0):
        raise FitError("errors must be positive")
    slope = np.polyfit(np.log(h), np.log(err), 1)[0]
    return float(slope)


def identity_suite(tol: float) -> Report:
    """Closed-form identities of the E-family against the quadrature oracle."""
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    report = Report(metadata={"suite": "identities", "tol": tol,
                              "timestamp": None})
    qtol = min(tol * 1e-2, 1e-10)

    for q in (1.0, 2.0, 2.5):
        for rho in (0.01, 0.1, 0.5, 1.0, 5.0):
            closed = specfun.integral_of_E(q, rho)
            quad = specfun.quad_adaptive(
                lambda t, q=q: specfun.exp_integral(q, t), rho, math.inf,
                qtol).value
            report.add(f"integral_of_E_vs_quadrature[q={q},rho={rho}]",
                       quad, closed, tol)

    for rho in (0.05, 0.2, 1.0, 3.0, 8.0):
        lhs = specfun.exp_integral(2.0, rho)
        rhs = math.exp(-rho) / rho - specfun.exp_integral(1.0, rho)
        report.add(f"E2_reduction_to_E1[rho={rho}]", lhs, rhs, tol)

    # second series term, closed form 2 E1(2 rho) - e^-rho E1(rho) versus
    # the nested quadrature it reduces
    for rho in (0.1, 0.5, 1.0):
        closed = (2.0 * specfun.exp_integral(1.0, 2.0 * rho)
                  - math.exp(-rho) * specfun.exp_integral(1.0, rho))

        def outer(t):
            inner = -specfun.integral_of_E(1.0, t)  # int_inf^t E_1
            return math.exp(-t) / t * inner

        nested = -specfun.quad_adaptive(outer, rho, math.inf, qtol).value
        report.add(f"second_series_term_closed_vs_nested[rho={rho}]",
                   nested, closed, tol)

    report.add("integral_exp_times_E1",
               specfun.quad_adaptive(
                   lambda t: math.exp(-t) * specfun.exp_integral(1.0, t),
                   0.0, math.inf, qtol).value,
               math.log(2.0), tol)
    report.add("integral_E1_double_argument",
               specfun.quad_adaptive(
                   lambda t: specfun.exp_integral(1.0, 2.0 * t),
                   0.0, math.inf, qtol).value,
               0.5, tol)
    report.add("integral_E1_squared",
               specfun.quad_adaptive(
                   lambda t: specfun.exp_integral(1.0, t) ** 2,
                   0.0, math.inf, qtol).value,
               2.0 * math.log(2.0), tol)
    report.add("euler_gamma_defining_integral",
               -specfun.quad_adaptive(
                   lambda t: math.exp(-t) * math.log(t),
                   0.0, math.inf, qtol).value,
               specfun.euler_gamma(), tol)
    return report


def first_integral_drift(params: ModelParams, c: float, r_max: float,
                         tol: float) -> float:
    """Genuine conservation check: integrate the raw second-order equation
    (which does not know the first integral) and measure the relative drift
    of r^(n-1) u' e^(F(u) + eps w) - c along it.

    The slope is carried as z = log u' so it stays relatively accurate while
    decaying exponentially; the invariant would otherwise amplify absolute
    slope noise by e^(eps w) in the tail.
    """
    n, eps = params.n, params.eps
    ops = nonlinearity_ops(params)

    def rhs(r, y):
        u, z, w = y
        v = math.exp(z)
        return (v,
                -(n - 1.0) / r - eps * u - _f_at(params, u) * v,
                u)

    sol = solve_ivp(rhs, (1.0, r_max), [0.0, math.log(c), 0.0],
                    method="DOP853", rtol=tol, atol=tol * 1e-3)
    if not sol.success:
        raise DomainError(f"raw integration failed: {sol.message}")
    r = sol.t
    u, z, w = sol.y
    Fu = np.asarray(ops.F(u))
    log_invariant = (n - 1.0) * np.log(r) + z + Fu + eps * w
    return float(np.max(np.abs(np.expm1(log_invariant - math.log(c)))))


def _f_at(params: ModelParams, u: float) -> float:
    nl = params.nonlinearity
    if hasattr(nl, "k"):
        return nl.k
    return float(nl.f(min(u, 1.0)))


def monotonicity_suite(params_list: Sequence, cfg: ShootingConfig = None,
                       c_grid_factors=(0.25, 0.5, 1.0, 2.0, 4.0)) -> Report:
    """Per-solution structure checks plus pairwise eps-comparison.

    For each params: u nondecreasing (strict where u is not yet converged),
    the a-priori bound u <= sqrt(2c/eps), first-integral drift of the raw
    equation, and monotonicity of u(inf) in the shooting slope.  Parameter
    sets sharing (n, nonlinearity) are compared pairwise in the rescaled
    variable sigma = eps r.
    """
    if cfg is None:
        cfg = ShootingConfig()
    report = Report(metadata={"suite": "monotonicity",
                              "params": [
                                  {"n": p.n, "eps": p.eps,
                                   "nonlinearity": repr(p.nonlinearity)}
                                  for p in params_list],
                              "timestamp": None})
    solutions = []
    for p in params_list:
        tag = f"n={p.n},eps={p.eps}"
        c_star, prof = shoot(p, cfg)
        solutions.append((p, c_star, prof))
        du = np.diff(prof.u)
        report.add(f"u_nondecreasing[{tag}]", float(du.min()), 0.0, 1e-15,
                   inequality="ge")
        live = np.nonzero(1.0 - prof.u[:-1] > 1e-10)[0]
        report.add(f"u_strictly_increasing_before_saturation[{tag}]",
                   float(du[live].min()) if live.size else 1.0, 0.0, 0.0,
                   inequality="ge")
        bound = math.sqrt(2.0 * c_star / p.eps)
        report.add(f"u_below_sqrt_2c_over_eps[{tag}]",
                   float(prof.u.max()), bound, 1e-9, inequality="le")
        drift = first_integral_drift(p, c_star, min(prof.r_grid[-1],
                                                    10.0 / p.eps),
                                     cfg.ivp_tol)
        report.add(f"first_integral_drift[{tag}]", drift,
                   0.0, 10.0 * cfg.ivp_tol, inequality="le")
        u_infs = []
        for fac in c_grid_factors:
            if fac == 1.0:
                u_infs.append(prof.u_inf)
            else:
                from .ode_shoot import integrate_ivp
                trial = integrate_ivp(p, fac * c_star, prof.r_grid[-1],
                                      cfg.ivp_tol)
                u_infs.append(trial.u_inf)
        report.add(f"u_inf_increasing_in_c[{tag}]",
                   float(np.diff(u_infs).min()), 0.0, 0.0, inequality="ge")

    for i in range(len(solutions)):
        for j in range(len(solutions)):
            p1, _, prof1 = solutions[i]
            p2, _, prof2 = solutions[j]
            if p1.eps >= p2.eps or p1.n != p2.n \
                    or p1.nonlinearity != p2.nonlinearity:
                continue
            sig_hi = min(prof1.r_grid[-1] * p1.eps,
                         prof2.r_grid[-1] * p2.eps)
            sigma = np.geomspace(p2.eps, min(sig_hi, 30.0), 200)
            u1 = PchipInterpolator(prof1.r_grid * p1.eps, prof1.u)(sigma)
            u2 = PchipInterpolator(prof2.r_grid * p2.eps, prof2.u)(sigma)
            report.add(
                f"u_larger_for_smaller_eps[n={p1.n},eps={p1.eps}"
                f"<eps={p2.eps}]",
                float(np.min(u1 - u2)), 0.0, 1e-9, inequality="ge")
    return report


_FIT_BASES = {"inverse_log": ("1/lambda", "1/lambda^2", "1/lambda^3"),
              "eps_series": ("1", "eps*log(eps)", "eps")}


def coefficient_fit(case: CaseId, eps_list: Sequence,
                    c_numeric_list: Sequence) -> np.ndarray:
    """Least-squares fit of the C(eps) expansion basis to numerical C values.

    Basis: (1/lambda, 1/lambda^2, 1/lambda^3) for the n = 2 cases,
    (1, eps log eps, eps) for (3, 0).  Returns the fitted coefficients in
    basis order, for comparison with `asymptotics.coefficients`.
    """
    eps_arr = np.asarray(eps_list, dtype=float)
    y = np.asarray(c_numeric_list, dtype=float)
    if eps_arr.size < 3:
        raise DomainError("need at least 3 eps values")
    if eps_arr.size != y.size:
        raise DomainError("eps_list and c_numeric_list lengths differ")
    kind = asymptotics.coefficients(case).lambda_kind
    # the inverse-log basis varies slowly in eps and needs a wide span to
    # stay conditioned; the eps-power basis is fine with one decade
    decades_needed = 100.0 if kind == "inverse_log" else 10.0
    if eps_arr.max() / eps_arr.min() < decades_needed * (1.0 - 1e-12):
        raise DomainError(
            f"eps values must span at least "
            f"{'two decades' if kind == 'inverse_log' else 'one decade'}")
    if kind == "eps_series":
        X = np.stack([np.ones_like(eps_arr), eps_arr * np.log(eps_arr),
                      eps_arr], axis=1)
    else:
        lam = np.log(1.0 / eps_arr)
        X = np.stack([1.0 / lam, 1.0 / lam ** 2, 1.0 / lam ** 3], axis=1)
    cond = np.linalg.cond(X)
    if not np.isfinite(cond) or cond > 1e12:
        raise FitError(f"expansion-basis fit is ill-conditioned "
                       f"(condition number {cond:.3e})")
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    return coef


def fit_outer_l1_correction(eps_list=(1e-3, 1e-4),
                            rho_window=(0.5, 5.0), samples: int = 60,
                            picard_cfg=None):
    """Fit the 1/l correction coefficient inside the leading bracket of the
    far-field expansion for the (2, 1) case against converged numerics.

    Returns (kappa_hat, standard_error).  The fit adjudicates between
    OUTER_L1_COEFF and OUTER_L1_COEFF_HINCH.
    """
    case = CaseId(2, 1)
    from .ode_shoot import ConstantK
    ys, bs = [], []
    for eps in eps_list:
        params = ModelParams(n=2, eps=eps, nonlinearity=ConstantK(1.0))
        _, profile, _ = integral_eq.solve_C(params, picard_cfg)
        rho = np.geomspace(rho_window[0], rho_window[1], samples)
        u_num = PchipInterpolator(profile.rho_grid, profile.u(params))(rho)
        base = asymptotics.outer_u(case, eps, rho, 2, l1_correction=0.0)
        lam = math.log(1.0 / eps)
        E1 = np.array([specfun.exp_integral(1.0, x) for x in rho])
        basis = -(math.e - 1.0) / math.e * E1 / lam ** 2
        ys.append(u_num - base)
        bs.append(basis)
    y = np.concatenate(ys)
    b = np.concatenate(bs)
    denom = float(b @ b)
    if denom == 0.0:
        raise FitError("degenerate basis in the correction fit")
    kappa = float(b @ y) / denom
    resid = y - kappa * b
    dof = max(y.size - 1, 1)
    stderr = math.sqrt(float(resid @ resid) / dof / denom)
    return kappa, stderr


def hinch_adjudication(eps: float = 1e-3, rho_window=(0.5, 5.0),
                       picard_cfg=None) -> dict:
    """Sup-norm comparison of the two candidate 1/l correction coefficients
    for the (2, 1) far-field expansion against converged numerics."""
    from .ode_shoot import ConstantK
    case = CaseId(2, 1)
    params = ModelParams(n=2, eps=eps, nonlinearity=ConstantK(1.0))
    _, profile, _ = integral_eq.solve_C(params, picard_cfg)
    rho = profile.rho_grid
    mask = (rho >= rho_window[0]) & (rho <= rho_window[1])
    u_num = profile.u(params)[mask]
    u_ours = asymptotics.outer_u(case, eps, rho[mask], 2)
    u_hinch = asymptotics.outer_u(case, eps, rho[mask], 2,
                                  l1_correction=OUTER_L1_COEFF_HINCH)
    sup_ours = float(np.max(np.abs(u_num - u_ours)))
    sup_hinch = float(np.max(np.abs(u_num - u_hinch)))
    return {"sup_norm": sup_ours,
            "sup_norm_hinch_variant": sup_hinch,
            "margin": sup_hinch / sup_ours,
            "coefficient": OUTER_L1_COEFF,
            "coefficient_hinch_variant": OUTER_L1_COEFF_HINCH}
