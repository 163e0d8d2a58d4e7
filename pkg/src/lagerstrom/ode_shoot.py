"""Shooting solver for the boundary-value problem

    u'' + (n-1)/r u' + eps u u' + f(u) u'^2 = 0,   u(1) = 0, u(inf) = 1.

The initial-value problem with slope u'(1) = c is integrated in the exactly
reduced first-order form obtained from the first integral

    r^(n-1) u'(r) e^(F(u) + eps w) = c,     F(u) = int_0^u f,  w = int_1^r u,

i.e.  u' = c r^(1-n) exp(-F(u) - eps w),  w' = u.  This eliminates the
second-order equation, makes u automatically increasing, and keeps the
conserved quantity available as an accuracy check.  u(inf) is estimated by a
closed-form tail model with a certified crude bound, and the boundary value
u(inf) = 1 is enforced by bracketing + bisection/secant on c.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np
from scipy.integrate import cumulative_simpson, solve_ivp
from scipy.interpolate import CubicSpline, PchipInterpolator

from . import specfun
from .errors import (BracketFailureError, DomainError, IntegrationFailureError,
                     ResolutionFailureError)

__all__ = [
    "ConstantK",
    "GeneralF",
    "ModelParams",
    "SolutionProfile",
    "ShootingConfig",
    "integrate_ivp",
    "tail_u_infinity",
    "shoot",
    "extract_C",
    "profile_grid",
]


@dataclass(frozen=True)
class ConstantK:
    """Quadratic-slope coefficient f(u) = k (k = 0 drops the u'^2 term)."""

    k: float = 0.0


@dataclass(frozen=True)
class GeneralF:
    """General positive continuous coefficient f(u) on [0, 1].

    Beyond u = 1 the coefficient is extended as the constant f(1); the
    boundary-value solution itself stays in [0, 1), the extension only
    matters for overshooting trial slopes during bracketing.
    """

    f: Callable[[float], float]


Nonlinearity = Union[ConstantK, GeneralF]


@dataclass(frozen=True)
class ModelParams:
    """Problem instance: exponent n >= 1, perturbation eps > 0, nonlinearity.

    Extremely small eps (below ~1e-8) is allowed and gets no special
    casing; be aware that for n = 2 the solution quantities drift only
    like 1/log(1/eps), so runs at such eps converge very slowly toward
    their limits.
    """

    n: float
    eps: float
    nonlinearity: Nonlinearity = ConstantK(0.0)

    def __post_init__(self):
        if not self.n >= 1.0:
            raise DomainError(f"n >= 1 required, got {self.n}")
        if not self.eps > 0.0:
            raise DomainError(f"eps > 0 required, got {self.eps}")
        if isinstance(self.nonlinearity, ConstantK):
            if not self.nonlinearity.k >= 0.0:
                raise DomainError(f"k >= 0 required, got {self.nonlinearity.k}")
        elif isinstance(self.nonlinearity, GeneralF):
            sample = np.linspace(0.0, 1.0, 101)
            vals = np.array([self.nonlinearity.f(u) for u in sample], dtype=float)
            if not np.all(vals > 0.0):
                raise DomainError("GeneralF requires f(u) > 0 on [0, 1] "
                                  "(violated on the sample grid)")
        else:
            raise DomainError(f"unknown nonlinearity {self.nonlinearity!r}")


class NonlinearityOps:
    """Callable forms of F = int_0^u f, G = int_0^u e^F, and G^-1.

    ConstantK is closed form; GeneralF is tabulated on [0, 1] (Simpson
    cumulative integrals on a fine grid, cubic interpolation) with the
    analytic constant-f extension for u > 1.
    """

    def __init__(self, nonlinearity: Nonlinearity):
        self.nonlinearity = nonlinearity
        if isinstance(nonlinearity, ConstantK):
            self.k = float(nonlinearity.k)
            self._tabulated = False
        else:
            self._tabulated = True
            grid = np.linspace(0.0, 1.0, 4001)
            fvals = np.array([nonlinearity.f(u) for u in grid], dtype=float)
            Fvals = np.concatenate(
                ([0.0], cumulative_simpson(fvals, x=grid)))
            Gvals = np.concatenate(
                ([0.0], cumulative_simpson(np.exp(Fvals), x=grid)))
            self._f_spline = CubicSpline(grid, fvals)
            self._F_spline = CubicSpline(grid, Fvals)
            self._G_spline = CubicSpline(grid, Gvals)
            self._u_of_G = PchipInterpolator(Gvals, grid)
            self._f1 = float(fvals[-1])
            self._F1 = float(Fvals[-1])
            self._G1 = float(Gvals[-1])

    def F(self, u):
        if not self._tabulated:
            return self.k * u
        u = np.asarray(u, dtype=float)
        inside = self._F_spline(np.clip(u, 0.0, 1.0))
        out = np.where(u > 1.0, self._F1 + self._f1 * (u - 1.0), inside)
        return float(out) if out.ndim == 0 else out

    def G(self, u):
        if not self._tabulated:
            if self.k == 0.0:
                return u
            return np.expm1(self.k * np.asarray(u, dtype=float)) / self.k
        u = np.asarray(u, dtype=float)
        inside = self._G_spline(np.clip(u, 0.0, 1.0))
        eF1 = math.exp(self._F1)
        out = np.where(u > 1.0,
                       self._G1 + eF1 * np.expm1(self._f1 * (u - 1.0)) / self._f1,
                       inside)
        return float(out) if out.ndim == 0 else out

    @property
    def G1(self) -> float:
        return float(self.G(1.0))

    @property
    def F1(self) -> float:
        return float(self.F(1.0))

    def G_inverse(self, g):
        if not self._tabulated:
            if self.k == 0.0:
                return g
            return np.log1p(self.k * np.asarray(g, dtype=float)) / self.k
        g = np.asarray(g, dtype=float)
        inside = self._u_of_G(np.clip(g, 0.0, self._G1))
        out = np.where(
            g > self._G1,
            1.0 + np.log1p(self._f1 * (g - self._G1) * math.exp(-self._F1)) / self._f1,
            inside)
        return float(out) if out.ndim == 0 else out


_OPS_CACHE: dict = {}


def nonlinearity_ops(params: ModelParams) -> NonlinearityOps:
    ops = _OPS_CACHE.get(params.nonlinearity)
    if ops is None:
        ops = NonlinearityOps(params.nonlinearity)
        _OPS_CACHE[params.nonlinearity] = ops
    return ops


@dataclass
class SolutionProfile:
    """IVP/BVP solution on an r-grid starting at 1.

    w is the running integral of u from 1; u_inf is the tail-corrected
    estimate of u(inf) with the certified crude bound u_inf_bound, so that
    |u(inf) - u_inf| <= u_inf_bound.
    """

    r_grid: np.ndarray
    u: np.ndarray
    w: np.ndarray
    u_prime: np.ndarray
    c: float
    u_inf: float
    u_inf_bound: float


def profile_grid(r_max: float, points_per_decade: int = 400,
                 layer_points_per_decade: int = 4000) -> np.ndarray:
    """Geometric r-grid on [1, r_max], denser over the first decade where
    the solution still curves on the O(1) scale."""
    if not r_max > 1.0:
        raise DomainError("r_max must exceed 1")
    split = min(10.0, r_max)
    decades_head = math.log10(split)
    head = np.geomspace(1.0, split,
                        max(int(decades_head * layer_points_per_decade), 8))
    if r_max <= 10.0:
        return head
    decades_tail = math.log10(r_max / split)
    tail = np.geomspace(split, r_max,
                        max(int(decades_tail * points_per_decade), 8))
    return np.concatenate([head, tail[1:]])


def _segment_bounds(r_max: float) -> list:
    bounds = [1.0]
    r = 1.0
    while r < r_max:
        r = min(r * 2.0, r_max)
        bounds.append(r)
    return bounds


def _make_rhs(params: ModelParams, ops: NonlinearityOps, c: float):
    n, eps = params.n, params.eps
    if isinstance(params.nonlinearity, ConstantK):
        k = params.nonlinearity.k

        def rhs(r, y):
            u, w = y
            return (c * r ** (1.0 - n) * math.exp(-k * u - eps * w), u)
    else:
        F = ops.F

        def rhs(r, y):
            u, w = y
            return (c * r ** (1.0 - n) * math.exp(-float(F(u)) - eps * w), u)
    return rhs


def _integrate_segments(params: ModelParams, c: float, r_max: float,
                        tol: float, r_eval=None, record_at=()):
    """Segmented RK45 integration of the reduced system from r = 1.

    Segments double geometrically so the step cap min(0.1 r, 1/eps) can
    follow r.  Returns (u, w arrays on r_eval or None, state at r_max,
    dict of recorded states at `record_at` radii).
    """
    if not c > 0.0:
        raise DomainError("shooting slope c must be positive")
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    ops = nonlinearity_ops(params)
    rhs = _make_rhs(params, ops, c)
    eps = params.eps
    bounds = _segment_bounds(r_max)
    record_at = sorted(set(record_at))
    recorded = {}
    y = np.array([0.0, 0.0])
    out_u, out_w = [], []
    if r_eval is not None:
        r_eval = np.asarray(r_eval, dtype=float)
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        max_step = min(0.1 * lo, 1.0 / eps)
        targets = [r for r in record_at if lo < r <= hi]
        want_eval = r_eval is not None and np.any((r_eval > lo) & (r_eval <= hi))
        dense = bool(targets) or bool(want_eval)
        sol = solve_ivp(rhs, (lo, hi), y, method="RK45", rtol=tol,
                        atol=tol * 1e-3, max_step=max_step, dense_output=dense)
        if not sol.success:
            raise IntegrationFailureError(
                f"integrator failed on [{lo}, {hi}]: {sol.message}")
        for r in targets:
            recorded[r] = sol.sol(r)
        if want_eval:
            mask = (r_eval > lo) & (r_eval <= hi)
            vals = sol.sol(r_eval[mask])
            out_u.append(vals[0])
            out_w.append(vals[1])
        y = sol.y[:, -1]
    if r_eval is not None:
        # segments cover (1, r_max]; the r = 1 grid point holds the initial data
        head = [np.array([0.0])] if r_eval[0] == 1.0 else []
        u = np.concatenate(head + out_u)
        w = np.concatenate(head + out_w)
    else:
        u = w = None
    return u, w, y, recorded


def integrate_ivp(params: ModelParams, c: float, r_max: float, tol: float,
                  r_eval=None) -> SolutionProfile:
    """Integrate the reduced IVP to r_max and return the profile.

    r_eval defaults to `profile_grid(r_max)`.  The tail estimate and its
    certified bound are filled in when the grid reaches r >= 2, otherwise
    u_inf is the endpoint value with an infinite bound.
    """
    if not r_max > 1.0:
        raise DomainError("r_max must exceed 1")
    if r_eval is None:
        r_eval = profile_grid(r_max)
    r_eval = np.asarray(r_eval, dtype=float)
    if r_eval[0] != 1.0 or np.any(np.diff(r_eval) <= 0.0):
        raise DomainError("r_eval must be strictly increasing and start at 1")
    u, w, y_end, _ = _integrate_segments(params, c, r_max, tol, r_eval=r_eval)
    ops = nonlinearity_ops(params)
    u_prime = c * r_eval ** (1.0 - params.n) * np.exp(
        -np.asarray(ops.F(u)) - params.eps * w)
    profile = SolutionProfile(r_grid=r_eval, u=u, w=w, u_prime=u_prime, c=c,
                              u_inf=float(u[-1]), u_inf_bound=math.inf)
    if r_eval[-1] >= 2.0:
        u_inf, bound = tail_u_infinity(profile, params)
        profile.u_inf = u_inf
        profile.u_inf_bound = bound
    return profile


def _int_s_power(n: float) -> float:
    # int_1^2 s^(1-n) ds
    if n == 2.0:
        return math.log(2.0)
    return (2.0 ** (2.0 - n) - 1.0) / (2.0 - n)


def _tail_estimate(params: ModelParams, ops: NonlinearityOps, c: float,
                   uR: float, wR: float, R: float) -> float:
    """Closed-form tail c int_R^inf s^(1-n) e^(-F(uR) - eps(wR + uR (s-R))) ds."""
    n, eps = params.n, params.eps
    beta = eps * uR
    if beta <= 0.0:
        return 0.0
    outer = -float(ops.F(uR)) - eps * wR
    if outer < -700.0:
        return 0.0
    scaled = specfun.exp_integral_scaled(n - 1.0, beta * R)
    return c * math.exp(outer) * beta ** (n - 2.0) * scaled


def _crude_bound(params: ModelParams, ops: NonlinearityOps, c: float,
                 u2: float, R: float) -> float:
    """Crude tail bound at R: algebraic branch for n > 2, exponential branch
    (valid for every n >= 1 since s^(1-n) <= 1) with rate
    m = min(p(c), u(2)) where p(c) = c e^(-eps - F(1)) int_1^2 s^(1-n) ds."""
    n, eps = params.n, params.eps
    candidates = []
    if n > 2.0:
        candidates.append(c / ((n - 2.0) * R ** (n - 2.0)))
    p_c = c * math.exp(-eps - ops.F1) * _int_s_power(n)
    m = min(p_c, u2) if u2 > 0.0 else p_c
    if m > 0.0:
        expo = -eps * (R - 2.0) * m
        candidates.append(c * math.exp(max(expo, -745.0)) / (eps * m))
    return min(candidates)


def tail_u_infinity(profile: SolutionProfile, params: ModelParams):
    """Tail-corrected u(inf) estimate and its certified crude bound.

    The estimate freezes u and w at the last grid point R and integrates the
    resulting closed-form model; because u is increasing, the model
    overestimates the true tail while the crude bound dominates both, so
    |u(inf) - u_inf| <= bound.
    """
    R = float(profile.r_grid[-1])
    if R < 2.0:
        raise DomainError("tail estimate requires the profile to reach r >= 2")
    ops = nonlinearity_ops(params)
    uR, wR = float(profile.u[-1]), float(profile.w[-1])
    c = profile.c
    T = _tail_estimate(params, ops, c, uR, wR, R)
    u2 = float(np.interp(2.0, profile.r_grid, profile.u))
    bound = _crude_bound(params, ops, c, u2, R)
    return uR + T, bound


@dataclass
class ShootingConfig:
    root_tol: float = 1e-8        # delta: |u(inf) - 1| <= delta at c*
    ivp_tol: float = 1e-10
    bracket_lo: float = 0.5
    bracket_hi: float = 2.0
    bracket_expand: float = 2.0
    bracket_budget: int = 60
    r_max_cap_factor: float = 1e4  # r_max capped at factor / eps
    max_root_iters: int = 200
    profile_points_per_decade: int = 400
    profile_layer_points_per_decade: int = 4000


def _plan_r_max(params: ModelParams, ops: NonlinearityOps, c: float,
                delta: float, cap: float) -> float:
    target = delta / 10.0
    n, eps = params.n, params.eps
    candidates = []
    if n > 2.0:
        candidates.append((c / ((n - 2.0) * target)) ** (1.0 / (n - 2.0)))
    m = min(c * math.exp(-eps - ops.F1) * _int_s_power(n), 1.0)
    if m > 0.0:
        candidates.append(2.0 + math.log(max(c / (eps * m * target), 2.0))
                          / (eps * m))
    R = min(candidates)
    return min(max(R, 4.0), cap)


class _Shot:
    """One endpoint integration at slope c: u_inf estimate plus tail data."""

    def __init__(self, params, ops, c, delta, ivp_tol, cap):
        self.c = c
        R = _plan_r_max(params, ops, c, delta, cap)
        while True:
            _, _, y_end, rec = _integrate_segments(
                params, c, R, ivp_tol, record_at=(2.0,))
            uR, wR = float(y_end[0]), float(y_end[1])
            u2 = float(rec[2.0][0])
            bound = _crude_bound(params, ops, c, u2, R)
            if bound <= delta / 10.0 or R >= cap:
                break
            R = min(R * 4.0, cap)
        if bound > delta / 10.0:
            raise ResolutionFailureError(
                f"tail bound {bound:.3e} exceeds {delta / 10.0:.3e} at the "
                f"r_max cap {cap:.3e} (c={c})")
        self.r_max = R
        self.u_inf = uR + _tail_estimate(params, ops, c, uR, wR, R)
        self.bound = bound
        self.g = self.u_inf - 1.0


def shoot(params: ModelParams, cfg: ShootingConfig = None):
    """Solve the BVP: find c* with |u(inf; c*) - 1| <= cfg.root_tol.

    u(inf; c) is strictly increasing in c, so a geometric expansion is
    guaranteed to bracket; bisection narrows the bracket to 1e-3 relative
    width and safeguarded secant finishes.  Returns (c_star, profile).
    """
    if cfg is None:
        cfg = ShootingConfig()
    ops = nonlinearity_ops(params)
    delta = cfg.root_tol
    cap = cfg.r_max_cap_factor / params.eps

    def make_shot(c):
        return _Shot(params, ops, c, delta, cfg.ivp_tol, cap)

    lo, hi = cfg.bracket_lo, cfg.bracket_hi
    shot_lo, shot_hi = make_shot(lo), make_shot(hi)
    budget = cfg.bracket_budget
    while shot_lo.g >= 0.0 and budget > 0:
        lo /= cfg.bracket_expand
        shot_lo = make_shot(lo)
        budget -= 1
    while shot_hi.g <= 0.0 and budget > 0:
        hi *= cfg.bracket_expand
        shot_hi = make_shot(hi)
        budget -= 1
    if shot_lo.g >= 0.0 or shot_hi.g <= 0.0:
        raise BracketFailureError(
            f"no bracket for u(inf) = 1 within the expansion budget "
            f"(c in [{lo}, {hi}])")

    best = min(shot_lo, shot_hi, key=lambda s: abs(s.g))
    for _ in range(cfg.max_root_iters):
        if abs(best.g) <= delta / 2.0:
            break
        width = hi - lo
        if width < 1e-14 * hi:
            break
        mid = 0.5 * (lo + hi)
        if width >= 1e-3 * mid:
            c_new = mid  # bisection phase
        else:
            # secant on the bracket endpoints, guarded to stay inside
            denom = shot_hi.g - shot_lo.g
            c_new = hi - shot_hi.g * (hi - lo) / denom if denom != 0.0 else mid
            if not lo < c_new < hi:
                c_new = mid
        shot = make_shot(c_new)
        if abs(shot.g) < abs(best.g):
            best = shot
        if shot.g == 0.0:
            best = shot
            break
        if shot.g < 0.0:
            lo, shot_lo = c_new, shot
        else:
            hi, shot_hi = c_new, shot
    else:
        raise ResolutionFailureError(
            f"root refinement exhausted {cfg.max_root_iters} iterations "
            f"(best |u_inf - 1| = {abs(best.g):.3e})")
    if abs(best.g) > delta / 2.0 and abs(best.g) + best.bound > delta:
        raise ResolutionFailureError(
            f"|u_inf - 1| = {abs(best.g):.3e} with bound {best.bound:.3e} "
            f"exceeds root_tol {delta:.3e}")

    c_star = best.c
    grid = profile_grid(best.r_max, cfg.profile_points_per_decade,
                        cfg.profile_layer_points_per_decade)
    profile = integrate_ivp(params, c_star, best.r_max, cfg.ivp_tol,
                            r_eval=grid)
    return c_star, profile


def extract_C(solution, params: ModelParams, bvp_tol: float = 1e-6) -> float:
    """Constant C of the far-field normalization r^(n-1) u' = C e^(-eps r - ...).

    Equating the two first-integral forms gives
    C = c exp(eps + eps int_1^inf (1 - u) dr); the integral is (R-1) - w(R)
    on the grid plus a closed-form exponential tail.
    """
    c_star, profile = solution
    if abs(profile.u_inf - 1.0) > bvp_tol:
        raise DomainError(
            f"profile does not solve the BVP: |u_inf - 1| = "
            f"{abs(profile.u_inf - 1.0):.3e} > {bvp_tol}")
    eps, n = params.eps, params.n
    ops = nonlinearity_ops(params)
    R = float(profile.r_grid[-1])
    uR, wR = float(profile.u[-1]), float(profile.w[-1])
    I_main = (R - 1.0) - wR
    # tail: int_R^inf (u_inf - u(s)) ds with u, w frozen at R
    beta = eps * uR
    tail = 0.0
    outer = -float(ops.F(uR)) - eps * wR
    if beta > 0.0 and outer > -700.0:
        scaled_diff = (specfun.exp_integral_scaled(n - 2.0, beta * R)
                       - beta * R * specfun.exp_integral_scaled(n - 1.0, beta * R))
        tail = profile.c * math.exp(outer) * beta ** (n - 3.0) * scaled_diff
    return profile.c * math.exp(eps + eps * (I_main + tail))
