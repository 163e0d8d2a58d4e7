"""Picard iteration on the rescaled integral equation.

With rho = eps r and the far-field constant C, the boundary-value problem is
equivalent to the fixed-point equation

    g(rho) = -C eps^(n-2) int_rho^inf tau^(1-n) e^(-tau)
                 exp( int_tau^inf (u - 1) dsigma ) dtau,

where the iteration variable is g = G(u) - G(1) with G(u) = int_0^u e^F
(g = u - 1 when f = 0, g = e^u - e when f = 1), and the boundary condition
u = 0 at rho = eps pins C through g(eps) = -G(1).

The grid integrals use a product rule exact in the kernel factor
phi = tau^(1-n) e^(-tau): cell moments int phi and int (tau-a) phi are
precomputed from the E-family in closed form, and the slowly varying factor
exp(int (u-1)) is taken linear per cell.  This resolves the integrable
kernel singularity at small rho for n > 2 and the exponential decay at
infinity exactly; beyond the truncation point P the first Picard term is
used as the tail model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline

from . import specfun
from .errors import (DomainError, NonConvergenceError,
                     UnsupportedParameterError)
from .ode_shoot import ConstantK, GeneralF, ModelParams, nonlinearity_ops

__all__ = [
    "RescaledProfile",
    "IterationDiagnostics",
    "PicardConfig",
    "picard_rhs",
    "picard_solve",
    "solve_C",
    "phi_diagnostic",
    "series_terms",
    "as_radial",
]

KIND_U_MINUS_ONE = "u_minus_one"   # k = 0: values are v = u - 1
KIND_G_TRANSFORM = "g_transform"   # otherwise: values are g = G(u) - G(1)


@dataclass
class RescaledProfile:
    """Iteration state on the rho = eps r grid over [eps, P]."""

    rho_grid: np.ndarray
    values: np.ndarray
    C: float
    P: float
    kind: str

    def u(self, params: ModelParams) -> np.ndarray:
        """Recover u on the grid from the iteration variable."""
        if self.kind == KIND_U_MINUS_ONE:
            return 1.0 + self.values
        ops = nonlinearity_ops(params)
        G1 = ops.G1
        return np.asarray(ops.G_inverse(np.maximum(self.values, -G1) + G1))


@dataclass
class IterationDiagnostics:
    phi: float
    iterations: int
    final_residual: float
    contraction_ratios: list


@dataclass
class PicardConfig:
    tol: float = 1e-11
    max_iters: int = 400
    points_per_decade: int = 360
    layer_points_per_decade: int = 2800
    boundary_tol: float = 1e-9
    outer_budget: int = 80
    allow_phi_ge_1: bool = False
    seed_C: Optional[float] = None


def _kind_for(params: ModelParams) -> str:
    nl = params.nonlinearity
    if isinstance(nl, ConstantK) and nl.k == 0.0:
        return KIND_U_MINUS_ONE
    return KIND_G_TRANSFORM


def truncation_point(eps: float) -> float:
    # E_{n-1}(P) < 1e-16 for every n >= 2 once P ~ 40
    return max(30.0, eps + 40.0)


def rho_grid(eps: float, P: float, points_per_decade: int,
             layer_points_per_decade: int) -> np.ndarray:
    """Geometric grid on [eps, P], denser over the first decade above eps
    where the n > 2 kernel is steepest."""
    split = min(10.0 * eps, P)
    head_decades = math.log10(split / eps)
    head = np.geomspace(eps, split,
                        max(int(head_decades * layer_points_per_decade), 8))
    if split >= P:
        return head
    tail_decades = math.log10(P / split)
    tail = np.geomspace(split, P,
                        max(int(tail_decades * points_per_decade), 8))
    return np.concatenate([head, tail[1:]])


class _KernelGrid:
    """rho grid plus closed-form kernel moments, reusable across sweeps."""

    def __init__(self, n: float, rho: np.ndarray):
        self.rho = rho
        q = n - 1.0
        E = np.array([specfun.exp_integral(q, x) for x in rho])
        Em1 = np.array([specfun.exp_integral(q - 1.0, x) for x in rho])
        self.E = E
        self.M0 = E[:-1] - E[1:]
        self.M1 = (Em1[:-1] - Em1[1:]) - rho[:-1] * self.M0
        self.drho = np.diff(rho)
        self.E_P = float(E[-1])
        self.intE_P = float(specfun.integral_of_E(q, rho[-1]))


_GRID_CACHE: dict = {}


def _kernel_grid(params: ModelParams, cfg: PicardConfig) -> _KernelGrid:
    P = truncation_point(params.eps)
    key = (params.n, params.eps, P, cfg.points_per_decade,
           cfg.layer_points_per_decade)
    grid = _GRID_CACHE.get(key)
    if grid is None:
        grid = _KernelGrid(params.n, rho_grid(
            params.eps, P, cfg.points_per_decade, cfg.layer_points_per_decade))
        _GRID_CACHE[key] = grid
    return grid


def _sweep(params: ModelParams, C: float, values: np.ndarray,
           grid: _KernelGrid, kind: str) -> np.ndarray:
    """One application of the integral operator on the grid."""
    eps, n = params.eps, params.n
    ops = nonlinearity_ops(params)
    amp = C * eps ** (n - 2.0)
    if kind == KIND_U_MINUS_ONE:
        u_minus_1 = values
        w1 = 1.0
    else:
        G1 = ops.G1
        u = np.asarray(ops.G_inverse(np.maximum(values, -G1) + G1))
        u_minus_1 = u - 1.0
        w1 = math.exp(-ops.F1)
    # A(tau) = int_tau^inf (u-1) dsigma: trapezoid up to P, first-Picard tail
    cells = 0.5 * (u_minus_1[:-1] + u_minus_1[1:]) * grid.drho
    A_tail = -w1 * amp * grid.intE_P
    A = np.concatenate([np.cumsum(cells[::-1])[::-1], [0.0]]) + A_tail
    S = np.exp(A)
    slope = np.diff(S) / grid.drho
    cell_ints = S[:-1] * grid.M0 + slope * grid.M1
    main_tail = S[-1] * grid.E_P
    J = np.concatenate([np.cumsum(cell_ints[::-1])[::-1], [0.0]]) + main_tail
    return -amp * J


def picard_rhs(params: ModelParams, C: float,
               current: RescaledProfile) -> RescaledProfile:
    """One integral-operator application to `current` (C may be 0)."""
    if C < 0.0:
        raise DomainError("C must be nonnegative")
    grid = _grid_matching(params, current)
    new_values = _sweep(params, C, current.values, grid, current.kind)
    return replace(current, values=new_values, C=C)


def _grid_matching(params: ModelParams, profile: RescaledProfile) -> _KernelGrid:
    key = (params.n, hash(profile.rho_grid.tobytes()))
    grid = _GRID_CACHE.get(key)
    if grid is None:
        grid = _KernelGrid(params.n, profile.rho_grid)
        _GRID_CACHE[key] = grid
    return grid


def zero_profile(params: ModelParams, cfg: PicardConfig = None,
                 C: float = 0.0) -> RescaledProfile:
    """All-zero starting iterate on the configured grid."""
    if cfg is None:
        cfg = PicardConfig()
    grid = _kernel_grid(params, cfg)
    return RescaledProfile(rho_grid=grid.rho,
                           values=np.zeros_like(grid.rho),
                           C=C, P=float(grid.rho[-1]), kind=_kind_for(params))


def phi_diagnostic(params: ModelParams, C: float) -> float:
    """Contraction diagnostic Phi = C eps^(n-2) int_eps^inf E_{n-1}."""
    if C < 0.0:
        raise DomainError("C must be nonnegative")
    if params.n < 2.0:
        raise DomainError("Phi requires n >= 2")
    return C * params.eps ** (params.n - 2.0) * specfun.integral_of_E(
        params.n - 1.0, params.eps)


def picard_solve(params: ModelParams, C: float, cfg: PicardConfig = None):
    """Iterate the operator to its fixed point at given C.

    Returns (RescaledProfile, IterationDiagnostics).  Requires the
    contraction diagnostic Phi < 1 unless cfg.allow_phi_ge_1.
    """
    if cfg is None:
        cfg = PicardConfig()
    if C < 0.0:
        raise DomainError("C must be nonnegative")
    phi = phi_diagnostic(params, C)
    if phi >= 1.0 and not cfg.allow_phi_ge_1:
        raise NonConvergenceError(
            f"Phi = {phi:.3f} >= 1: contraction not guaranteed "
            f"(set allow_phi_ge_1 to try anyway)",
            diagnostics=IterationDiagnostics(phi, 0, math.inf, []))
    grid = _kernel_grid(params, cfg)
    kind = _kind_for(params)
    values = np.zeros_like(grid.rho)
    residuals = []
    for it in range(1, cfg.max_iters + 1):
        new_values = _sweep(params, C, values, grid, kind)
        residual = float(np.max(np.abs(new_values - values)))
        values = new_values
        residuals.append(residual)
        if residual <= cfg.tol:
            ratios = [residuals[i] / residuals[i - 1]
                      for i in range(1, len(residuals))
                      if residuals[i - 1] > 0.0]
            diags = IterationDiagnostics(phi=phi, iterations=it,
                                         final_residual=residual,
                                         contraction_ratios=ratios)
            profile = RescaledProfile(rho_grid=grid.rho, values=values,
                                      C=C, P=float(grid.rho[-1]), kind=kind)
            return profile, diags
    ratios = [residuals[i] / residuals[i - 1]
              for i in range(1, len(residuals)) if residuals[i - 1] > 0.0]
    raise NonConvergenceError(
        f"no fixed point after {cfg.max_iters} sweeps "
        f"(residual {residuals[-1]:.3e}, Phi {phi:.3f})",
        diagnostics=IterationDiagnostics(phi=phi, iterations=cfg.max_iters,
                                         final_residual=residuals[-1],
                                         contraction_ratios=ratios))


def _seed_C(params: ModelParams, cfg: PicardConfig) -> float:
    if cfg.seed_C is not None:
        return cfg.seed_C
    n, eps = params.n, params.eps
    nl = params.nonlinearity
    if isinstance(nl, ConstantK) and eps < 0.2:
        pair = (round(n), round(nl.k))
        if (n, nl.k) == pair and pair in {(2, 0), (3, 0), (2, 1)}:
            from . import asymptotics
            return asymptotics.c_asym(asymptotics.CaseId(*map(int, pair)),
                                      eps, order=3)
    G1 = nonlinearity_ops(params).G1
    if n > 2.0:
        return G1
    return G1 / math.log(1.0 / eps) if eps < 1.0 else G1


def solve_C(params: ModelParams, cfg: PicardConfig = None):
    """Find the unique C with u(eps) = 0, i.e. g_C(eps) = -G(1).

    Nested iteration: outer secant (bracket-safeguarded) on the boundary
    residual h(C) = g_C(eps) + G(1), inner Picard solve per C.  Returns
    (C, RescaledProfile, IterationDiagnostics).
    """
    if cfg is None:
        cfg = PicardConfig()
    if params.n < 2.0:
        raise DomainError("C determination requires n >= 2; below that the "
                          "boundary relation is only an implicit equation")
    target = -nonlinearity_ops(params).G1

    cache: dict = {}

    def h(C: float) -> float:
        if C not in cache:
            cache[C] = picard_solve(params, C, cfg)
        profile, _ = cache[C]
        return float(profile.values[0]) - target

    # h is decreasing in C (stronger forcing pulls g(eps) down); keep the
    # bracket search inside the contraction region Phi < 1
    phi_unit = phi_diagnostic(params, 1.0)
    C_cap = 0.98 / phi_unit if phi_unit > 0.0 else math.inf
    C0 = min(_seed_C(params, cfg), 0.9 * C_cap)
    lo = hi = C0
    h_lo = h_hi = h(C0)
    budget = cfg.outer_budget
    while h_lo <= 0.0 and budget > 0:
        lo /= 1.5
        h_lo = h(lo)
        budget -= 1
    while h_hi >= 0.0 and budget > 0:
        if hi >= 0.999 * C_cap:
            raise NonConvergenceError(
                f"boundary condition not reachable inside the contraction "
                f"region: g(eps) stays above target up to C = {hi:.6g} "
                f"where Phi approaches 1")
        hi = min(hi * 1.5, 0.999 * C_cap)
        h_hi = h(hi)
        budget -= 1
    if h_lo <= 0.0 or h_hi >= 0.0:
        raise NonConvergenceError("could not bracket the boundary condition "
                                  f"in C (tried up to [{lo}, {hi}])")
    C_best, h_best = (lo, h_lo) if abs(h_lo) < abs(h_hi) else (hi, h_hi)
    for _ in range(cfg.outer_budget):
        if abs(h_best) <= cfg.boundary_tol or (hi - lo) < 1e-14 * hi:
            break
        denom = h_hi - h_lo
        C_new = hi - h_hi * (hi - lo) / denom if denom != 0.0 else 0.5 * (lo + hi)
        if not lo < C_new < hi:
            C_new = 0.5 * (lo + hi)
        h_new = h(C_new)
        if abs(h_new) < abs(h_best):
            C_best, h_best = C_new, h_new
        if h_new > 0.0:
            lo, h_lo = C_new, h_new
        elif h_new < 0.0:
            hi, h_hi = C_new, h_new
        else:
            C_best, h_best = C_new, 0.0
            break
    else:
        raise NonConvergenceError(
            f"outer iteration on C exhausted its budget "
            f"(residual {h_best:.3e})")
    profile, diags = cache[C_best]
    return C_best, profile, diags


def as_radial(profile: RescaledProfile, params: ModelParams):
    """Map a rescaled profile back to (r, u) with r = rho / eps."""
    return profile.rho_grid / params.eps, profile.u(params)


# --- truncated series terms -------------------------------------------------

_QSQ_SPLINE_CACHE: dict = {}


def _E_sq_tail_spline(n: float):
    """log-log spline of Q(sigma) = int_sigma^inf E_{n-1}^2 dtau."""
    key = n
    spline = _QSQ_SPLINE_CACHE.get(key)
    if spline is None:
        q = n - 1.0
        xs = np.geomspace(1e-8, 60.0, 220)
        vals = np.array([specfun.quad_adaptive(
            lambda t: specfun.exp_integral(q, t) ** 2, x, math.inf, 1e-11).value
            for x in xs])
        spline = CubicSpline(np.log(xs), np.log(vals))
        _QSQ_SPLINE_CACHE[key] = spline
    return spline


def _weights(params: ModelParams):
    """(w1, w2): first- and second-order weight coefficients at u = 1.

    For f(u) = k:  (u-1)/g = e^-k - (k/2) e^-2k g + O(g^2)."""
    nl = params.nonlinearity
    if isinstance(nl, ConstantK):
        w1 = math.exp(-nl.k)
        w2 = 0.5 * nl.k * math.exp(-2.0 * nl.k)
        return w1, w2
    ops = nonlinearity_ops(params)
    return math.exp(-ops.F1), None


def series_terms(params: ModelParams, C: float, rho: float, order: int,
                 quad_tol: float = 1e-10) -> list:
    """Numerical values of the first `order` displayed series terms at rho.

    k = 0 has the four displayed terms; k > 0 has five (the extra term with
    the squared E kernel); GeneralF supports order <= 2.  Evaluated by
    nested adaptive quadrature with the closed form for int E.
    """
    if rho < params.eps:
        raise DomainError("rho must be >= eps")
    n = params.n
    q = n - 1.0
    kind = _kind_for(params)
    nl = params.nonlinearity
    if isinstance(nl, GeneralF):
        max_order = 2
    else:
        max_order = 4 if kind == KIND_U_MINUS_ONE else 5
    if not 1 <= order <= max_order:
        raise UnsupportedParameterError(
            f"order must be in [1, {max_order}] for this nonlinearity")
    w1, w2 = _weights(params)
    amp = C * params.eps ** (n - 2.0)

    def phi(tau: float) -> float:
        return tau ** (1.0 - n) * math.exp(-tau)

    def IE(tau: float) -> float:
        # int_inf^tau E_{n-1} dsigma  (<= 0)
        return -specfun.integral_of_E(q, tau)

    terms = [-amp * specfun.exp_integral(q, rho)]
    if order >= 2:
        I2 = specfun.quad_adaptive(lambda t: phi(t) * IE(t), rho, math.inf,
                                   quad_tol).value
        terms.append(-w1 * amp ** 2 * I2)
    if order >= 3:
        if kind == KIND_U_MINUS_ONE:
            I3 = specfun.quad_adaptive(lambda t: phi(t) * IE(t) ** 2, rho,
                                       math.inf, quad_tol).value
            terms.append(-0.5 * amp ** 3 * I3)
        else:
            Qs = _E_sq_tail_spline(n)
            I_sq = specfun.quad_adaptive(
                lambda t: phi(t) * math.exp(float(Qs(math.log(t))))
                if t <= 60.0 else 0.0,
                rho, math.inf, quad_tol).value
            terms.append(w2 * amp ** 3 * I_sq)
    if order >= 4:
        if kind == KIND_U_MINUS_ONE:
            terms.append(_nested_fourth(params, amp, rho, 1.0, quad_tol))
        else:
            I3 = specfun.quad_adaptive(lambda t: phi(t) * IE(t) ** 2, rho,
                                       math.inf, quad_tol).value
            terms.append(-0.5 * w1 ** 2 * amp ** 3 * I3)
    if order >= 5:
        terms.append(_nested_fourth(params, amp, rho, w1 ** 2, quad_tol))
    return terms


def _nested_fourth(params: ModelParams, amp: float, rho: float,
                   weight: float, quad_tol: float) -> float:
    """The triply nested displayed term, C-amplitude and weight applied."""
    n = params.n
    q = n - 1.0
    Qs = _E_sq_tail_spline(n)

    def phi(tau: float) -> float:
        return tau ** (1.0 - n) * math.exp(-tau)

    def D(sigma: float) -> float:
        # int_inf^sigma phi IE ds = -E_{n-1} IE - int_sigma^inf E^2
        Ev = specfun.exp_integral(q, sigma)
        IEv = -specfun.integral_of_E(q, sigma)
        Qv = math.exp(float(Qs(math.log(sigma)))) if sigma <= 60.0 else 0.0
        return -Ev * IEv - Qv

    def K2(tau: float) -> float:
        # int_inf^tau D dsigma
        return -specfun.quad_adaptive(D, tau, math.inf,
                                      max(quad_tol, 1e-9)).value

    outer = specfun.quad_adaptive(lambda t: phi(t) * K2(t), rho, math.inf,
                                  max(quad_tol, 1e-9)).value
    return weight * amp ** 3 * outer
