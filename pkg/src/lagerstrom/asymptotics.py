"""Closed-form small-eps expansions for the three covered cases.

Cases are (n, k) in {(2, 0), (3, 0), (2, 1)}.  The n = 2 cases expand in
powers of 1/lambda with lambda = log(1/eps); the (3, 0) case expands in the
mixed basis (1, eps log eps, eps).  Inner expansions hold for fixed r
(rho = eps r of order eps), outer expansions for fixed rho of order one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from . import specfun
from .errors import DomainError, UnsupportedParameterError
from .specfun import EULER_GAMMA

__all__ = [
    "CaseId",
    "ExpansionCoefficients",
    "coefficients",
    "c_asym",
    "inner_u",
    "outer_u",
    "EPS_WINDOW",
    "OUTER_L1_COEFF",
    "OUTER_L1_COEFF_HINCH",
]

_CASES = {(2, 0), (3, 0), (2, 1)}

# eps validity window: lambda = log(1/eps) > 1.6; accuracy is poor near the
# top of the window (documented, not asserted).
EPS_WINDOW = (0.0, 0.2)

# 1/lambda correction coefficient inside the leading bracket of the (2, 1)
# outer expansion, and the variant produced by the sign slip in Hinch's
# derivation (gamma - 1 + 1/e instead of gamma + 1 - 1/e).
OUTER_L1_COEFF = EULER_GAMMA + 1.0 - 1.0 / math.e
OUTER_L1_COEFF_HINCH = EULER_GAMMA - 1.0 + 1.0 / math.e


@dataclass(frozen=True)
class CaseId:
    """One of the closed-form cases: (n, k) in {(2,0), (3,0), (2,1)}."""

    n: int
    k: int

    def __post_init__(self):
        if (self.n, self.k) not in _CASES:
            raise DomainError(
                f"(n, k) = ({self.n}, {self.k}) has no closed-form case; "
                f"supported: {sorted(_CASES)}")


@dataclass(frozen=True)
class ExpansionCoefficients:
    """C-series coefficients.

    lambda_kind "inverse_log": C = (leading)/lambda + A/lambda^2 + B/lambda^3
    with leading = 1 for (2,0) and e-1 for (2,1).
    lambda_kind "eps_series": C = 1 - 2 eps log eps - (2 gamma + 1) eps; the
    triple is carried in eps_series and mirrored into (A, B) as the two
    correction coefficients.
    """

    A: float
    B: float
    lambda_kind: str
    eps_series: Optional[tuple] = None


def coefficients(case: CaseId) -> ExpansionCoefficients:
    g = EULER_GAMMA
    if (case.n, case.k) == (2, 0):
        A = g + 1.0
        B = g * g + 2.0 * g + 0.5 - math.log(2.0)
        return ExpansionCoefficients(A=A, B=B, lambda_kind="inverse_log")
    if (case.n, case.k) == (3, 0):
        series = (1.0, -2.0, -(2.0 * g + 1.0))
        return ExpansionCoefficients(A=series[1], B=series[2],
                                     lambda_kind="eps_series",
                                     eps_series=series)
    # (2, 1)
    e = math.e
    em1 = e - 1.0
    A = em1 / e * (g * e + em1)
    # linear relation fixing B:
    # B - A g + (e-1)^2/e (g + 2 log 2) - 2 A (e-1)/e
    #   + (e-1)^3/(2 e^2) (3 - 4 log 2) = 0
    B = (A * g
         - em1 ** 2 / e * (g + 2.0 * math.log(2.0))
         + 2.0 * A * em1 / e
         - em1 ** 3 / (2.0 * e * e) * (3.0 - 4.0 * math.log(2.0)))
    return ExpansionCoefficients(A=A, B=B, lambda_kind="inverse_log")


def _validate_eps(eps: float) -> None:
    if not EPS_WINDOW[0] < eps < EPS_WINDOW[1]:
        raise DomainError(f"eps must lie in {EPS_WINDOW}, got {eps}")


def c_asym(case: CaseId, eps: float, order: int) -> float:
    """Truncated C(eps) series, order in 1..3.

    Remainders: O(lambda^-(order+1)) for the n = 2 cases,
    O(eps^2 log^2 eps) for (3, 0) at full order.
    """
    _validate_eps(eps)
    if not 1 <= order <= 3:
        raise UnsupportedParameterError("order must be in 1..3")
    coef = coefficients(case)
    if coef.lambda_kind == "eps_series":
        terms = (1.0, -2.0 * eps * math.log(eps),
                 -(2.0 * EULER_GAMMA + 1.0) * eps)
        return float(sum(terms[:order]))
    lam = math.log(1.0 / eps)
    leading = 1.0 if case.k == 0 else math.e - 1.0
    terms = (leading / lam, coef.A / lam ** 2, coef.B / lam ** 3)
    return float(sum(terms[:order]))


INNER_MAX_ORDER = {(2, 0): 2, (3, 0): 3, (2, 1): 2}


def inner_u(case: CaseId, eps: float, r, order: int):
    """Truncated inner expansion at fixed r (rho = eps r of order eps).

    (2,0): u = log r / lambda + gamma log r / lambda^2
    (3,0): u = 1 - 1/r - eps log eps (1 - 1/r)
               - eps (log r + log r / r) + eps (1 - gamma)(1 - 1/r)
    (2,1): u = log(1 + (e-1) log r / l + gamma (e-1) log r / l^2)
    """
    _validate_eps(eps)
    max_order = INNER_MAX_ORDER[(case.n, case.k)]
    if not 1 <= order <= max_order:
        raise UnsupportedParameterError(
            f"order must be in 1..{max_order} for case {case}")
    r = np.asarray(r, dtype=float)
    if np.any(r < 1.0):
        raise DomainError("inner expansion needs r >= 1")
    g = EULER_GAMMA
    lr = np.log(r)
    if (case.n, case.k) == (2, 0):
        lam = math.log(1.0 / eps)
        out = lr / lam
        if order >= 2:
            out = out + g * lr / lam ** 2
    elif (case.n, case.k) == (3, 0):
        base = 1.0 - 1.0 / r
        out = base.copy()
        if order >= 2:
            out = out - eps * math.log(eps) * base
        if order >= 3:
            out = out - eps * (lr + lr / r) + eps * (1.0 - g) * base
    else:  # (2, 1)
        lam = math.log(1.0 / eps)
        e = math.e
        arg = 1.0 + (e - 1.0) * lr / lam
        if order >= 2:
            arg = arg + g * (e - 1.0) * lr / lam ** 2
        out = np.log(arg)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=4096)
def _E2_sq_tail(rho: float) -> float:
    # int_rho^inf E_2(t)^2 dt, numeric (no closed form attempted), cached
    return specfun.quad_adaptive(
        lambda t: specfun.exp_integral(2.0, t) ** 2, rho, math.inf,
        1e-11).value


def outer_u(case: CaseId, eps: float, rho, order: int,
            l1_correction: Optional[float] = None):
    """Truncated outer expansion at fixed rho = eps r of order one.

    order = 1 keeps the leading E-term, order = 2 the full displayed depth.
    For (2, 1), `l1_correction` overrides the 1/l coefficient inside the
    leading bracket (default OUTER_L1_COEFF; pass OUTER_L1_COEFF_HINCH to
    reproduce the variant with the sign slip).
    """
    _validate_eps(eps)
    if not 1 <= order <= 2:
        raise UnsupportedParameterError("order must be 1 or 2")
    if l1_correction is not None and (case.n, case.k) != (2, 1):
        raise UnsupportedParameterError(
            "l1_correction applies to the (2, 1) case only")
    rho_arr = np.asarray(rho, dtype=float)
    if np.any(rho_arr <= 0.0):
        raise DomainError("outer expansion needs rho > 0")
    scalar = rho_arr.ndim == 0
    rho_flat = np.atleast_1d(rho_arr)
    g = EULER_GAMMA
    E1 = np.array([specfun.exp_integral(1.0, x) for x in rho_flat])
    if (case.n, case.k) == (2, 0):
        lam = math.log(1.0 / eps)
        du = -E1 / lam
        if order >= 2:
            E1_2 = np.array([specfun.exp_integral(1.0, 2.0 * x)
                             for x in rho_flat])
            du = (-E1 * (1.0 / lam + (g + 1.0) / lam ** 2)
                  + (2.0 * E1_2 - np.exp(-rho_flat) * E1) / lam ** 2)
    elif (case.n, case.k) == (3, 0):
        E2 = np.array([specfun.exp_integral(2.0, x) for x in rho_flat])
        cser = c_asym(case, eps, 3)
        du = -eps * cser * E2
        if order >= 2:
            tail = np.array([_E2_sq_tail(float(x)) for x in rho_flat])
            du = du + eps ** 2 * (E1 * E2 - rho_flat * E2 ** 2 - tail)
    else:  # (2, 1)
        lam = math.log(1.0 / eps)
        e = math.e
        kappa = OUTER_L1_COEFF if l1_correction is None else l1_correction
        du = -(e - 1.0) / e * E1 / lam
        if order >= 2:
            E1_2 = np.array([specfun.exp_integral(1.0, 2.0 * x)
                             for x in rho_flat])
            du = (-(e - 1.0) / e * (1.0 + kappa / lam) * E1 / lam
                  + (e - 1.0) ** 2 / e ** 2
                  * (2.0 * E1_2 - np.exp(-rho_flat) * E1) / lam ** 2
                  - (e - 1.0) ** 2 / (2.0 * e * e) * E1 ** 2 / lam ** 2)
    out = 1.0 + du
    return float(out[0]) if scalar else out
