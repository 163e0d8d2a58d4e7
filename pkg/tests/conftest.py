"""Shared solve caches so expensive shooting/Picard solutions are computed
once per session and reused across test modules."""

from lagerstrom import integral_eq
from lagerstrom.ode_shoot import ConstantK, ModelParams, extract_C, shoot

_SHOOT_CACHE = {}
_PICARD_CACHE = {}


def params_for(n, k, eps) -> ModelParams:
    return ModelParams(n=float(n), eps=float(eps),
                       nonlinearity=ConstantK(float(k)))


def shoot_solution(n, k, eps):
    """(params, c_star, profile) for the shooting solve, cached."""
    key = (n, k, eps)
    if key not in _SHOOT_CACHE:
        params = params_for(n, k, eps)
        c_star, profile = shoot(params)
        _SHOOT_CACHE[key] = (params, c_star, profile)
    return _SHOOT_CACHE[key]


def shoot_C(n, k, eps) -> float:
    params, c_star, profile = shoot_solution(n, k, eps)
    return extract_C((c_star, profile), params)


def picard_solution(n, k, eps):
    """(params, C, profile, diagnostics) for the Picard solve, cached."""
    key = (n, k, eps)
    if key not in _PICARD_CACHE:
        params = params_for(n, k, eps)
        C, profile, diags = integral_eq.solve_C(params)
        _PICARD_CACHE[key] = (params, C, profile, diags)
    return _PICARD_CACHE[key]
