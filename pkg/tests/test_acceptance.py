"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL
line (run with `pytest tests/test_acceptance.py -v -s` to see them).  Every
tolerance is fixed here, none are calibrated at runtime."""

import math
import time

import numpy as np
import pytest

from conftest import params_for, picard_solution, shoot_C, shoot_solution
from lagerstrom import asymptotics, integral_eq, specfun, verify
from lagerstrom.asymptotics import CaseId
from lagerstrom.specfun import EULER_GAMMA


def report(num, ok, detail):
    print(f"ACCEPTANCE {num:2d}: {'PASS' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def c3_series(eps):
    return 1.0 - 2.0 * eps * math.log(eps) - eps * (2.0 * EULER_GAMMA + 1.0)


def test_01_specfun_oracle_equivalence():
    t0 = time.perf_counter()
    worst = 0.0
    for q in (1.0, 2.0, 3.0, 2.5):
        for rho in (1e-6, 1e-3, 0.1, 1.0, 5.0, 20.0):
            closed = specfun.exp_integral(q, rho)
            quad = specfun.quad_adaptive(
                lambda t, q=q: t ** (-q) * math.exp(-t), rho, math.inf,
                1e-12)
            worst = max(worst, abs(closed - quad.value) / abs(closed))
    elapsed = time.perf_counter() - t0
    report(1, worst <= 1e-10 and elapsed < 1.0,
           f"worst relative deviation {worst:.2e} (<= 1e-10), "
           f"runtime {elapsed:.2f}s (< 1s)")


def test_02_closed_form_identities():
    rep = verify.identity_suite(1e-8)
    pointwise = [c for c in rep.checks
                 if c.name.startswith(("integral_of_E_vs_quadrature",
                                       "E2_reduction_to_E1"))]
    constants = {c.name: c for c in rep.checks}
    needed = ("integral_exp_times_E1", "integral_E1_double_argument",
              "integral_E1_squared")
    ok = (rep.all_passed() and len(pointwise) >= 20
          and all(constants[n].passed for n in needed))
    worst = max(abs(c.measured - c.reference) for c in rep.checks)
    report(2, ok, f"{len(rep.checks)} identity checks within 1e-8 "
                  f"(worst gap {worst:.2e})")


def test_03_cross_solver_oracle():
    details = []
    worst = 0.0
    for (n, k) in ((2, 0), (3, 0), (2, 1)):
        for eps in (0.05, 0.1):
            params, _, prof_shoot = shoot_solution(n, k, eps)
            _, _, rescaled, _ = picard_solution(n, k, eps)
            r_ie, u_ie = integral_eq.as_radial(rescaled, params)
            metrics = verify.compare_profiles((r_ie, u_ie), prof_shoot,
                                              (1.0, 5.0 / eps))
            worst = max(worst, metrics.sup_norm)
            details.append(f"({n},{k})@{eps}:{metrics.sup_norm:.1e}")
    report(3, worst <= 1e-6,
           f"sup|u_shoot - u_picard| on [1, 5/eps]: {' '.join(details)} "
           f"(all <= 1e-6)")


def test_04_c_expansion_three_zero():
    eps_list = (0.05, 0.02, 0.01)
    errs = []
    for eps in eps_list:
        C = shoot_C(3, 0, eps)
        errs.append(abs(C - c3_series(eps)))
    K = max(e / (eps ** 2 * math.log(eps) ** 2)
            for e, eps in zip(errs, eps_list))
    slope = verify.order_estimate(
        [(eps * abs(math.log(eps)), e) for eps, e in zip(eps_list, errs)])
    report(4, K <= 10.0 and slope >= 1.7,
           f"fitted K = {K:.2f} (<= 10), order vs eps|log eps| = "
           f"{slope:.2f} (>= 1.7)")


def test_05_c_expansion_two_zero():
    eps_list = (1e-2, 1e-3, 1e-4)
    A = EULER_GAMMA + 1.0
    B = EULER_GAMMA ** 2 + 2.0 * EULER_GAMMA + 0.5 - math.log(2.0)
    errs = []
    for eps in eps_list:
        _, C, _, _ = picard_solution(2, 0, eps)
        lam = math.log(1.0 / eps)
        errs.append(abs(C - (1.0 / lam + A / lam ** 2 + B / lam ** 3)))
    decreasing = errs[0] > errs[1] > errs[2]
    slope = verify.order_estimate(
        [(1.0 / math.log(1.0 / eps), e) for eps, e in zip(eps_list, errs)])
    report(5, decreasing and slope >= 3.5,
           f"three-term error decreasing ({errs[0]:.1e} > {errs[1]:.1e} > "
           f"{errs[2]:.1e}), order in 1/lambda = {slope:.2f} (>= 3.5)")


def test_06_coefficient_recovery():
    eps36 = [0.05, 0.02, 0.01, 0.005]
    co36 = verify.coefficient_fit(
        CaseId(3, 0), eps36, [picard_solution(3, 0, e)[1] for e in eps36])
    eps20 = [1e-3, 1e-4, 1e-5]
    co20 = verify.coefficient_fit(
        CaseId(2, 0), eps20, [picard_solution(2, 0, e)[1] for e in eps20])
    eps21 = [1e-2, 1e-3, 1e-4]
    co21 = verify.coefficient_fit(
        CaseId(2, 1), eps21, [picard_solution(2, 1, e)[1] for e in eps21])
    A_true = EULER_GAMMA + 1.0
    checks = {
        "lead(3,0)": (abs(co36[0] - 1.0), 0.05),
        "lead(2,0)": (abs(co20[0] - 1.0), 0.05),
        "lead(2,1)": (abs(co21[0] - (math.e - 1.0)) / (math.e - 1.0), 0.05),
        "A(2,0)": (abs(co20[1] - A_true) / A_true, 0.15),
    }
    ok = all(err <= tol for err, tol in checks.values())
    detail = ", ".join(f"{name} off by {err * 100:.1f}% (<= {tol * 100:.0f}%)"
                       for name, (err, tol) in checks.items())
    report(6, ok, detail)


def test_07_inner_expansion_three_zero():
    eps = 0.01
    params, _, prof = shoot_solution(3, 0, eps)
    mask = prof.r_grid <= 10.0
    expansion = asymptotics.inner_u(CaseId(3, 0), eps, prof.r_grid[mask], 3)
    sup = float(np.max(np.abs(prof.u[mask] - expansion)))
    K = sup / (eps ** 2 * math.log(eps) ** 2)
    report(7, K <= 20.0,
           f"sup on r in [1, 10] = {sup:.2e}, fitted K = {K:.2f} (<= 20)")


def test_08_outer_expansion_adjudication():
    result = verify.hinch_adjudication(1e-3, rho_window=(0.5, 5.0))
    report(8, result["margin"] >= 3.0,
           f"documented coefficient sup-norm {result['sup_norm']:.2e} vs "
           f"variant {result['sup_norm_hinch_variant']:.2e}: margin "
           f"{result['margin']:.1f}x (>= 3x)")


def test_09_property_suites():
    rep = verify.monotonicity_suite([params_for(3, 0, 0.05),
                                     params_for(3, 0, 0.1),
                                     params_for(2, 1, 0.1)])
    failures = [c.name for c in rep.failures()]
    names = {c.name for c in rep.checks}
    coverage = (any("u_nondecreasing" in n for n in names)
                and any("u_below_sqrt_2c_over_eps" in n for n in names)
                and any("first_integral_drift" in n for n in names)
                and any("u_inf_increasing_in_c" in n for n in names)
                and "u_larger_for_smaller_eps[n=3.0,eps=0.05<eps=0.1]"
                in names)
    report(9, rep.all_passed() and coverage,
           f"{len(rep.checks)} property checks pass "
           f"(failures: {failures or 'none'})")


def test_10_picard_contraction():
    params, C, _, diags = picard_solution(3, 0, 0.1)
    phi = integral_eq.phi_diagnostic(params, C)
    tail = diags.contraction_ratios[-3:]
    ok = (diags.phi == pytest.approx(phi, rel=1e-12)
          and max(tail) <= phi + 0.1)
    report(10, ok,
           f"Phi = {phi:.3f}, final contraction ratios "
           f"{[f'{r:.3f}' for r in tail]} all <= Phi + 0.1 = {phi + 0.1:.3f}")
