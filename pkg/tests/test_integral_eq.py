import math

import numpy as np
import pytest

from conftest import params_for, picard_solution, shoot_solution
from lagerstrom import integral_eq as ieq
from lagerstrom import specfun as sf
from lagerstrom.errors import (DomainError, NonConvergenceError,
                               UnsupportedParameterError)
from lagerstrom.integral_eq import (KIND_G_TRANSFORM, KIND_U_MINUS_ONE,
                                    PicardConfig, phi_diagnostic, picard_rhs,
                                    picard_solve, series_terms, solve_C,
                                    zero_profile)
from lagerstrom.ode_shoot import ConstantK, GeneralF, ModelParams
from scipy.interpolate import PchipInterpolator


class TestGrid:
    def test_truncation_point(self):
        assert ieq.truncation_point(0.1) == pytest.approx(40.1)
        assert ieq.truncation_point(1e-4) == pytest.approx(40.0001)

    def test_grid_spans_eps_to_P(self):
        grid = ieq.rho_grid(0.05, 40.0, 360, 2800)
        assert grid[0] == pytest.approx(0.05)
        assert grid[-1] == pytest.approx(40.0)
        assert np.all(np.diff(grid) > 0.0)


class TestPicardRhs:
    def test_zero_C_gives_zero_profile(self):
        params = params_for(3, 0, 0.1)
        start = zero_profile(params, C=0.0)
        out = picard_rhs(params, 0.0, start)
        assert np.all(out.values == 0.0)

    def test_first_sweep_is_minus_C_eps_E(self):
        params = params_for(3, 0, 0.1)
        start = zero_profile(params, C=1.0)
        out = picard_rhs(params, 1.0, start)
        idx = np.linspace(0, len(out.rho_grid) - 1, 25).astype(int)
        for i in idx:
            expected = -0.1 * sf.exp_integral(2.0, out.rho_grid[i])
            assert out.values[i] == pytest.approx(expected, rel=1e-9,
                                                  abs=1e-18)

    def test_second_sweep_matches_two_series_terms(self):
        params = params_for(3, 0, 0.1)
        phi = phi_diagnostic(params, 1.0)
        start = zero_profile(params, C=1.0)
        first = picard_rhs(params, 1.0, start)
        second = picard_rhs(params, 1.0, first)
        for rho in (0.1, 0.3, 1.0):
            i = int(np.searchsorted(second.rho_grid, rho))
            terms = series_terms(params, 1.0, float(second.rho_grid[i]), 2)
            assert abs(second.values[i] - sum(terms)) <= 3.0 * phi ** 3

    def test_apriori_bound_every_sweep(self):
        params = params_for(3, 0, 0.1)
        C = 1.2
        profile = zero_profile(params, C=C)
        idx = np.linspace(0, len(profile.rho_grid) - 1, 40).astype(int)
        E = np.array([sf.exp_integral(2.0, profile.rho_grid[i]) for i in idx])
        for _ in range(6):
            profile = picard_rhs(params, C, profile)
            bound = C * 0.1 * E
            assert np.all(np.abs(profile.values[idx])
                          <= bound * (1.0 + 1e-10) + 1e-16)

    def test_negative_C_rejected(self):
        params = params_for(3, 0, 0.1)
        with pytest.raises(DomainError):
            picard_rhs(params, -1.0, zero_profile(params))


class TestPicardSolve:
    def test_zero_C_converges_in_one_iteration(self):
        params = params_for(3, 0, 0.1)
        profile, diags = picard_solve(params, 0.0)
        assert diags.iterations == 1
        assert np.all(profile.values == 0.0)

    def test_contraction_ratios_eventually_below_phi_margin(self):
        for key in ((3, 0, 0.1), (2, 0, 1e-3)):
            _, _, _, diags = picard_solution(*key)
            assert diags.phi < 0.5
            tail = diags.contraction_ratios[-3:]
            assert max(tail) <= diags.phi + 0.1

    def test_phi_ge_one_is_escalated(self):
        params = params_for(3, 0, 0.1)
        C_big = 1.01 / phi_diagnostic(params, 1.0)
        with pytest.raises(NonConvergenceError):
            picard_solve(params, C_big)
        # override is accepted (Phi is a crude diagnostic; slightly above 1
        # still contracts here)
        profile, diags = picard_solve(params, C_big,
                                      PicardConfig(allow_phi_ge_1=True))
        assert diags.final_residual <= PicardConfig().tol

    def test_nonconvergence_carries_diagnostics(self):
        params = params_for(3, 0, 0.1)
        with pytest.raises(NonConvergenceError) as info:
            picard_solve(params, 1.0, PicardConfig(max_iters=2))
        assert info.value.diagnostics.iterations == 2


class TestSolveC:
    def test_boundary_condition_pinned(self):
        params, C, profile, _ = picard_solution(3, 0, 0.1)
        assert profile.kind == KIND_U_MINUS_ONE
        assert profile.values[0] == pytest.approx(-1.0, abs=1e-8)
        u = profile.u(params)
        assert u[0] == pytest.approx(0.0, abs=1e-8)

    def test_k1_boundary_condition(self):
        params, C, profile, _ = picard_solution(2, 1, 0.1)
        assert profile.kind == KIND_G_TRANSFORM
        assert profile.values[0] == pytest.approx(1.0 - math.e, abs=1e-8)

    def test_rescaled_profile_invariants(self):
        params, _, prof0, _ = picard_solution(3, 0, 0.05)
        v = prof0.values
        assert np.all(v <= 1e-12) and np.all(v >= -1.0 - 1e-9)
        assert np.all(np.diff(v) >= -1e-12)
        params1, _, prof1, _ = picard_solution(2, 1, 0.1)
        g = prof1.values
        assert np.all(g <= 1e-12) and np.all(g >= 1.0 - math.e - 1e-9)
        assert np.all(np.diff(g) >= -1e-12)

    def test_apriori_bound_on_converged_profile(self):
        params, C, profile, _ = picard_solution(3, 0, 0.1)
        idx = np.linspace(0, len(profile.rho_grid) - 1, 30).astype(int)
        for i in idx:
            bound = C * 0.1 * sf.exp_integral(2.0, profile.rho_grid[i])
            assert abs(profile.values[i]) <= bound * (1.0 + 1e-9) + 1e-15

    def test_three_zero_series(self):
        eps = 0.05
        _, C, _, _ = picard_solution(3, 0, eps)
        from lagerstrom.specfun import EULER_GAMMA
        series = (1.0 - 2.0 * eps * math.log(eps)
                  - eps * (2.0 * EULER_GAMMA + 1.0))
        assert abs(C - series) <= 10.0 * eps ** 2 * math.log(eps) ** 2

    def test_two_zero_series(self):
        eps = 1e-3
        _, C, _, _ = picard_solution(2, 0, eps)
        from lagerstrom.specfun import EULER_GAMMA
        lam = math.log(1.0 / eps)
        A = EULER_GAMMA + 1.0
        B = EULER_GAMMA ** 2 + 2.0 * EULER_GAMMA + 0.5 - math.log(2.0)
        assert abs(C - (1.0 / lam + A / lam ** 2 + B / lam ** 3)) \
            <= 5.0 / lam ** 4

    def test_two_one_leading_coefficient_limit(self):
        gaps = []
        for eps in (1e-2, 1e-3):
            _, C, _, _ = picard_solution(2, 1, eps)
            lam = math.log(1.0 / eps)
            gaps.append(abs(C * lam - (math.e - 1.0)))
        assert gaps[1] < 0.75 * gaps[0]  # C lambda -> e - 1
        assert gaps[1] < 0.5

    def test_cross_solver_oracle(self):
        params, C, rescaled, _ = picard_solution(3, 0, 0.1)
        _, _, shoot_prof = shoot_solution(3, 0, 0.1)
        r_ie, u_ie = ieq.as_radial(rescaled, params)
        mask = (r_ie >= 1.0) & (r_ie <= 50.0)
        u_sh = PchipInterpolator(shoot_prof.r_grid, shoot_prof.u)(r_ie[mask])
        assert np.max(np.abs(u_ie[mask] - u_sh)) <= 1e-6

    def test_non_integer_n_cross_solver(self):
        from lagerstrom.ode_shoot import shoot
        params = ModelParams(n=2.5, eps=0.1)
        C, prof_ie, _ = solve_C(params)
        c_star, prof_sh = shoot(params)
        r_ie, u_ie = ieq.as_radial(prof_ie, params)
        mask = (r_ie >= 1.0) & (r_ie <= 50.0)
        u_sh = PchipInterpolator(prof_sh.r_grid, prof_sh.u)(r_ie[mask])
        assert np.max(np.abs(u_ie[mask] - u_sh)) <= 1e-6

    def test_general_f_equals_constant_k(self):
        params_g = ModelParams(n=2, eps=0.1,
                               nonlinearity=GeneralF(f=lambda u: 1.0))
        C_g, _, _ = solve_C(params_g)
        _, C_k, _, _ = picard_solution(2, 1, 0.1)
        assert C_g == pytest.approx(C_k, abs=1e-8)

    def test_n_below_two_rejected(self):
        with pytest.raises(DomainError):
            solve_C(ModelParams(n=1.5, eps=0.1))

    def test_weight_stays_in_paper_envelope(self):
        params, _, profile, _ = picard_solution(2, 1, 0.1)
        g = profile.values
        u = profile.u(params)
        nz = np.abs(g) > 1e-14
        weight = (u[nz] - 1.0) / g[nz]
        assert np.all(weight >= 0.0) and np.all(weight <= 1.0)


class TestPhiDiagnostic:
    def test_zero_C(self):
        assert phi_diagnostic(params_for(3, 0, 0.1), 0.0) == 0.0

    def test_closed_form_value(self):
        phi = phi_diagnostic(params_for(3, 0, 0.1), 1.0)
        expected = 0.1 * (sf.exp_integral(1.0, 0.1)
                          - 0.1 * sf.exp_integral(2.0, 0.1))
        assert phi == pytest.approx(expected, rel=1e-13)
        assert phi == pytest.approx(0.11003789362253702, rel=1e-12)

    def test_against_quadrature(self):
        phi = phi_diagnostic(params_for(3, 0, 0.1), 1.0)
        quad = sf.quad_adaptive(lambda t: sf.exp_integral(2.0, t),
                                0.1, math.inf, 1e-11)
        assert phi == pytest.approx(0.1 * quad.value, abs=1e-10)

    def test_vanishes_with_eps_above_two(self):
        phis = [phi_diagnostic(params_for(3, 0, e), 1.0)
                for e in (0.1, 1e-2, 1e-3)]
        assert phis[0] > phis[1] > phis[2]
        assert phis[2] < 0.01

    def test_validation(self):
        with pytest.raises(DomainError):
            phi_diagnostic(params_for(3, 0, 0.1), -1.0)
        with pytest.raises(DomainError):
            phi_diagnostic(ModelParams(n=1.5, eps=0.1), 1.0)


class TestSeriesTerms:
    def test_first_term_closed_form(self):
        params = params_for(3, 0, 0.05)
        terms = series_terms(params, 1.3, 0.2, 1)
        expected = -1.3 * 0.05 * sf.exp_integral(2.0, 0.2)
        assert terms == [pytest.approx(expected, rel=1e-13)]

    @pytest.mark.parametrize("rho", np.geomspace(0.02, 5.0, 10).tolist())
    def test_second_term_exact_identity_n2(self, rho):
        # C^2 (2 E_1(2 rho) - e^-rho E_1(rho)) for the n = 2, k = 0 case
        params = params_for(2, 0, 0.01)
        C = 0.8
        t2 = series_terms(params, C, rho, 2)[1]
        closed = C ** 2 * (2.0 * sf.exp_integral(1.0, 2.0 * rho)
                           - math.exp(-rho) * sf.exp_integral(1.0, rho))
        assert t2 == pytest.approx(closed, rel=1e-7, abs=1e-12)

    def test_second_term_small_rho_asymptote(self):
        params = params_for(2, 0, 1e-4)
        C = 1.0
        rho = 1e-3
        t2 = series_terms(params, C, rho, 2)[1]
        asym = -math.log(rho) - 0.5772156649015329 - 2.0 * math.log(2.0)
        assert abs(t2 - asym) <= 0.015

    def test_partial_sums_approach_fixed_point(self):
        params, C, profile, diags = picard_solution(3, 0, 0.1)
        phi = diags.phi
        for order, cap in ((1, 10.0), (2, 10.0), (3, 10.0)):
            worst = 0.0
            for rho in (0.1, 0.5, 1.0):
                i = int(np.searchsorted(profile.rho_grid, rho))
                partial = sum(series_terms(params, C,
                                           float(profile.rho_grid[i]), order))
                worst = max(worst, abs(profile.values[i] - partial))
            assert worst <= cap * phi ** (order + 1)

    def test_k1_prefactors_scale_the_same_integrals(self):
        rho, C = 0.5, 0.9
        t2_k0 = series_terms(params_for(2, 0, 0.01), C, rho, 2)[1]
        f1_k1 = series_terms(params_for(2, 1, 0.01), C, rho, 2)[1]
        assert f1_k1 == pytest.approx(t2_k0 / math.e, rel=1e-12)

    def test_k1_has_five_terms(self):
        params = params_for(2, 1, 0.05)
        terms = series_terms(params, 0.5, 0.3, 5, quad_tol=1e-8)
        assert len(terms) == 5
        # the squared-kernel term is the positive one among the cubic-order
        # trio, the nested one is negative at small rho
        assert terms[2] > 0.0

    def test_order_validation(self):
        with pytest.raises(UnsupportedParameterError):
            series_terms(params_for(2, 0, 0.05), 1.0, 0.1, 5)
        with pytest.raises(UnsupportedParameterError):
            series_terms(params_for(2, 0, 0.05), 1.0, 0.1, 0)
        params_g = ModelParams(n=2, eps=0.05,
                               nonlinearity=GeneralF(f=lambda u: 1.0 + u))
        with pytest.raises(UnsupportedParameterError):
            series_terms(params_g, 1.0, 0.1, 3)
        with pytest.raises(DomainError):
            series_terms(params_for(2, 0, 0.05), 1.0, 0.01, 1)  # rho < eps

    def test_general_f_second_order_weight(self):
        params_g = ModelParams(n=2, eps=0.01,
                               nonlinearity=GeneralF(f=lambda u: 1.0))
        rho, C = 0.5, 0.9
        t_g = series_terms(params_g, C, rho, 2)
        t_k = series_terms(params_for(2, 1, 0.01), C, rho, 2)
        assert t_g[1] == pytest.approx(t_k[1], rel=1e-6)
