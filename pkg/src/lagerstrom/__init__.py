"""Numerical laboratory for the Lagerstrom model boundary-value problem

    u'' + (n-1)/r u' + eps u u' + f(u) u'^2 = 0,  u(1) = 0, u(inf) = 1,

solved by three independent routes that cross-verify each other:

* `ode_shoot`   - shooting on the exactly reduced first-order system,
* `integral_eq` - Picard iteration on the rescaled integral equation,
* `asymptotics` - closed-form small-eps expansions for (n, k) in
                  {(2, 0), (3, 0), (2, 1)}.

`specfun` supplies the exponential-integral family and the adaptive
quadrature oracle; `verify` holds the cross-validation harness; `cli` the
command-line front end (`lagerstrom --help`).
"""

from . import asymptotics, integral_eq, ode_shoot, specfun, verify
from .asymptotics import CaseId, ExpansionCoefficients, c_asym, coefficients, inner_u, outer_u
from .integral_eq import (IterationDiagnostics, PicardConfig, RescaledProfile,
                          phi_diagnostic, picard_rhs, picard_solve,
                          series_terms, solve_C)
from .ode_shoot import (ConstantK, GeneralF, ModelParams, ShootingConfig,
                        SolutionProfile, extract_C, integrate_ivp, shoot,
                        tail_u_infinity)
from .specfun import (QuadratureResult, euler_gamma, exp_integral,
                      integral_of_E, quad_adaptive, small_rho_expansion,
                      upper_incomplete_gamma)
from .verify import (ErrorMetrics, Report, compare_profiles, coefficient_fit,
                     identity_suite, monotonicity_suite, order_estimate)

__version__ = "0.1.0"
