"""Exact identities of the exponential-integral family, checked against
adaptive quadrature.

Everything the expansion machinery relies on reduces to a handful of
closed-form facts:  int_rho^inf E_q = E_{q-1} - rho E_q, the reduction
E_2 = e^-rho/rho - E_1, the convolution value int_0^inf e^-s E_1 = log 2,
int_0^inf E_1^2 = 2 log 2, and the defining integral of Euler's constant.
"""

from lagerstrom import identity_suite

report = identity_suite(tol=1e-8)

width = max(len(c.name) for c in report.checks)
print(f"{'check':<{width}} {'measured':>20} {'reference':>20} {'ok':>4}")
for c in report.checks:
    print(f"{c.name:<{width}} {c.measured:20.14f} {c.reference:20.14f} "
          f"{'yes' if c.passed else 'NO':>4}")

print(f"\n{len(report.checks)} checks, all passed: {report.all_passed()}")

# reports serialize for regression pipelines
print("\nCSV head:")
print("\n".join(report.to_csv().splitlines()[:4]))
