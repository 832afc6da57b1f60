"""Solutions of beta(phi(x)) = lambda beta(x) over an Abel chart.

For holonomy tangent to the identity the solution space is huge: one
never-vanishing base solution times any smooth periodic function of Abel
time.  This script builds the base solution, the Fourier modes, a
synthesized solution with geometrically decaying coefficients, and
measures the eigen-equation residuals.
"""

import math

import numpy as np

from schroeder import (
    FlowGenerated,
    LambdaBranch,
    VectorFieldGen,
    base_solution,
    eval_solution,
    fourier_basis,
    synthesize,
    verify_residual,
)

gen = VectorFieldGen.poly(2, 0.0)
phi = FlowGenerated(gen)
chart = phi.chart

# lambda = e makes the base solution exp(t(x)) = exp(1 - 1/x) explicit.
branch = LambdaBranch.principal(math.e)
beta0 = base_solution(branch, chart)
print("beta*(1)    =", eval_solution(beta0, 1.0), " (normalized at x0)")
print("beta*(0.5)  =", eval_solution(beta0, 0.5), " (exact: e**-1)")
print("beta*(0.25) =", eval_solution(beta0, 0.25), "(exact: e**-3)")
print("beta*(0)    =", eval_solution(beta0, 0.0), "  (flat extension)")

# Each integer l picks another branch of log(lambda); the corresponding
# eigenfunction winds l times per fundamental domain.
b1 = fourier_basis(branch, chart, 1)
x = chart.flow_map(0.25, chart.x0)   # a quarter of a fundamental domain
print("\nmode-1 / mode-0 ratio a quarter period in:",
      eval_solution(b1, x) / eval_solution(beta0, x))
print("(expected: e**(i pi / 2) = i)")

# A general solution is a rapidly decreasing combination of the modes.
coeffs = {l: 2.0 ** (-abs(l)) for l in range(-10, 11)}
beta = synthesize(branch, chart, coeffs)
grid = np.geomspace(1e-3, 0.9 * chart.blowup_x(), 64)
report = verify_residual(beta, phi, grid)
print("\n21-mode synthesis, relative residual:",
      report.check_value("max_residual_rel").value)

# Complex multipliers work the same way; the solution simply spirals.
spiral = synthesize(LambdaBranch.principal(2 + 1j), chart, coeffs)
report = verify_residual(spiral, phi, grid)
print("lambda = 2+i, relative residual:    ",
      report.check_value("max_residual_rel").value)

print("\nsample values down the half line:")
for x in (0.8, 0.4, 0.2, 0.1, 0.05):
    v = eval_solution(beta, x)
    print(f"  x={x:<6} |beta| = {abs(v):.6e}")
