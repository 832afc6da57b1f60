"""Flat extensions: every solution vanishes to infinite order at 0.

For holonomy tangent to the identity, solutions on (0, oo) extend by 0
to smooth functions flat at the origin.  The finite-difference decay
table below is the numerically testable face of that statement: each
derivative column collapses as x walks toward 0, while the hyperbolic
solution x**2 (the negative control) keeps a stubborn second column.
"""

import math

from schroeder import (
    AbelChart,
    LambdaBranch,
    VectorFieldGen,
    base_solution,
    verify_flatness,
)


def show(report, label):
    print(f"\n{label}")
    header = "      x " + "".join(f"{('|d%d|' % k):>12}" for k in range(1, 6))
    print(header)
    for row in report.tables["derivatives"]:
        cells = "".join(f"{row.get('d%d' % k, 0.0):>12.3e}"
                        for k in range(1, 6))
        print(f"{row['x']:>8.4f}{cells}")
    print("verdict:", "pass" if report.passed else "fail")


branch = LambdaBranch.principal(math.e)
grid = [0.1, 0.05, 0.025, 0.0125, 0.00625]

# Quadratic generator: derivatives decay like exp(-1/(2x)) times a
# rational prefactor.  Note the prefactor makes |d_k| hump near
# x = 1/(2k) before the exponential wins, so the grid starts past it.
chart = AbelChart(VectorFieldGen.poly(2, 0.0))
show(verify_flatness(base_solution(branch, chart), 5, grid),
     "base solution over rho = x**2:")

# Flat generator: the collapse is far more violent; most table entries
# underflow to exact zeros.
flat = AbelChart(VectorFieldGen.flat())
show(verify_flatness(base_solution(branch, flat), 5,
                     [0.2, 0.1, 0.05, 0.025, 0.0125]),
     "base solution over rho = exp(-1/x):")

# Negative control: x**2 is a perfectly good resonant solution for
# linear holonomy but is NOT flat; its second derivative column sits
# at 2 and the verdict rejects it.
control = verify_flatness(lambda x: x * x, 2, [0.2, 0.1, 0.05, 0.025, 0.0125])
print("\nnegative control x**2, order-2 column:",
      [f"{row['d2']:.3f}" for row in control.tables["derivatives"]])
print("verdict:", "pass" if control.passed else "fail")
