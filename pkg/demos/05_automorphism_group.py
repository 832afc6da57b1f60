"""The automorphism group of a Reeb component, computed.

Boundary-compatible automorphisms are triples (a, b, t): a leafwise
scaling a, a translation part b solving the eigen equation, and a flow
time t in the centralizer of the holonomy, taken modulo the deck
relation (a, b, t) ~ (lam a, lam b, t+1).  Composition, inversion and
normalization act exactly on coefficients.
"""

import math

import numpy as np

from schroeder import (
    BoundaryClass,
    ReebData,
    VectorFieldGen,
    base_solution,
    compose,
    fiber_product,
    identity_element,
    invert,
    normalize,
    restrict_boundary,
    section,
    synthesize,
    verify_lemma_conditions,
)
from schroeder.autgroup import AutElement
from schroeder.errors import BoundaryMismatch

data = ReebData.from_flow(VectorFieldGen.poly(2, 0.0), math.e)
branch, chart = data.branch, data.chart

# Two elements: a pure scaling and a kernel translation.
scaling = AutElement(data=data, a=2j, b=data.zero_translation(), t=0.0)
kernel = AutElement(data=data, a=1.0 + 0j,
                    b=base_solution(branch, chart), t=0.0)

# Conjugating a translation by a scaling divides its coefficients by a.
conj = compose(invert(scaling), compose(kernel, scaling))
print("conjugated translation coefficients:", conj.b.layers)
print("(the base coefficient 1 divided by a = 2j)")

# Normalization: flow times live in [0, 1); pushing t past 1 trades a
# full deck turn for a factor lambda on the linear and translation parts.
f = AutElement(data=data, a=1.0 + 0j, b=base_solution(branch, chart), t=1.25)
n = normalize(f)
print("\nnormalize t=1.25 ->", f"t={n.t}, a={n.a:.6f}")

# The structural conditions of a lift, verified on a grid.
g = normalize(AutElement(data=data, a=1.5 + 0j,
                         b=synthesize(branch, chart, {0: 1.0, 1: 0.25}),
                         t=0.7))
report = verify_lemma_conditions(g, np.geomspace(1e-3, 0.9, 24))
for c in report.checks:
    print(f"  {c.name}: {c.value:.3e}  {'ok' if c.passed else 'FAIL'}")

# Restriction to the boundary torus only remembers a modulo lam**Z.
print("\nboundary classes:")
c1 = restrict_boundary(section(2.0, data))
c2 = restrict_boundary(section(2.0 * math.e, data))
print("  a=2 and a=2e agree:", c1.isclose(c2))

# The splitting section pairs a scaling with the flow time log|a|/log|lam|.
s = section(math.exp(0.5), data)
print("  section flow time for |a| = e**0.5:", s.t)

# Pasting two components along the boundary: automorphism pairs match
# exactly when their boundary classes coincide.
other = ReebData.from_flow(VectorFieldGen.poly(2, 0.5), math.e)
pair = fiber_product(section(2.0, data), section(2.0 * math.e**2, other))
print("\ndeck-shifted pair accepted:", pair is not None)
try:
    fiber_product(section(2.0, data), section(3.0, other))
except BoundaryMismatch as exc:
    print("class-distinct pair rejected, distance:", f"{exc.distance:.4f}")
