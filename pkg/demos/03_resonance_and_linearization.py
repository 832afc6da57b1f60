"""The hyperbolic side: linear holonomy, resonance, Koenigs coordinates.

When phi'(0) = mu > 1 the eigen equation is rigid: nonzero solutions
exist only at resonances lambda = mu**n, and then the space is exactly
one-dimensional, spanned by the n-th power of the linearizing
coordinate.
"""

import numpy as np

from schroeder import (
    PolynomialMap,
    classify_resonance,
    hyperbolic_solution,
    jet_constraints,
    koenigs,
)

# phi = 2x + x**2 = (1+x)**2 - 1 has the closed-form linearizer log(1+x).
phi = PolynomialMap((0, 2.0, 1.0))
print("Koenigs coordinate vs log(1+x):")
for x in (0.1, 0.3, 0.5):
    print(f"  sigma({x}) = {koenigs(phi, x):.15f}   "
          f"log1p = {np.log1p(x):.15f}")

# The conjugacy sigma(phi(x)) = 2 sigma(x) is the defining property.
worst = max(abs(koenigs(phi, phi(x)) - 2 * koenigs(phi, x))
            for x in np.linspace(0.01, 0.5, 20))
print("conjugacy residual:", worst)

# Resonance scan: which multipliers admit any solution at all.
print("\nresonance classification for mu = 2:")
for lam in (2.0, 3.0, 4.0, 4.1, 8.0, 4 + 0.001j):
    print(f"  lambda = {lam}: {classify_resonance(2.0, lam)}")

# The Taylor recursion mu**k b_k = lambda b_k tells the same story
# degree by degree: all coefficients are forced to zero except at the
# resonant degree.
print("\njet constraints for mu = 2, lambda = 8:")
for k, forced in jet_constraints(2.0, 8.0, 6):
    print(f"  degree {k}: {'forced zero' if forced else 'free'}")

# At the resonance lambda = 4 = mu**2 the solution is sigma(x)**2.
print("\nresonant solution at lambda = 4:")
for x in (0.25, 0.5):
    val = hyperbolic_solution(phi, 4.0, x)
    print(f"  beta({x}) = {val.real:.12f}   (log1p(x)**2 = "
          f"{np.log1p(x)**2:.12f})")

# Off resonance the only solution is zero; asking politely returns it.
print("off-resonance value:", hyperbolic_solution(phi, 3.0, 0.5))
