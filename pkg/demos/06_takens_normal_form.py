"""Polynomial normal forms for germs tangent to the identity.

A germ x + c_n x**n + ... with c_n > 0 reduces, by a polynomial change
of coordinates, to x + x**n + alpha x**(2n-1): a single residual modulus
alpha survives.  For time-1 maps of x**n + a x**(2n-1) the two
coefficients are linked by alpha = a + n/2.
"""

from fractions import Fraction

from schroeder import FlowGenerated, JetData, VectorFieldGen, takens_normalize

# Jets of the time-1 map of x**2 + a x**3, computed exactly (rational
# arithmetic) from the Lie series of the generator.
for a in (Fraction(-1), Fraction(0), Fraction(1, 2)):
    phi = FlowGenerated(VectorFieldGen.poly(2, float(a)))
    jets = phi.jets(3)
    nf = takens_normalize(jets)
    print(f"a = {str(a):>4}: jets {tuple(map(str, jets.coefficients))}"
          f"  ->  alpha = {nf.alpha}  (a + n/2 = {a + 1})")

# A germ needing a rescaling: x + 2x**2 + 5x**3.  The conjugacy is the
# scaling by 1/2 and alpha comes out exactly.
jets = JetData((0, Fraction(1), Fraction(2), Fraction(5)))
nf = takens_normalize(jets)
print("\nx + 2x^2 + 5x^3:")
print("  n =", nf.n, " alpha =", nf.alpha)
print("  conjugacy jets:", tuple(map(str, nf.conjugacy_jets.coefficients)))

# Higher tangency with an elimination step: degree 4 must be killed
# before alpha can be read off degree 5.
jets = JetData((0, Fraction(1), 0, Fraction(1), Fraction(2), Fraction(7)))
nf = takens_normalize(jets)
print("\nx + x^3 + 2x^4 + 7x^5:")
print("  n =", nf.n, " alpha =", nf.alpha)
print("  conjugacy jets:", tuple(map(str, nf.conjugacy_jets.coefficients)))

# Normal forms are fixed points of the reduction.
again = takens_normalize(JetData((0, 1, 1, nf.alpha)))
print("\nreducing x + x^2 + alpha x^3 again returns alpha =", again.alpha)
