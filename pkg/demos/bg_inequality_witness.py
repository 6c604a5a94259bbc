"""Why {BG} is not the inverse of {G}.

The product {BG} {G} - 1 is a polynomial in L whose first nonzero
coefficient is a Burnside element with a nonzero mark.  Because the powers of
L are assumed independent over the Burnside ring, that mark is enough.
"""
from motivic_tori import ArtinPolynomial, StackClass, default_context, stack_equal
from motivic_tori.ring import format_element
from motivic_tori.scenarios import KleinClasses, scenario_bg_inequality

ctx = default_context()
k = KleinClasses(ctx)

# %% The zero test
test = stack_equal(StackClass.of(k.BG().value) * k.G().value, StackClass.of(ArtinPolynomial.constant(k.group, 1)), ctx)
zt = test.zero_test
print("verdict:", test.verdict)
print("lowest nonzero degree:", zt.degree)
print("coefficient:", format_element(zt.coefficient, ctx))
print("marks:", zt.marks)

# %% The full report, with the derivation trace
print()
print(scenario_bg_inequality(2, ctx).render_text())
