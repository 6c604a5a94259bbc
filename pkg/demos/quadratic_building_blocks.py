"""Building blocks over a biquadratic extension.

Walks through the Burnside ring of C2 x C2, the classes of quasi-split tori
and Weil restrictions of P1, and the norm-one torus of a quadratic subfield.
Run with ``python3 demos/quadratic_building_blocks.py``.
"""
from motivic_tori import GSet, default_context, marks, norm_one_quadratic_class
from motivic_tori import quasi_split_class, weil_restriction_p1_class
from motivic_tori.groups import burnside_mul
from motivic_tori.ring import format_element, format_poly

ctx = default_context()
group = ctx.group
K, E1, E2, E12 = (ctx.cls(n) for n in ("K", "E1", "E2", "E12"))

# %% The Burnside ring
# [E1] is the class of Spec E1, i.e. the G-set C2^2 / <s1>.
# Two different quadratic subfields multiply to the biquadratic field.
print("[E1]*[E2]   =", format_element(burnside_mul(E1, E2), ctx))
print("[E1]*[E1]   =", format_element(burnside_mul(E1, E1), ctx))

# Marks detect elements: a class is zero iff all its marks vanish.
c = 2 + K - E1 - E2 - E12
print("marks of", format_element(c, ctx), "=", marks(c))

# %% Quasi-split tori
# R_{L/k} Gm for the regular G-set.
print("{R_K Gm}    =", format_poly(quasi_split_class(GSet.regular(group)), ctx))
# Weil restriction of P1 along one quadratic subfield.
coset = GSet.transitive(group, ctx.labels.index("E12"))
print("{R_E12 P1}  =", format_poly(weil_restriction_p1_class(coset), ctx))

# %% Norm-one torus of a quadratic extension
res = norm_one_quadratic_class(group, ctx.labels.index("E12"))
print("{R1_E12 Gm} =", format_poly(res.value, ctx), "| stably rational:", res.stably_rational)
for step in res.trace:
    print("   ", step.rule, "->", step.output)
