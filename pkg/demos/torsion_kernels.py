"""Classifying stacks of n-torsion in norm-one tori.

For a quasi-split torus the n-torsion has trivial stack class.  The norm-one
case is subtler: for the quartic algebra E = E1 x E2 and n = 4 the class
factors as {G}{BG}, which is not 1.  For n = 2 no rule in the library
decides it, and the report says so.
"""
from motivic_tori import default_context
from motivic_tori.scenarios import scenario_torsion_kernels, torsion_gset

ctx = default_context()

for name in ("E1", "E", "split"):
    for n in (2, 3, 4):
        rep = scenario_torsion_kernels(torsion_gset(ctx, name), n, ctx, name)
        bad = [a for a in rep.assertions if a.verdict != "pass"]
        status = "ok" if not bad else bad[0].verdict
        print(f"{name:>5} n={n}: {status}")
        for a in bad:
            w = a.witness
            # a mark vector settles the question; otherwise the reason is given
            print("        ", a.name, "->", w.get("marks") or w.get("reason") or "see Tate invariants")
