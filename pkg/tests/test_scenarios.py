import json

import pytest

from motivic_tori import biquadratic as bq
from motivic_tori.errors import UnsupportedParameter
from motivic_tori.ring import ArtinPolynomial, GaloisContext, StackClass, dumps, stack_equal
from motivic_tori.scenarios import (
    Assertion, KleinClasses, boundary_strata, quadratic_context, torsion_gset, run,
    scenario_torsion_kernels, scenario_bg_inequality, scenario_finite_kernel, scenario_torus_T,
)
from motivic_tori.tori import AXIOM


def test_boundary_strata_orbits(ctx):
    strata = boundary_strata(ctx.group)
    pts1, z1 = strata["Z1"]
    orbits = {frozenset(pts1[i] for i in orb) for orb in z1.orbits()}
    assert orbits == {frozenset({("0", "0"), ("inf", "inf")}), frozenset({("0", "inf"), ("inf", "0")})}
    stabs = {ctx.labels[ctx.group.class_of(z1.stabilizer(orb[0]))] for orb in z1.orbits()}
    assert stabs == {"E1", "E2"}
    _, z2 = strata["Z2"]
    assert len(z2.orbits()) == 1


def test_strata_route_matches_division_route(ctx):
    rep = scenario_torus_T(ctx)
    assert rep.assertion("strata route agrees with division route").verdict == "pass"
    assert rep.assertion("Z1 twist = [K] (stated)").verdict == "discrepancy"
    assert rep.assertion("stated polynomial passes the charpoly oracle").verdict == "discrepancy"


def test_witness_does_not_depend_on_T_constant(ctx):
    # changing the constant of {T} moves only the low coefficients of {G} = (L - 1){T}
    k = KleinClasses(ctx)
    L = k.L
    bg = k.BG().value
    one = StackClass(ArtinPolynomial.constant(k.group, 1))
    stated_T = L ** 2 + (k.cls["E12"] - k.cls["K"]) * L + 1
    results = []
    for T in (k.T().value, stated_T):
        t = stack_equal(bg * ((L - 1) * T), one, ctx)
        results.append((t.verdict, t.zero_test.degree, t.zero_test.coefficient, t.zero_test.marks))
    assert results[0] == results[1]
    assert results[0][3] == (0, 0, 0, 0, 2)


def test_odd_torsion_rejected(ctx):
    with pytest.raises(UnsupportedParameter):
        scenario_finite_kernel(ctx=ctx, n=3)
    assert scenario_finite_kernel(ctx=ctx, n=6).parameters["m"] == 3


def test_scenarios_need_klein_group():
    with pytest.raises(UnsupportedParameter):
        scenario_bg_inequality(2, quadratic_context())


def test_assertion_needs_witness():
    with pytest.raises(ValueError):
        Assertion("x", "fail")
    with pytest.raises(ValueError):
        Assertion("x", "maybe")


def test_model_only_verdicts_without_axioms():
    ctx = GaloisContext(bq.klein_group(), bq.FIELD_LABELS, field_independence=False)
    rep = scenario_bg_inequality(1, ctx)
    assert rep.assertion("{BG} != {G}^-1").detail == "UNEQUAL (model only)"
    assert "A2=False" in rep.render_text()


def test_custom_labels_are_used_in_reports():
    labels = ("K", "Q(i)", "Q(sqrt2)", "Q(sqrt-2)", "Q")
    ctx = GaloisContext(bq.klein_group(), labels)
    text = scenario_bg_inequality(1, ctx).render_text()
    classes = text.split("classes:")[1].split("derivation:")[0]
    assert "[Q(sqrt-2)]" in classes and "[E12]" not in classes


@pytest.mark.parametrize("name", ["basics", "lemma-t", "thm15", "thm16", "remark"])
def test_report_structure(ctx, name):
    for rep in run(name, ctx):
        data = rep.to_json()
        text = dumps(data)
        assert dumps(json.loads(text)) == text
        assert set(data) >= {"scenario", "parameters", "assertions", "axioms", "steps"}
        outputs = [s.output for s in rep.steps]
        for i, step in enumerate(rep.steps):
            assert not set(step.premises) & set(outputs[i + 1:]), step
        used = {a for s in rep.steps if s.justification == AXIOM for a in s.axioms}
        assert {a["id"] for a in data["axioms"]} == used
        for a in rep.assertions:
            assert a.verdict == "pass" or a.witness is not None


def test_torsion_counterexample_for_quartic_E(ctx):
    rep = scenario_torsion_kernels(torsion_gset(ctx, "E"), 4, ctx, "E")
    a = rep.assertion("{BA'} = 1 for A' = R1_L[n]")
    assert a.verdict == "fail"
    assert a.witness["marks"] == [0, 0, 0, 0, 2]
    k = KleinClasses(ctx)
    assert rep.classes["BA'"].value == StackClass.of(k.G().value) * k.BG().value


def test_torsion_undecided_case_reports_tate_invariants(ctx):
    rep = scenario_torsion_kernels(torsion_gset(ctx, "E"), 2, ctx, "E")
    a = rep.assertion("{BA'} = 1 for A' = R1_L[n]")
    assert a.verdict == "fail" and "tate_invariants" in a.witness
    assert "BA'" not in rep.classes


@pytest.mark.parametrize("algebra", ["E1", "E12", "split", "K"])
def test_torsion_trivial_when_degree_prime_to_n(ctx, algebra):
    rep = scenario_torsion_kernels(torsion_gset(ctx, algebra), 3, ctx, algebra)
    assert rep.ok(strict=True)
