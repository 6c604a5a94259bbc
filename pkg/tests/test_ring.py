import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from motivic_tori import biquadratic as bq
from motivic_tori.errors import MixedContexts, NotDivisible, ParseError, UnsoundDenominator
from motivic_tori.groups import BurnsideElement, GSet
from motivic_tori.ring import (
    ArtinPolynomial, GaloisContext, SpecialFactor, StackClass, context_from_json,
    cyclic_specialization, divmod_monic, exact_divide, format_element, format_poly, is_zero,
    parse_element, stack_equal,
)
from motivic_tori.scenarios import default_context, quadratic_context

G = bq.klein_group()
coeff = st.lists(st.integers(-3, 3), min_size=5, max_size=5).map(lambda c: BurnsideElement(G, c))
polys = st.lists(coeff, min_size=0, max_size=4).map(lambda cs: ArtinPolynomial(G, cs))


@settings(max_examples=40, deadline=None)
@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == ArtinPolynomial(G)


@settings(max_examples=40, deadline=None)
@given(polys, polys)
def test_divmod_monic_reconstructs(a, b):
    d = ArtinPolynomial.lefschetz(G) ** 2 + ArtinPolynomial(G, [b.coeff(0), b.coeff(1)])
    q, r = divmod_monic(a, d)
    assert q * d + r == a
    assert r.degree < d.degree


@settings(max_examples=40, deadline=None)
@given(polys)
def test_specialization_is_a_ring_map(a):
    L = ArtinPolynomial.lefschetz(G)
    b = L - BurnsideElement.basis(G, 3) + 1
    for g in range(G.order):
        lhs = cyclic_specialization(a * b, g)
        x, y = cyclic_specialization(a, g), cyclic_specialization(b, g)
        prod = [0] * (len(x) + len(y) - 1) if x and y else []
        for i, u in enumerate(x):
            for j, v in enumerate(y):
                prod[i + j] += u * v
        while prod and prod[-1] == 0:
            prod.pop()
        assert lhs == tuple(prod)


def test_exact_divide_raises_with_remainder():
    L = ArtinPolynomial.lefschetz(G)
    with pytest.raises(NotDivisible) as exc:
        exact_divide(L ** 2 + 1, L - 1)
    assert exc.value.remainder == ArtinPolynomial.constant(G, 2)


def test_parse_format_roundtrip():
    ctx = default_context()
    rng = random.Random(7)
    for _ in range(50):
        a = BurnsideElement(G, [rng.randint(-4, 4) for _ in range(5)])
        assert parse_element(ctx, format_element(a, ctx)) == a


@pytest.mark.parametrize("text", ["", "2+", "[X]", "[K", "2 [K] [E1]"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_element(default_context(), text)


def test_format_poly():
    ctx = default_context()
    L = ctx.L
    assert format_poly(L ** 2 + ctx.cls("E12") * L + 1, ctx) == "L^2 + [E12]*L + 1"


def test_zero_test_uses_marks():
    ctx = default_context()
    c = 2 + ctx.cls("K") - ctx.cls("E1") - ctx.cls("E2") - ctx.cls("E12")
    zt = is_zero(ArtinPolynomial(G, [0, c]), ctx)
    assert not zt.zero and zt.degree == 1 and zt.marks == (0, 0, 0, 0, 2)
    assert zt.verdict == "nonzero"


def test_verdict_marked_model_only_without_axioms():
    ctx = GaloisContext(G, bq.FIELD_LABELS, coefficient_independence=False)
    t = stack_equal(StackClass(ctx.L), StackClass(ctx.L + 1), ctx)
    assert t.verdict == "UNEQUAL (model only)"


def test_mixed_contexts_rejected():
    with pytest.raises(MixedContexts):
        is_zero(ArtinPolynomial.lefschetz(G), quadratic_context())


def test_special_factor_requires_certificate():
    L = ArtinPolynomial.lefschetz(G)
    with pytest.raises(UnsoundDenominator):
        SpecialFactor("fake", L + 1, GSet.trivial(G, 1))
    with pytest.raises(UnsoundDenominator):
        StackClass(L, ("not a factor",))
    ok = SpecialFactor.quasi_split("Gm", GSet.trivial(G, 1))
    assert ok.poly == L - 1


def test_stack_class_arithmetic():
    L = ArtinPolynomial.lefschetz(G)
    gm = SpecialFactor.quasi_split("Gm", GSet.trivial(G, 1))
    x = StackClass(L - 1, (gm,))
    assert x == 1
    assert x.reduced().den == ()
    assert StackClass(L, (gm,)) + StackClass(L, (gm,)) == StackClass(2 * L, (gm,))
    assert StackClass(L - 1).inverse_via(ArtinPolynomial.constant(G, 1), [gm]) * (L - 1) == 1
    with pytest.raises(UnsoundDenominator):
        StackClass(L).inverse_via(L - 1, [gm])


def test_stack_equal_witness_is_sign_normalized():
    ctx = default_context()
    a, b = StackClass(ctx.L), StackClass(ctx.L + ctx.cls("K"))
    assert stack_equal(a, b, ctx).zero_test.marks == stack_equal(b, a, ctx).zero_test.marks


def test_context_from_json():
    data = {"group": {"degree": 4, "generators": [[1, 0, 2, 3], [0, 1, 3, 2]], "names": ["s1", "s2"]},
            "labels": {"E1": ["s1"], "E2": ["s2"], "E12": ["s1*s2"], "K": [], "F": ["s1", "s2"]}}
    ctx = context_from_json(json.loads(json.dumps(data)))
    assert ctx.labels == bq.FIELD_LABELS
    with pytest.raises(ParseError):
        context_from_json({"group": {"generators": []}})
