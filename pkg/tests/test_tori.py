from concurrent.futures import ThreadPoolExecutor
import random

import pytest

from motivic_tori import biquadratic as bq
from motivic_tori import intmat
from motivic_tori.errors import BadPayload, BadSequence, NotQuadratic, NotSpecial, RuleScopeError
from motivic_tori.groups import BurnsideElement, GSet, PermGroup
from motivic_tori.lattice import LatticeMap, permutation_lattice, trivial_lattice
from motivic_tori.ring import ArtinPolynomial, cyclic_specialization
from motivic_tori.tori import (
    AXIOM, DerivationStep, SpecialRegistry, TorusSequence, bn_from_special_sequence,
    diagonal_sign_class, fixed_point_untwist, gm_torsor_factor, norm_one_quadratic_class,
    quasi_split_class, quasi_split_result, twist_of_induced_strata, weil_restriction_p1_class,
)

G = bq.klein_group()
L = ArtinPolynomial.lefschetz(G)
K, E1, E2, E12 = (BurnsideElement.basis(G, i) for i in range(4))


def _orbit_lengths(s, g):
    perm = s.element_perm(g)
    seen, out = set(), []
    for x in range(s.size):
        if x in seen:
            continue
        n, y = 0, x
        while True:
            seen.add(y)
            y, n = perm[y], n + 1
            if y == x:
                break
        out.append(n)
    return out


def _poly_from_orbits(lengths, sign):
    out = (1,)
    for n in lengths:
        f = [sign] + [0] * (n - 1) + [1]
        prod = [0] * (len(out) + len(f) - 1)
        for i, a in enumerate(out):
            for j, b in enumerate(f):
                prod[i + j] += a * b
        out = tuple(prod)
    return out


def _random_gset(rng, group, max_pieces=3):
    labels = [rng.randrange(len(group.subgroups)) for _ in range(rng.randint(1, max_pieces))]
    return GSet.from_labels(group, labels)


def test_regular_class_value():
    assert quasi_split_class(GSet.regular(G)) == (
        L ** 4 - K * L ** 3 + (3 * K - E1 - E2 - E12) * L ** 2 - K * L + (-1 - K + E1 + E2 + E12))


def test_quasi_split_is_multiplicative():
    rng = random.Random(11)
    done = 0
    while done < 20:
        a, b = _random_gset(rng, G, 2), _random_gset(rng, G, 2)
        if a.size + b.size > 8:
            continue
        done += 1
        assert quasi_split_class(a + b) == quasi_split_class(a) * quasi_split_class(b)


@pytest.mark.parametrize("group", [bq.klein_group(), bq.quadratic_group(),
                                   PermGroup(3, [[1, 2, 0]]), PermGroup(3, [[1, 0, 2], [1, 2, 0]])])
def test_point_counts_of_quasi_split_and_p1(group):
    rng = random.Random(5)
    sets = [GSet.transitive(group, i) for i in range(len(group.subgroups))]
    sets += [_random_gset(rng, group) for _ in range(5)]
    for s in sets:
        qs, p1 = quasi_split_class(s), weil_restriction_p1_class(s)
        lat = permutation_lattice(s)
        for g in range(group.order):
            lengths = _orbit_lengths(s, g)
            assert cyclic_specialization(qs, g) == _poly_from_orbits(lengths, -1)
            assert cyclic_specialization(qs, g) == tuple(intmat.charpoly(lat.element_matrix(g)))
            assert cyclic_specialization(p1, g) == _poly_from_orbits(lengths, 1)


def test_quasi_split_cache_is_thread_safe():
    sets = [GSet.regular(G), bq.index_set(), bq.pair_set(), GSet.transitive(G, 3)] * 8
    expected = [quasi_split_class(s) for s in sets]
    with ThreadPoolExecutor(max_workers=8) as pool:
        got = list(pool.map(quasi_split_class, sets))
    assert got == expected


def test_norm_one_quadratic():
    res = norm_one_quadratic_class(G, 3)
    assert res.value == L - E12 + 1
    assert res.stably_rational == "yes"
    assert all(v == "pass" for _, v in res.trace[-1].side_conditions)
    with pytest.raises(NotQuadratic):
        norm_one_quadratic_class(G, 0)


def test_diagonal_sign_class():
    res = diagonal_sign_class(bq.diagonal_target(), "S'")
    assert res.value == (L - E1 + 1) * (L - E2 + 1) * (L - E12 + 1)


def test_fixed_point_untwist():
    res = fixed_point_untwist("P1", "inversion", G)
    assert res.value == L + 1
    assert res.trace[0].justification == AXIOM and res.trace[0].axioms == ("P1-fixed-point",)
    with pytest.raises(RuleScopeError):
        fixed_point_untwist("P2", "inversion", G)
    with pytest.raises(RuleScopeError):
        fixed_point_untwist("P1", "translation", G)


def test_twist_payload_must_match_stabilizer():
    s = GSet.regular(G)
    with pytest.raises(BadPayload):
        twist_of_induced_strata(s, {})
    with pytest.raises(BadPayload):
        twist_of_induced_strata(s, lambda lab: L)


def test_derivation_step_invariants():
    with pytest.raises(ValueError):
        DerivationStep("r", (), (), "x", justification=AXIOM)
    with pytest.raises(ValueError):
        DerivationStep("r", (), (("check", "fail"),), "x")


def test_gm_torsor_needs_gm_kernel():
    s = GSet.regular(G)
    lat = permutation_lattice(s)
    seq = TorusSequence(LatticeMap(lat, lat, intmat.identity(4)), None)
    base = quasi_split_result(s, "R")
    with pytest.raises(BadSequence):
        gm_torsor_factor(seq, base, "X")


def test_bn_needs_registered_middle():
    reg = SpecialRegistry(G)
    s = GSet.regular(G)
    lat = permutation_lattice(s)
    seq = TorusSequence(LatticeMap(lat, lat, 2 * intmat.identity(4)), None)
    base = quasi_split_result(s, "R")
    with pytest.raises(NotSpecial):
        bn_from_special_sequence(seq, reg, "R", base)
    reg.register_quasi_split("R", s)
    res = bn_from_special_sequence(seq, reg, "R", base, "BA")
    assert res.value == 1


def test_bn_rejects_quotient_mismatch():
    reg = SpecialRegistry(G)
    s = GSet.regular(G)
    reg.register_quasi_split("R", s)
    lat = permutation_lattice(s)
    seq = TorusSequence(LatticeMap(lat, lat, 2 * intmat.identity(4)), None)
    wrong = quasi_split_result(bq.index_set(), "R_E")
    with pytest.raises(BadSequence):
        bn_from_special_sequence(seq, reg, "R", wrong)


def test_gm_registration():
    reg = SpecialRegistry(G)
    gm = reg.register_gm()
    assert gm.poly == L - 1 and "Gm" in reg
    assert trivial_lattice(G) == permutation_lattice(GSet.trivial(G, 1))
