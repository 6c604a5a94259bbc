"""Classes of tori and classifying stacks.

The rules here turn lattice-level data (verified exact sequences, permutation
certificates) into classes in ``B(G)[L]`` and its special-denominator fraction
ring, recording every application as a :class:`DerivationStep`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import threading

from . import intmat
from .errors import (
    BadPayload, BadSequence, NotQuadratic, NotQuasiSplit, NotSpecial, RuleScopeError,
)
from .groups import BurnsideElement, GSet, burnside_normal_form, orbit_decompose
from .lattice import (
    GaloisLattice, Verdict, augmentation_map, dual_lattice, check_iso_certificate, diagonal_quotient_lattice,
    find_iso_certificate, find_permutation_basis, permutation_lattice, sign_lattice,
    sum_zero_lattice, sublattice, trivial_lattice, verify_exact_sequence,
)
from .ring import (
    ArtinPolynomial, SpecialFactor, StackClass, divmod_monic, exact_divide, format_poly,
    format_stack, induce_poly,
)

VERIFIED = "VERIFIED"
AXIOM = "AXIOM"

# Facts the engine uses but cannot check; each AXIOM step names one of these.
AXIOM_STATEMENTS = {
    "P1-fixed-point": "z -> 1/z fixes z = 1, so the twisted conic has a rational point "
                      "and is therefore isomorphic to P^1.",
    "P1xP1-ruling": "Automorphisms of P^1 x P^1 preserve the two rulings, so after untwisting "
                    "the inversion the remaining swap of factors over E12 gives the Weil "
                    "restriction of P^1 from E12.",
    "rank-2-rational": "Every algebraic torus of dimension 2 is rational.",
}


@dataclass(frozen=True)
class DerivationStep:
    rule: str
    premises: tuple
    side_conditions: tuple
    output: str
    value: object = None
    justification: str = VERIFIED
    quote: str = ""
    axioms: tuple = ()

    def __post_init__(self):
        if self.justification == AXIOM and not (self.quote and self.axioms):
            raise ValueError("AXIOM steps need an axiom id and a statement of the assumed fact")
        if self.justification == VERIFIED and any(v != "pass" for _, v in self.side_conditions):
            raise ValueError("VERIFIED steps may only cite passed checks")

    def to_json(self, ctx=None):
        out = {
            "rule": self.rule,
            "premises": list(self.premises),
            "side_conditions": [{"check": c, "verdict": v} for c, v in self.side_conditions],
            "output": self.output,
            "justification": self.justification if self.justification == VERIFIED
            else f"AXIOM({self.quote})",
        }
        if self.axioms:
            out["axioms"] = list(self.axioms)
        if self.value is not None:
            out["value"] = format_value(self.value, ctx)
        return out


def format_value(v, ctx=None):
    if isinstance(v, ArtinPolynomial):
        return format_poly(v, ctx)
    if isinstance(v, StackClass):
        return format_stack(v, ctx)
    return str(v)


@dataclass
class ClassResult:
    """A computed class with its stable-rationality flag and derivation trace."""

    name: str
    value: object
    stably_rational: str = "unknown"
    provenance: str = ""
    trace: tuple = ()
    lattice: GaloisLattice | None = None


def merge_traces(*parts):
    """Concatenate traces, keeping the first occurrence of every step."""
    seen, out = set(), []
    for part in parts:
        for step in part:
            key = (step.rule, step.output)
            if key not in seen:
                seen.add(key)
                out.append(step)
    return tuple(out)


def _check(name, ok):
    return (name, "pass" if ok else "fail")


# -- quasi-split and P^1 classes ---------------------------------------------

_QS_CACHE = {}
_QS_LOCK = threading.Lock()


def _subset_orbits(gset, include_full):
    n = gset.size
    full = (1 << n) - 1
    perms = [gset.element_perm(i) for i in range(gset.group.order)]

    def image(p, mask):
        out = 0
        for i in range(n):
            if mask >> i & 1:
                out |= 1 << p[i]
        return out

    seen, orbits = set(), []
    for mask in range(full + 1):
        if mask in seen or (mask == full and not include_full):
            continue
        orbit = {image(p, mask) for p in perms}
        seen |= orbit
        stabs = {}
        for m in sorted(orbit):
            stabs[m] = frozenset(i for i, p in enumerate(perms) if image(p, m) == m)
        orbits.append((sorted(orbit), stabs))
    return orbits


def _as_subgroup_set(gset, mask, label):
    """The subset ``mask`` as a set for the registry subgroup of ``label``."""
    group = gset.group
    sub = group.subgroup_group(label)
    points = [i for i in range(gset.size) if mask >> i & 1]
    where = {x: k for k, x in enumerate(points)}
    action = []
    for h in sub.generators:
        p = gset.element_perm(group.index(h))
        action.append([where[p[x]] for x in points])
    return GSet(sub, action)


def quasi_split_class(gset):
    """Class of R_{A/F}(Gm) for the etale algebra A of ``gset``.

    Stratifying affine space A^S by the support of a point gives
    ``L^|S| = sum over G-orbits of subsets S' of Ind_{Stab S'} qs(S')``;
    the full subset is isolated on the left and every other term recurses on a
    strictly smaller set.
    """
    key = (gset.group, burnside_normal_form(gset).coeffs)
    with _QS_LOCK:
        hit = _QS_CACHE.get(key)
    if hit is not None:
        return hit
    group = gset.group
    result = ArtinPolynomial.lefschetz(group) ** gset.size
    for orbit, stabs in _subset_orbits(gset, include_full=False):
        label = group.class_of(next(iter(stabs.values())))
        rep_elems = group.subgroup(label).elements
        mask = next(m for m in orbit if stabs[m] == rep_elems)
        piece = quasi_split_class(_as_subgroup_set(gset, mask, label))
        result = result - induce_poly(group, label, piece)
    with _QS_LOCK:
        _QS_CACHE.setdefault(key, result)
    return result


def weil_restriction_p1_class(gset):
    """Class of R_{A/F}(P^1): cells A^{S'} x {infinity}^{S - S'} grouped by orbit."""
    group = gset.group
    coeffs = [BurnsideElement.zero(group) for _ in range(gset.size + 1)]
    for orbit, stabs in _subset_orbits(gset, include_full=True):
        k = bin(orbit[0]).count("1")
        label = group.class_of(stabs[orbit[0]])
        coeffs[k] = coeffs[k] + BurnsideElement.basis(group, label)
    return ArtinPolynomial(group, coeffs)


def twist_of_induced_strata(gset, payload):
    """Sum over orbits of the payload over the stabilizer, induced up.

    ``payload`` maps a stabilizer class label to an ArtinPolynomial over
    ``group.subgroup_group(label)`` (a dict or a callable).
    """
    group = gset.group
    total = ArtinPolynomial(group)
    for _, label in orbit_decompose(gset):
        p = payload(label) if callable(payload) else payload.get(label)
        sub = group.subgroup_group(label)
        if p is None or p.group != sub:
            raise BadPayload(f"payload for stabilizer class {label} is missing or over the wrong group")
        total = total + induce_poly(group, label, p)
    return total


# -- registry ------------------------------------------------------------------

class SpecialRegistry:
    """Named special tori usable as denominators (quasi-split, with certificates)."""

    def __init__(self, group):
        self.group = group
        self._entries = {}
        self._lock = threading.Lock()

    def register_quasi_split(self, name, gset):
        factor = SpecialFactor.quasi_split(name, gset)
        with self._lock:
            self._entries.setdefault(name, factor)
            return self._entries[name]

    def register_gm(self, name="Gm"):
        return self.register_quasi_split(name, GSet.trivial(self.group, 1))

    def get(self, name):
        try:
            return self._entries[name]
        except KeyError:
            raise NotSpecial(f"{name} is not a registered special torus") from None

    def __contains__(self, name):
        return name in self._entries

    def names(self):
        return sorted(self._entries)


# -- presentations -------------------------------------------------------------

@dataclass(frozen=True)
class TorusPresentation:
    """A torus given as quasi-split (G-set), norm-one quadratic (subgroup) or by lattice."""

    kind: str
    name: str
    gset: GSet | None = None
    subgroup: int | None = None
    lattice: GaloisLattice | None = None
    group: object = None

    def __post_init__(self):
        if self.kind == "quasi-split" and self.gset is None:
            raise ValueError("quasi-split presentation needs a G-set")
        if self.kind == "norm-one-quadratic":
            g = self.group
            if g is None or self.subgroup is None:
                raise ValueError("norm-one presentation needs a group and a subgroup")
            if 2 * g.subgroup(self.subgroup).order != g.order:
                raise NotQuadratic("norm-one quadratic torus needs an index-2 subgroup")
        if self.kind == "lattice" and self.lattice is None:
            raise ValueError("lattice presentation needs a lattice")
        if self.kind not in ("quasi-split", "norm-one-quadratic", "lattice"):
            raise ValueError(f"unknown presentation kind {self.kind!r}")

    def character_lattice(self):
        if self.kind == "quasi-split":
            return permutation_lattice(self.gset, self.name)
        if self.kind == "norm-one-quadratic":
            return sign_lattice(self.group, self.subgroup, self.name)
        return self.lattice


# -- sequences -------------------------------------------------------------------

@dataclass
class TorusSequence:
    """``1 -> sub -> middle -> quot -> 1`` through character lattices.

    The lattice sequence is ``0 -> X(quot) -> X(middle) -> X(sub) -> 0`` with
    maps ``inclusion`` and ``restriction``.  For a finite ``sub`` pass
    ``restriction=None``: then ``inclusion`` must be injective of finite index
    and its cokernel is the character group of ``sub``.
    """

    inclusion: object
    restriction: object = None
    names: tuple = ("sub", "middle", "quot")

    def verify(self):
        if self.restriction is not None:
            return verify_exact_sequence([self.inclusion, self.restriction])
        m = self.inclusion.matrix
        failures = []
        if m.shape[0] != m.shape[1]:
            failures.append((1, "finite kernel needs equal ranks"))
            return Verdict(False, failures)
        d = intmat.det(m)
        if d == 0:
            failures.append((0, "inclusion not injective"))
        invariants, _, _ = intmat.smith(m)
        return Verdict(not failures, failures,
                       {"index": abs(d), "cokernel": [x for x in invariants if x != 1]})

    @property
    def sub_lattice(self):
        return self.restriction.target if self.restriction is not None else None

    @property
    def middle_lattice(self):
        return self.inclusion.target

    @property
    def quot_lattice(self):
        return self.inclusion.source


def _same_lattice(a, b):
    if a == b:
        return True
    return find_iso_certificate(a, b, bound=1, budget=2000).certificate is not None


def _perm_certified(lattice, gset):
    """Whether ``lattice`` is the permutation lattice of ``gset`` (up to certificate)."""
    if gset is None:
        found = find_permutation_basis(lattice)
        return found.status == "found", found.gset
    target = permutation_lattice(gset)
    if lattice.rank != target.rank:
        return False, gset
    if check_iso_certificate(lattice, target, intmat.identity(lattice.rank)).ok:
        return True, gset
    found = find_permutation_basis(lattice)
    ok = found.status == "found" and burnside_normal_form(found.gset) == burnside_normal_form(gset)
    return ok, gset


# -- rules ---------------------------------------------------------------------

RATIONAL_RANK_ONE = "rank-one tori are rational"


def norm_one_quadratic_class(group, h):
    """Class of R^1_{E/F}(Gm) for the quadratic algebra E of the index-2 subgroup ``h``."""
    if 2 * group.subgroup(h).order != group.order:
        raise NotQuadratic(f"subgroup class {h} does not have index 2")
    s = GSet.transitive(group, h)
    qs = quasi_split_class(s)
    L = ArtinPolynomial.lefschetz(group)
    res_seq = TorusSequence(
        sublattice(permutation_lattice(s), _sum_zero_basis(2), "X(R_E/Gm)")[1],
        augmentation_map(s),
    )
    seq_ok = res_seq.verify().ok
    norm_one = diagonal_quotient_lattice(s, "X(R^1_E)")
    quotient = sum_zero_lattice(s, "X(R_E/Gm)")
    iso = find_iso_certificate(norm_one, quotient, bound=1)
    value = exact_divide(qs, L - 1)
    expected = L - BurnsideElement.basis(group, h) + 1
    checks = (
        _check("resolution 0 -> X(R_E/Gm) -> Z[G/H] -> Z -> 0 exact", seq_ok),
        _check("X(R^1_E) ~= X(R_E/Gm) by certificate", iso.certificate is not None),
        _check("class equals L - [E] + 1", value == expected),
    )
    if any(v != "pass" for _, v in checks):
        raise BadSequence(f"norm-one rule failed: {checks}")
    name = f"R1[{h}]"
    step = DerivationStep("norm_one_quadratic", (f"R_E[{h}]", "Gm"), checks, name, value)
    return ClassResult(name, value, "yes", RATIONAL_RANK_ONE, (step,), sign_lattice(group, h, name))


def _sum_zero_basis(n):
    b = intmat.zeros(n, n - 1)
    for i in range(n - 1):
        b[i, i] = 1
        b[n - 1, i] = -1
    return b


def diagonal_sign_class(lattice, name="T"):
    """Class of a torus whose lattice is diagonal with +-1 entries.

    Each diagonal character is trivial (a factor Gm) or a sign character with
    an index-2 kernel (a norm-one quadratic torus).
    """
    group, r = lattice.group, lattice.rank
    if any(m[i, j] != 0 for m in lattice.action for i in range(r) for j in range(r) if i != j):
        raise NotQuasiSplit(f"{name}: lattice is not diagonal")
    L = ArtinPolynomial.lefschetz(group)
    value = ArtinPolynomial.constant(group, 1)
    trace, premises = [], []
    for k in range(r):
        kernel = frozenset(i for i in range(group.order) if lattice.element_matrix(i)[k, k] == 1)
        label = group.class_of(kernel)
        if label == group.full_label:
            value = value * (L - 1)
            premises.append("Gm")
        else:
            piece = norm_one_quadratic_class(group, label)
            value = value * piece.value
            trace.extend(piece.trace)
            premises.append(piece.name)
    step = DerivationStep("product_of_rank_one", tuple(premises),
                          (_check("lattice is diagonal with +-1 entries", True),), name, value)
    return ClassResult(name, value, "yes", "product of rational tori is rational",
                       merge_traces(trace, [step]), lattice)


def fixed_point_untwist(stratum, action, group):
    """A twisted P^1 with a rational fixed point is P^1, class ``L + 1``."""
    if stratum != "P1":
        raise RuleScopeError(f"untwisting applies to P1 strata only, not {stratum!r}")
    if action not in ("inversion", "trivial"):
        raise RuleScopeError(f"unsupported action {action!r}")
    value = ArtinPolynomial.lefschetz(group) + 1
    if action == "trivial":
        step = DerivationStep("fixed_point_untwist", ("P1/trivial",), (), "P1", value)
    else:
        step = DerivationStep("fixed_point_untwist", ("P1/inversion",), (), "P1", value,
                              AXIOM, AXIOM_STATEMENTS["P1-fixed-point"], ("P1-fixed-point",))
    return ClassResult("P1", value, "yes", "P^1 is rational", (step,))


def _matches(lattice, class_lattice, certificate):
    if class_lattice is None:
        return True
    if certificate is not None:
        return check_iso_certificate(lattice, class_lattice, certificate).ok
    return _same_lattice(lattice, class_lattice)


def _gm_kernel(seq):
    sub = seq.sub_lattice
    return sub is not None and sub == trivial_lattice(seq.middle_lattice.group)


def gm_torsor_factor(seq, class_y, name, certificate=None):
    """``{X} = (L - 1) {Y}`` for ``1 -> Gm -> X -> Y -> 1``.

    ``certificate`` (optional) identifies the quotient lattice of ``seq`` with
    the lattice recorded on ``class_y``.
    """
    verdict = seq.verify()
    group = seq.middle_lattice.group
    gm_ok = _gm_kernel(seq)
    base_ok = _matches(seq.quot_lattice, class_y.lattice, certificate)
    checks = (
        _check("lattice sequence exact", verdict.ok),
        _check("kernel is Gm (trivial rank-one lattice)", gm_ok),
        _check(f"quotient lattice matches {class_y.name}", base_ok),
    )
    if any(v != "pass" for _, v in checks):
        raise BadSequence(f"{name}: {checks} {verdict.failures}")
    L = ArtinPolynomial.lefschetz(group)
    value = (L - 1) * class_y.value if isinstance(class_y.value, ArtinPolynomial) \
        else StackClass.of(class_y.value) * (L - 1)
    step = DerivationStep("gm_torsor_factor", (class_y.name, "Gm"), checks, name, value)
    flag = class_y.stably_rational
    prov = "Gm-torsor over a stably rational base" if flag == "yes" else ""
    return ClassResult(name, value, flag, prov, merge_traces(class_y.trace, [step]),
                       seq.middle_lattice)


def class_and_Bdual_from_resolution(seq, registry, sub_gset=None, middle_gset=None,
                                    names=("T1", "T2", "T")):
    """From ``1 -> T1 -> T2 -> T -> 1`` with quasi-split flanks:
    ``{T} = {T2}/{T1}`` and ``{B T'} = {T1}/{T2}`` for the dual ``T'``."""
    n1, n2, nt = names
    verdict = seq.verify()
    if seq.restriction is None or not verdict.ok:
        raise BadSequence(f"{nt}: resolution is not an exact sequence of tori {verdict.failures}")
    ok1, g1 = _perm_certified(seq.sub_lattice, sub_gset)
    ok2, g2 = _perm_certified(seq.middle_lattice, middle_gset)
    if not (ok1 and ok2):
        raise NotQuasiSplit(f"{nt}: flank not certified quasi-split ({n1}: {ok1}, {n2}: {ok2})")
    t1 = registry.register_quasi_split(n1, g1)
    t2 = registry.register_quasi_split(n2, g2)
    frac = StackClass(t2.poly, (t1,))
    q, r = divmod_monic(t2.poly, t1.poly)
    value = q if r.is_zero() else frac
    checks = (
        _check("lattice sequence exact", True),
        _check(f"{n1} permutation lattice", True),
        _check(f"{n2} permutation lattice", True),
        _check("quotient re-multiplies to dividend", r.is_zero() and q * t1.poly == t2.poly),
    ) if r.is_zero() else (
        _check("lattice sequence exact", True),
        _check(f"{n1} permutation lattice", True),
        _check(f"{n2} permutation lattice", True),
    )
    step_t = DerivationStep("resolution_class", (n1, n2), checks, nt, value)
    bdual = StackClass(t1.poly, (t2,))
    bname = f"B({nt})'"
    step_b = DerivationStep("resolution_Bdual", (n1, n2), checks[:3], bname, bdual)
    t_res = ClassResult(nt, value, "yes", "quotient of quasi-split tori with a quasi-split "
                        "resolution", (step_t,), seq.quot_lattice)
    b_res = ClassResult(bname, bdual, "yes",
                        "dual of a torus with a quasi-split resolution: classifying stack "
                        "is stably rational", (step_t, step_b), dual_lattice(seq.quot_lattice))
    return t_res, b_res


def bn_from_special_sequence(seq, registry, middle_name, class_h, name="BN"):
    """``{BN} = {H}/{G}`` for ``1 -> N -> G -> H -> 1`` with ``G`` registered special."""
    middle = registry.get(middle_name)
    verdict = seq.verify()
    if not verdict.ok:
        raise BadSequence(f"{name}: sequence not exact {verdict.failures}")
    cert = middle.certificate
    mid_ok = isinstance(cert, GSet) and _perm_certified(seq.middle_lattice, cert)[0]
    if not mid_ok:
        raise NotSpecial(f"{middle_name}: middle lattice does not match the registered torus")
    base_ok = class_h.lattice is None or _same_lattice(class_h.lattice, seq.quot_lattice)
    checks = (
        _check("sequence exact" if seq.restriction is not None
               else f"finite kernel, cokernel {verdict.details.get('cokernel')}", True),
        _check(f"{middle_name} special (quasi-split certificate)", True),
        _check(f"quotient lattice matches {class_h.name}", base_ok),
    )
    if not base_ok:
        raise BadSequence(f"{name}: quotient lattice does not match {class_h.name}")
    value = StackClass.of(class_h.value) * StackClass(ArtinPolynomial.constant(middle.poly.group, 1),
                                                      (middle,))
    step = DerivationStep("bn_from_special_sequence", (class_h.name, middle_name), checks, name, value)
    return ClassResult(name, value, "unknown", "", merge_traces(class_h.trace, [step]))


def quotient_from_special_sequence(seq, registry, middle_name, class_bn, name, certificate=None):
    """``{H} = {BN} {G}`` for ``1 -> N -> G -> H -> 1`` with ``G`` special.

    ``class_bn`` must carry the character lattice of ``N``; the result is
    reduced to a polynomial when the denominators cancel exactly.
    """
    middle = registry.get(middle_name)
    verdict = seq.verify()
    if seq.restriction is None or not verdict.ok:
        raise BadSequence(f"{name}: sequence not exact {verdict.failures}")
    if not (isinstance(middle.certificate, GSet)
            and _perm_certified(seq.middle_lattice, middle.certificate)[0]):
        raise NotSpecial(f"{middle_name}: middle lattice does not match the registered torus")
    kernel_ok = _matches(seq.sub_lattice, class_bn.lattice, certificate)
    if not kernel_ok:
        raise BadSequence(f"{name}: kernel lattice does not match {class_bn.name}")
    frac = StackClass.of(class_bn.value) * StackClass(middle.poly)
    red = frac.reduced()
    value = red.num if not red.den else red
    checks = (
        _check("sequence exact", True),
        _check(f"{middle_name} special (quasi-split certificate)", True),
        _check(f"kernel lattice matches {class_bn.name}", True),
        _check("reduced form equals {BN}*{G} by cross-multiplication", StackClass.of(value) == frac),
    )
    step = DerivationStep("quotient_from_special_sequence", (class_bn.name, middle_name),
                          checks, name, value)
    return ClassResult(name, value, "unknown", "", merge_traces(class_bn.trace, [step]),
                       seq.quot_lattice)


def gm_torsor_base(seq, class_x, name):
    """``{Y} = {X} / (L - 1)`` for ``1 -> Gm -> X -> Y -> 1``, by exact division."""
    verdict = seq.verify()
    group = seq.middle_lattice.group
    mid_ok = _matches(seq.middle_lattice, class_x.lattice, None)
    if not (verdict.ok and _gm_kernel(seq) and mid_ok):
        raise BadSequence(f"{name}: not a verified Gm-extension of {class_x.name}")
    L = ArtinPolynomial.lefschetz(group)
    value = exact_divide(class_x.value, L - 1)
    checks = (
        _check("lattice sequence exact", True),
        _check("kernel is Gm (trivial rank-one lattice)", True),
        _check(f"middle lattice matches {class_x.name}", True),
        _check("quotient re-multiplies to dividend", value * (L - 1) == class_x.value),
    )
    step = DerivationStep("gm_torsor_base", (class_x.name, "Gm"), checks, name, value)
    return ClassResult(name, value, "unknown", "", merge_traces(class_x.trace, [step]),
                       seq.quot_lattice)


def quasi_split_result(gset, name, registry=None):
    """Wrap :func:`quasi_split_class` as a traced result (optionally registering it)."""
    value = quasi_split_class(gset)
    if registry is not None:
        registry.register_quasi_split(name, gset)
    checks = (_check("monic of degree |S|", value.is_monic() and value.degree == gset.size),)
    step = DerivationStep("quasi_split_class", (), checks, name, value)
    return ClassResult(name, value, "yes", "quasi-split tori are rational", (step,),
                       permutation_lattice(gset, name))


def torus_class(pres):
    """Class of a presented torus, when one of the rules applies."""
    if pres.kind == "quasi-split":
        return quasi_split_result(pres.gset, pres.name)
    if pres.kind == "norm-one-quadratic":
        return norm_one_quadratic_class(pres.group, pres.subgroup)
    lat = pres.lattice
    found = find_permutation_basis(lat)
    if found.status == "found":
        return quasi_split_result(found.gset, pres.name)
    return diagonal_sign_class(lat, pres.name)


def torus_charpoly(lattice, g):
    """``det(q I - rho(g))`` for group element index ``g`` (lowest degree first)."""
    return intmat.charpoly(lattice.element_matrix(g))
