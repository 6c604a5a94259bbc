"""Polynomials in the Lefschetz class with Burnside-ring coefficients, their
fractions with special monic denominators, and the zero/equality test.

An :class:`ArtinPolynomial` is an element of ``B(G)[L]``.  A
:class:`StackClass` is a fraction whose denominator is a product of
:class:`SpecialFactor` entries: classes of quasi-split tori (or ``L``), each
recomputed from its certificate at construction.  Monic polynomials are
non-zero-divisors over any coefficient ring, so equality of fractions is
decided by cross-multiplication.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import json
import re

from .errors import MixedContexts, NotDivisible, ParseError, UnsoundDenominator
from .groups import BurnsideElement, GSet, PermGroup, induce, marks


class ArtinPolynomial:
    """Polynomial in ``L`` with BurnsideElement coefficients (lowest degree first)."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group, coeffs=()):
        cs = []
        for c in coeffs:
            if isinstance(c, int):
                c = BurnsideElement.one(group) * c
            if c.group != group:
                raise MixedContexts("coefficient over a different group")
            cs.append(c)
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("ArtinPolynomial is immutable")

    @classmethod
    def lefschetz(cls, group):
        return cls(group, [0, 1])

    @classmethod
    def constant(cls, group, c):
        return cls(group, [c])

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def coeff(self, k):
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return BurnsideElement.zero(self.group)

    def leading(self):
        return self.coeffs[-1] if self.coeffs else BurnsideElement.zero(self.group)

    def is_zero(self):
        return not self.coeffs

    def is_monic(self):
        return bool(self.coeffs) and self.coeffs[-1] == BurnsideElement.one(self.group)

    def _coerce(self, other):
        if isinstance(other, ArtinPolynomial):
            if other.group != self.group:
                raise MixedContexts("polynomials over different groups")
            return other
        if isinstance(other, (int, BurnsideElement)):
            return ArtinPolynomial(self.group, [other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        return ArtinPolynomial(self.group, [self.coeff(k) + other.coeff(k) for k in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return ArtinPolynomial(self.group, [-c for c in self.coeffs])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return ArtinPolynomial(self.group)
        out = [BurnsideElement.zero(self.group)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return ArtinPolynomial(self.group, out)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = ArtinPolynomial.constant(self.group, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, BurnsideElement)):
            other = ArtinPolynomial(self.group, [other])
        if not isinstance(other, ArtinPolynomial):
            return NotImplemented
        return self.group == other.group and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.group, self.coeffs))

    def __repr__(self):
        return f"ArtinPolynomial({format_poly(self)})"

    def map_coefficients(self, fn, group):
        return ArtinPolynomial(group, [fn(c) for c in self.coeffs])


def poly_arith(a, b, op):
    """``op`` is one of ``"add"``, ``"sub"``, ``"mul"``."""
    return {"add": a.__add__, "sub": a.__sub__, "mul": a.__mul__}[op](b)


def induce_poly(group, label, p):
    """Coefficientwise induction from subgroup class ``label``."""
    return ArtinPolynomial(group, [induce(group, label, c) for c in p.coeffs])


def divmod_monic(a, d):
    """Quotient and remainder of ``a`` by a monic ``d``."""
    if a.group != d.group:
        raise MixedContexts("polynomials over different groups")
    if not d.is_monic():
        raise ValueError("divisor must be monic in L")
    rem = list(a.coeffs)
    k = d.degree
    q = [BurnsideElement.zero(a.group)] * max(len(rem) - k, 0)
    for i in range(len(rem) - 1, k - 1, -1):
        c = rem[i]
        if c.is_zero():
            continue
        q[i - k] = c
        for j, dc in enumerate(d.coeffs):
            rem[i - k + j] = rem[i - k + j] - c * dc
    return ArtinPolynomial(a.group, q), ArtinPolynomial(a.group, rem[:k])


def exact_divide(a, d):
    q, r = divmod_monic(a, d)
    if not r.is_zero():
        raise NotDivisible(f"remainder {format_poly(r)}", remainder=r, quotient=q)
    return q


# -- contexts ------------------------------------------------------------------

DEFAULT_PROVENANCE = {
    "A1": "Over a field finitely generated over Q, a polynomial in L with "
          "coefficients in the span of Artin classes vanishes only if every "
          "coefficient vanishes (the l-adic cyclotomic character has infinite image).",
    "A2": "Classes of pairwise distinct finite separable field extensions of F are "
          "linearly independent, so the Burnside ring embeds into K0(Var_F).",
}


@dataclass(frozen=True)
class GaloisContext:
    """A group together with field names for its subgroup classes and axiom flags."""

    group: PermGroup
    labels: tuple
    coefficient_independence: bool = True
    field_independence: bool = True
    provenance: dict = field(default_factory=lambda: dict(DEFAULT_PROVENANCE), compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        if len(labels) != len(self.group.subgroups) or len(set(labels)) != len(labels):
            raise ParseError("one distinct label per subgroup class is required")
        object.__setattr__(self, "labels", labels)

    @property
    def axioms_hold(self):
        return self.coefficient_independence and self.field_independence

    @property
    def L(self):
        return ArtinPolynomial.lefschetz(self.group)

    @property
    def one(self):
        return BurnsideElement.one(self.group)

    def label_of(self, name):
        try:
            return self.labels.index(name)
        except ValueError:
            raise ParseError(f"unknown field label {name!r}") from None

    def cls(self, name):
        """The Artin class of the field called ``name``."""
        return BurnsideElement.basis(self.group, self.label_of(name))

    def transitive(self, name):
        return GSet.transitive(self.group, self.label_of(name))

    def parse_element(self, text):
        return parse_element(self, text)

    def format_element(self, a):
        return format_element(a, self)

    def format_poly(self, p):
        return format_poly(p, self)


def default_labels(group):
    n = len(group.subgroups)
    return tuple("F" if i == n - 1 else ("K" if i == 0 else f"H{i}") for i in range(n))


_TERM = re.compile(r"\s*([+-])?\s*(\d+)?\s*\*?\s*(?:\[(\w+)\])?\s*")


def parse_element(ctx, text):
    """Parse a signed sum such as ``"2 + [K] - [E1] - 3*[E12]"``."""
    out = BurnsideElement.zero(ctx.group)
    pos, text = 0, text.strip()
    if not text:
        raise ParseError("empty element")
    while pos < len(text):
        m = _TERM.match(text, pos)
        if (not m or m.end() == pos or (m.group(2) is None and m.group(3) is None)
                or (pos and m.group(1) is None)):
            raise ParseError(f"cannot parse element at column {pos + 1}: {text[pos:]!r}")
        sign = -1 if m.group(1) == "-" else 1
        n = int(m.group(2)) if m.group(2) else 1
        term = ctx.cls(m.group(3)) if m.group(3) else ctx.one
        out = out + term * (sign * n)
        pos = m.end()
    return out


def format_element(a, ctx=None):
    labels = ctx.labels if ctx is not None else default_labels(a.group)
    full = a.group.full_label
    order = [full] + [i for i in range(len(a.coeffs)) if i != full]
    parts = []
    for i in order:
        c = a.coeffs[i]
        if not c:
            continue
        body = str(abs(c)) if i == full else (f"[{labels[i]}]" if abs(c) == 1 else f"{abs(c)}*[{labels[i]}]")
        parts.append(("-" if c < 0 else "+", body))
    if not parts:
        return "0"
    s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        s += f" {sign} {body}"
    return s


def format_poly(p, ctx=None):
    """Descending powers of L, e.g. ``L^2 + [E12]*L + 1``."""
    terms = []
    for k in range(p.degree, -1, -1):
        c = p.coeffs[k]
        if c.is_zero():
            continue
        text = format_element(c, ctx)
        power = "" if k == 0 else ("L" if k == 1 else f"L^{k}")
        single = len(c.coefficients) == 1
        neg = single and text.startswith("-")
        body = text[1:] if neg else text
        if not power:
            piece = body if single else f"({body})"
        elif single and body == "1":
            piece = power
        else:
            piece = f"{body}*{power}" if single else f"({body})*{power}"
        terms.append(("-" if neg else "+", piece))
    if not terms:
        return "0"
    s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, piece in terms[1:]:
        s += f" {sign} {piece}"
    return s


def context_from_json(data):
    """Build a context from ``{"group": {...}, "labels": {...}, "axioms": {...}}``."""
    try:
        gd = data["group"]
        group = PermGroup(gd["degree"], gd["generators"], gd.get("names"))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"context.group: missing or malformed field {exc}") from None
    labels = list(default_labels(group))
    for name, words in data.get("labels", {}).items():
        labels[group.class_of(group.subgroup_from_words(words))] = name
    ax = data.get("axioms", {})
    return GaloisContext(group, tuple(labels), bool(ax.get("A1", True)), bool(ax.get("A2", True)))


def gset_from_json(ctx, data):
    """``{"transitive": [{"stabilizer": ["s1"]}, ...]}`` or ``{"action": [[...], ...]}``."""
    group = ctx.group
    if "action" in data:
        return GSet(group, data["action"])
    try:
        pieces = data["transitive"]
    except KeyError:
        raise ParseError("gset needs 'transitive' or 'action'") from None
    out = GSet.trivial(group, 0)
    for i, piece in enumerate(pieces):
        try:
            words = piece["stabilizer"]
        except (KeyError, TypeError):
            raise ParseError(f"gset.transitive[{i}]: missing 'stabilizer'") from None
        out = out + GSet.transitive(group, group.class_of(group.subgroup_from_words(words)))
    return out


# -- zero test -----------------------------------------------------------------

@dataclass
class ZeroTest:
    """Result of :func:`is_zero`; the witness is the leading nonzero coefficient."""

    zero: bool
    sound: bool
    degree: int = -1
    coefficient: BurnsideElement | None = None
    marks: tuple | None = None

    @property
    def verdict(self):
        word = "zero" if self.zero else "nonzero"
        return word if self.sound else f"{word} (model only)"


def is_zero(a, ctx):
    if a.group != ctx.group:
        raise MixedContexts("polynomial and context over different groups")
    for k in range(a.degree, -1, -1):
        mk = marks(a.coeffs[k])
        if any(mk):
            return ZeroTest(False, ctx.axioms_hold, k, a.coeffs[k], mk)
    return ZeroTest(True, ctx.axioms_hold)


# -- fractions -----------------------------------------------------------------

@dataclass(frozen=True)
class SpecialFactor:
    """A registered monic denominator: a quasi-split torus class or ``L``.

    ``certificate`` is the G-set of the quasi-split torus, or the string
    ``"L"``.  The polynomial is recomputed from the certificate and must match.
    """

    name: str
    poly: ArtinPolynomial
    certificate: object

    def __post_init__(self):
        from .tori import quasi_split_class

        if not self.poly.is_monic():
            raise UnsoundDenominator(f"{self.name}: denominator is not monic")
        if isinstance(self.certificate, GSet):
            if quasi_split_class(self.certificate) != self.poly:
                raise UnsoundDenominator(f"{self.name}: polynomial does not match its certificate")
        elif self.certificate == "L":
            if self.poly != ArtinPolynomial.lefschetz(self.poly.group):
                raise UnsoundDenominator(f"{self.name}: certificate L but polynomial differs")
        else:
            raise UnsoundDenominator(f"{self.name}: unknown certificate {self.certificate!r}")

    @classmethod
    def quasi_split(cls, name, gset):
        from .tori import quasi_split_class

        return cls(name, quasi_split_class(gset), gset)

    def __hash__(self):
        return hash((self.name, self.poly))

    def __eq__(self, other):
        return isinstance(other, SpecialFactor) and (self.name, self.poly) == (other.name, other.poly)


def _product(group, polys):
    out = ArtinPolynomial.constant(group, 1)
    for p in polys:
        out = out * p
    return out


@dataclass(frozen=True, eq=False)
class StackClass:
    """``num / (d1 * d2 * ...)`` with every ``di`` a :class:`SpecialFactor`."""

    num: ArtinPolynomial
    den: tuple = ()

    def __post_init__(self):
        if isinstance(self.num, int):
            raise TypeError("numerator must be an ArtinPolynomial")
        den = tuple(self.den)
        for d in den:
            if not isinstance(d, SpecialFactor):
                raise UnsoundDenominator(f"unregistered denominator {d!r}")
            if d.poly.group != self.num.group:
                raise MixedContexts("denominator over a different group")
        object.__setattr__(self, "den", tuple(sorted(den, key=lambda d: d.name)))

    @property
    def group(self):
        return self.num.group

    @property
    def denominator(self):
        return _product(self.group, (d.poly for d in self.den))

    @classmethod
    def of(cls, x):
        return x if isinstance(x, StackClass) else cls(x)

    def _lift(self, other):
        if isinstance(other, StackClass):
            return other
        if isinstance(other, int):
            return StackClass(ArtinPolynomial.constant(self.group, other))
        if isinstance(other, ArtinPolynomial):
            return StackClass(other)
        return NotImplemented

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return StackClass(self.num * other.num, self.den + other.den)

    __rmul__ = __mul__

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return StackClass(self.num * other.denominator + other.num * self.denominator,
                          self.den + other.den)

    __radd__ = __add__

    def __neg__(self):
        return StackClass(-self.num, self.den)

    def __sub__(self, other):
        return self + (-other)

    def over(self, *factors):
        return StackClass(self.num, self.den + tuple(factors))

    def inverse_via(self, cofactor, specials):
        """Inverse, given ``num * cofactor == prod(specials)``."""
        specials = tuple(specials)
        if self.num * cofactor != _product(self.group, (s.poly for s in specials)):
            raise UnsoundDenominator("cofactor does not complete the numerator to special classes")
        return StackClass(cofactor * self.denominator, specials)

    def reduced(self):
        """Cancel denominator factors that divide the numerator exactly."""
        num, left = self.num, []
        for d in self.den:
            q, r = divmod_monic(num, d.poly)
            if r.is_zero():
                num = q
            else:
                left.append(d)
        return StackClass(num, tuple(left))

    def as_polynomial(self):
        red = self.reduced()
        return red.num if not red.den else None

    def cross_difference(self, other):
        other = self._lift(other)
        return self.num * other.denominator - other.num * self.denominator

    def __eq__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self.cross_difference(other).is_zero()

    __hash__ = None

    def __repr__(self):
        return f"StackClass({format_stack(self)})"


def format_stack(x, ctx=None):
    num = format_poly(x.num, ctx)
    if not x.den:
        return num
    dens = " * ".join(f"({format_poly(d.poly, ctx)})" for d in x.den)
    return f"({num}) / ({dens})"


@dataclass
class EqualityTest:
    equal: bool
    sound: bool
    difference: ArtinPolynomial
    zero_test: ZeroTest

    @property
    def verdict(self):
        word = "EQUAL" if self.equal else "UNEQUAL"
        return word if self.sound else f"{word} (model only)"


def stack_equal(x, y, ctx):
    """Decide ``x == y`` by cross-multiplying and testing the difference for zero.

    The difference is sign-normalized so the first nonzero mark of its leading
    coefficient is positive; the witness does not depend on argument order.
    """
    x, y = StackClass.of(x), StackClass.of(y)
    for z in (x, y):
        for d in z.den:
            if not isinstance(d, SpecialFactor):
                raise UnsoundDenominator(f"unregistered denominator {d!r}")
    diff = x.cross_difference(y)
    zt = is_zero(diff, ctx)
    if not zt.zero and next(v for v in zt.marks if v) < 0:
        diff = -diff
        zt = is_zero(diff, ctx)
    return EqualityTest(zt.zero, zt.sound, diff, zt)


# -- point-count specialization ------------------------------------------------

def cyclic_specialization(a, g):
    """Replace each coefficient by its mark at <g> and L by q (lowest degree first)."""
    group = a.group
    gi = g if isinstance(g, int) else group.index(g)
    label = group.class_of(group.closure([gi]))
    out = [marks(c)[label] for c in a.coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def format_qpoly(coeffs):
    terms = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = coeffs[k]
        if not c:
            continue
        mag = abs(c)
        power = "" if k == 0 else ("q" if k == 1 else f"q^{k}")
        body = str(mag) if not power else (power if mag == 1 else f"{mag}*{power}")
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        s += f" {sign} {body}"
    return s


def qpoly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1) if a and b else []
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


def dumps(obj):
    """Canonical JSON used by every report (sorted keys, fixed separators)."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)
