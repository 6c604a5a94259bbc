"""Finite permutation groups, finite G-sets and the Burnside ring.

Groups are stored by full element enumeration; everything here is meant for
groups of order at most a few dozen (the Galois groups in play have order
at most 8).  Elements are identified with their index in ``PermGroup.elements``,
which lists them in breadth-first order from the identity, multiplying by the
generators in declaration order on the left.  Composition is ``(g*h)(x) = g(h(x))``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import cached_property
import re

from .errors import InvalidAction, InvalidGroup, MixedGroups, UnknownSubgroup, ParseError

Perm = tuple


def compose(a, b):
    """Return the permutation ``a o b`` (apply ``b`` first)."""
    return tuple(a[i] for i in b)


def invert(a):
    out = [0] * len(a)
    for i, ai in enumerate(a):
        out[ai] = i
    return tuple(out)


def _is_perm(p, n):
    return len(p) == n and sorted(p) == list(range(n))


@dataclass(frozen=True)
class Subgroup:
    """One registry entry: a representative of a conjugacy class of subgroups."""

    label: int
    order: int
    elements: frozenset
    generators: tuple
    class_size: int


class PermGroup:
    """A permutation group given by generators (image arrays, 0-based)."""

    def __init__(self, degree, generators, names=None):
        if degree < 1:
            raise InvalidGroup("degree must be positive")
        gens = tuple(tuple(int(x) for x in g) for g in generators)
        for g in gens:
            if not _is_perm(g, degree):
                raise InvalidGroup(f"generator {list(g)} is not a permutation of 0..{degree - 1}")
        if names is None:
            names = tuple(f"s{i + 1}" for i in range(len(gens)))
        if len(names) != len(gens):
            raise InvalidGroup("one name per generator is required")
        self.degree = degree
        self.generators = gens
        self.names = tuple(names)

        identity = tuple(range(degree))
        elements = [identity]
        index = {identity: 0}
        parent = [None]
        queue = deque([0])
        while queue:
            i = queue.popleft()
            for k, g in enumerate(gens):
                h = compose(g, elements[i])
                if h not in index:
                    index[h] = len(elements)
                    elements.append(h)
                    parent.append((i, k))
                    queue.append(index[h])
        self.elements = tuple(elements)
        self._index = index
        self._parent = tuple(parent)

    # -- identity & hashing ------------------------------------------------
    @property
    def key(self):
        return (self.degree, self.generators)

    def __eq__(self, other):
        return isinstance(other, PermGroup) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, generators={[list(g) for g in self.generators]})"

    # -- elements ------------------------------------------------------------
    @property
    def order(self):
        return len(self.elements)

    def index(self, perm):
        try:
            return self._index[tuple(perm)]
        except KeyError:
            raise InvalidGroup(f"{list(perm)} is not an element of the group") from None

    @cached_property
    def _table(self):
        n = self.order
        return tuple(
            tuple(self._index[compose(self.elements[i], self.elements[j])] for j in range(n))
            for i in range(n)
        )

    def mul(self, i, j):
        return self._table[i][j]

    @cached_property
    def _inverses(self):
        return tuple(self._index[invert(g)] for g in self.elements)

    def inv(self, i):
        return self._inverses[i]

    def element_order(self, i):
        k, j = 1, i
        while j != 0:
            j = self.mul(i, j)
            k += 1
        return k

    def word(self, text):
        """Element index of a word such as ``"s1*s2"`` (``"1"`` or ``"e"`` is the identity)."""
        idx = 0
        for tok in re.split(r"\s*\*\s*", text.strip()):
            if tok in ("", "1", "e"):
                continue
            if tok not in self.names:
                raise ParseError(f"unknown generator name {tok!r}")
            idx = self.mul(idx, self._index[self.generators[self.names.index(tok)]])
        return idx

    def representation(self, gen_images, compose_fn, identity, equal=None):
        """Extend generator images to every element, checking the homomorphism.

        Every edge of the Cayley graph is checked, so a returned list is a genuine
        homomorphism.  Raises :class:`InvalidAction` otherwise.
        """
        if len(gen_images) != len(self.generators):
            raise InvalidAction("one image per generator is required")
        equal = equal or (lambda a, b: a == b)
        images = [identity]
        for i in range(1, self.order):
            p, k = self._parent[i]
            images.append(compose_fn(gen_images[k], images[p]))
        for i in range(self.order):
            for k, g in enumerate(self.generators):
                j = self._index[compose(g, self.elements[i])]
                if not equal(images[j], compose_fn(gen_images[k], images[i])):
                    raise InvalidAction(
                        f"relation violated: generator {self.names[k]} on element {i}"
                    )
        return images

    # -- subgroups -----------------------------------------------------------
    def closure(self, elements):
        found = {0} | set(elements)
        frontier = list(found)
        while frontier:
            new = []
            for a in frontier:
                for b in list(found):
                    for c in (self.mul(a, b), self.mul(b, a)):
                        if c not in found:
                            found.add(c)
                            new.append(c)
            frontier = new
        return frozenset(found)

    @cached_property
    def all_subgroups(self):
        subs = {frozenset({0})}
        frontier = [frozenset({0})]
        while frontier:
            new = []
            for h in frontier:
                for g in range(self.order):
                    if g not in h:
                        k = self.closure(h | {g})
                        if k not in subs:
                            subs.add(k)
                            new.append(k)
            frontier = new
        return frozenset(subs)

    def conjugate(self, elements, g):
        gi = self.inv(g)
        return frozenset(self.mul(self.mul(g, h), gi) for h in elements)

    @cached_property
    def _registry(self):
        classes = []
        seen = set()
        for h in sorted(self.all_subgroups, key=lambda s: (len(s), sorted(s))):
            if h in seen:
                continue
            cls = {self.conjugate(h, g) for g in range(self.order)}
            seen |= cls
            rep = min(cls, key=sorted)
            classes.append((rep, cls))
        classes.sort(key=lambda rc: (len(rc[0]), sorted(rc[0])))
        lookup = {}
        entries = []
        for label, (rep, cls) in enumerate(classes):
            gens = []
            span = frozenset({0})
            for x in sorted(rep):
                if x not in span:
                    gens.append(x)
                    span = self.closure(span | {x})
            entries.append(Subgroup(label, len(rep), rep, tuple(gens), len(cls)))
            for c in cls:
                lookup[c] = label
        return tuple(entries), lookup

    @property
    def subgroups(self):
        """Conjugacy classes of subgroups, ordered by (order, sorted element indices)."""
        return self._registry[0]

    def class_of(self, elements):
        try:
            return self._registry[1][frozenset(elements)]
        except KeyError:
            raise UnknownSubgroup(f"{sorted(elements)} is not a subgroup") from None

    def subgroup(self, label):
        if not 0 <= label < len(self.subgroups):
            raise UnknownSubgroup(f"no subgroup class with label {label}")
        return self.subgroups[label]

    @property
    def trivial_label(self):
        return 0

    @property
    def full_label(self):
        return len(self.subgroups) - 1

    def subgroup_from_words(self, words):
        return self.closure(self.word(w) for w in words)

    def subgroup_group(self, label):
        """The representative of class ``label`` as a PermGroup of its own."""
        cache = self.__dict__.setdefault("_subgroup_groups", {})
        if label not in cache:
            sub = self.subgroup(label)
            gens = [self.elements[i] for i in sub.generators] or [self.elements[0]]
            cache[label] = PermGroup(self.degree, gens)
        return cache[label]

    def embed(self, sub, i):
        """Index in ``self`` of element ``i`` of a subgroup group ``sub``."""
        return self._index[sub.elements[i]]

    @cached_property
    def burnside(self):
        return BurnsideRing(self)


class GSet:
    """A finite set {0..size-1} with an action given per generator."""

    def __init__(self, group, action):
        action = tuple(tuple(int(x) for x in p) for p in action)
        if len(action) != len(group.generators):
            raise InvalidAction("one permutation per generator is required")
        size = len(action[0]) if action else 0
        for p in action:
            if not _is_perm(p, size):
                raise InvalidAction(f"{list(p)} is not a permutation of 0..{size - 1}")
        self.group = group
        self.size = size
        self.action = action
        self._perms = tuple(group.representation(action, compose, tuple(range(size))))

    def __repr__(self):
        return f"GSet(size={self.size}, action={[list(p) for p in self.action]})"

    def element_perm(self, i):
        return self._perms[i]

    # -- constructors --------------------------------------------------------
    @classmethod
    def transitive(cls, group, label):
        """The coset set G/H for the registry representative H of ``label``."""
        h = group.subgroup(label).elements
        return cls._cosets(group, h)

    @classmethod
    def _cosets(cls, group, h):
        cosets, where = [], {}
        for g in range(group.order):
            if g in where:
                continue
            c = frozenset(group.mul(g, x) for x in h)
            for x in c:
                where[x] = len(cosets)
            cosets.append(c)
        action = []
        for s in group.generators:
            si = group.index(s)
            action.append(tuple(where[group.mul(si, min(c))] for c in cosets))
        return cls(group, action)

    @classmethod
    def regular(cls, group):
        return cls.transitive(group, group.trivial_label)

    @classmethod
    def trivial(cls, group, size=1):
        return cls(group, [tuple(range(size))] * len(group.generators))

    @classmethod
    def from_labels(cls, group, labels):
        out = cls.trivial(group, 0)
        for lab in labels:
            out = out + cls.transitive(group, lab)
        return out

    def __add__(self, other):
        if self.group != other.group:
            raise MixedGroups("disjoint union of G-sets over different groups")
        n = self.size
        return GSet(self.group, [p + tuple(n + x for x in q) for p, q in zip(self.action, other.action)])

    def __mul__(self, other):
        if self.group != other.group:
            raise MixedGroups("product of G-sets over different groups")
        m = other.size
        return GSet(
            self.group,
            [tuple(p[i] * m + q[j] for i in range(self.size) for j in range(m))
             for p, q in zip(self.action, other.action)],
        )

    def relabel(self, perm):
        """Transport the action along the bijection ``i -> perm[i]``."""
        inv = invert(perm)
        return GSet(self.group, [tuple(perm[p[inv[i]]] for i in range(self.size)) for p in self.action])

    def restrict(self, sub):
        """Restriction to a subgroup given as a PermGroup on the same degree."""
        parent = self.group
        return GSet(sub, [self._perms[parent.index(g)] for g in sub.generators])

    # -- orbits --------------------------------------------------------------
    def stabilizer(self, point):
        return frozenset(i for i, p in enumerate(self._perms) if p[point] == point)

    def orbits(self):
        seen, out = set(), []
        for x in range(self.size):
            if x in seen:
                continue
            orb, queue = {x}, [x]
            while queue:
                y = queue.pop()
                for p in self.action:
                    if p[y] not in orb:
                        orb.add(p[y])
                        queue.append(p[y])
            seen |= orb
            out.append(sorted(orb))
        return out


def orbit_decompose(gset):
    """Orbits (smallest point first) paired with the stabilizer class label."""
    g = gset.group
    return [(orb, g.class_of(gset.stabilizer(orb[0]))) for orb in gset.orbits()]


class BurnsideRing:
    """Structure constants and table of marks for one group."""

    def __init__(self, group):
        self.group = group
        k = len(group.subgroups)
        self.rank = k
        cosets = [GSet.transitive(group, i) for i in range(k)]
        self.basis_sets = tuple(cosets)
        self.table_of_marks = tuple(
            tuple(self._fixed_count(cosets[j], group.subgroup(i).elements) for j in range(k))
            for i in range(k)
        )
        self._products = {}

    @staticmethod
    def _fixed_count(gset, elements):
        return sum(all(gset.element_perm(e)[x] == x for e in elements) for x in range(gset.size))

    def product(self, i, j):
        key = (min(i, j), max(i, j))
        if key not in self._products:
            prod = self.basis_sets[i] * self.basis_sets[j]
            self._products[key] = burnside_normal_form(prod).coeffs
        return self._products[key]


class BurnsideElement:
    """An integer combination of classes of transitive G-sets.

    Stored densely, one coefficient per subgroup class in registry order; the
    dense tuple is the normal form.
    """

    __slots__ = ("group", "coeffs")

    def __init__(self, group, coeffs):
        coeffs = tuple(int(c) for c in coeffs)
        if len(coeffs) != len(group.subgroups):
            raise ValueError("coefficient vector has the wrong length")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("BurnsideElement is immutable")

    @classmethod
    def zero(cls, group):
        return cls(group, (0,) * len(group.subgroups))

    @classmethod
    def one(cls, group):
        return cls.basis(group, group.full_label)

    @classmethod
    def basis(cls, group, label, coeff=1):
        group.subgroup(label)
        c = [0] * len(group.subgroups)
        c[label] = coeff
        return cls(group, c)

    @property
    def coefficients(self):
        return {i: c for i, c in enumerate(self.coeffs) if c}

    def is_zero(self):
        return not any(self.coeffs)

    def _coerce(self, other):
        if isinstance(other, BurnsideElement):
            if other.group != self.group:
                raise MixedGroups("Burnside elements over different groups")
            return other
        if isinstance(other, int):
            return BurnsideElement.one(self.group) * other
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return BurnsideElement(self.group, (a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return BurnsideElement(self.group, (-a for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return BurnsideElement(self.group, (a * other for a in self.coeffs))
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return burnside_mul(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, int):
            other = BurnsideElement.one(self.group) * other
        if not isinstance(other, BurnsideElement):
            return NotImplemented
        return self.group == other.group and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.group, self.coeffs))

    def __repr__(self):
        terms = " + ".join(f"{c}*[G/H{i}]" for i, c in self.coefficients.items()) or "0"
        return f"BurnsideElement({terms})"

    def marks(self):
        return marks(self)


def burnside_normal_form(gset):
    g = gset.group
    c = [0] * len(g.subgroups)
    for _, label in orbit_decompose(gset):
        c[label] += 1
    return BurnsideElement(g, c)


def burnside_mul(a, b):
    if a.group != b.group:
        raise MixedGroups("Burnside elements over different groups")
    ring = a.group.burnside
    out = [0] * ring.rank
    for i, x in enumerate(a.coeffs):
        if not x:
            continue
        for j, y in enumerate(b.coeffs):
            if not y:
                continue
            for k, z in enumerate(ring.product(i, j)):
                out[k] += x * y * z
    return BurnsideElement(a.group, out)


def marks(a):
    """Fixed-point counts at every subgroup class (registry order)."""
    tom = a.group.burnside.table_of_marks
    return tuple(sum(row[j] * c for j, c in enumerate(a.coeffs)) for row in tom)


def induce(group, label, a):
    """Push a Burnside element over subgroup class ``label`` up to ``group``."""
    sub = group.subgroup_group(label)
    if a.group != sub:
        raise UnknownSubgroup("element does not live over the requested subgroup")
    out = [0] * len(group.subgroups)
    for u, c in a.coefficients.items():
        elems = frozenset(group.embed(sub, i) for i in sub.subgroup(u).elements)
        out[group.class_of(elems)] += c
    return BurnsideElement(group, out)


def restrict(group, label, a):
    """Restriction to subgroup class ``label`` (used to test induction)."""
    sub = group.subgroup_group(label)
    out = BurnsideElement.zero(sub)
    for k, c in a.coefficients.items():
        piece = burnside_normal_form(GSet.transitive(group, k).restrict(sub))
        out = out + piece * c
    return out
