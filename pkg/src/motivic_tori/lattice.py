"""Galois lattices: free Z-modules of finite rank with a group action.

Action matrices act on column vectors of the chosen basis.  A certificate
``t`` between lattices ``a`` and ``b`` of equal rank is an integer matrix with
``det t = +-1`` and ``t^-1 rho_a(g) t = rho_b(g)``; its columns express the
basis of ``b`` in coordinates of ``a``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
import math

import numpy as np

from . import intmat
from .errors import (
    Incomposable, InvalidAction, InvalidCertificate, InvalidModulus, NotEquivariant,
    NotInvariant, ParseError,
)
from .groups import GSet, PermGroup


def _mat_eq(a, b):
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


def _is_zero(a):
    return all(x == 0 for x in np.asarray(a).flat)


class GaloisLattice:
    """A lattice Z^rank with one invertible integer matrix per group generator."""

    def __init__(self, group, action, name=""):
        if isinstance(action, dict):
            try:
                action = [action[n] for n in group.names]
            except KeyError as exc:
                raise InvalidAction(f"missing action for generator {exc.args[0]}") from None
        mats = tuple(intmat.as_matrix(m) for m in action)
        if len(mats) != len(group.generators):
            raise InvalidAction("one matrix per generator is required")
        r = mats[0].shape[0] if mats else 0
        for m in mats:
            if m.shape != (r, r):
                raise InvalidAction("action matrices must be square of the lattice rank")
            if abs(intmat.det(m)) != 1:
                raise InvalidAction("action matrices must have determinant +-1")
        self.group = group
        self.action = mats
        self.rank = r
        self.name = name
        self._elements = tuple(group.representation(
            mats, lambda x, y: x.dot(y), intmat.identity(r), _mat_eq))

    def element_matrix(self, i):
        return self._elements[i]

    def __eq__(self, other):
        return (isinstance(other, GaloisLattice) and self.group == other.group
                and self.rank == other.rank
                and all(_mat_eq(a, b) for a, b in zip(self.action, other.action)))

    def __hash__(self):
        return hash((self.group, tuple(tuple(m.flat) for m in self.action)))

    def __repr__(self):
        return f"GaloisLattice({self.name or '?'}, rank={self.rank})"

    def fixed_rank(self, elements):
        """Rank of the sublattice fixed by the given group elements."""
        if self.rank == 0:
            return 0
        rows = [self._elements[e] - intmat.identity(self.rank) for e in elements]
        if not rows:
            return self.rank
        return self.rank - intmat.rank(np.vstack(rows))

    def to_json(self):
        return {"rank": self.rank,
                "action": {n: intmat.to_lists(m) for n, m in zip(self.group.names, self.action)}}

    @classmethod
    def from_json(cls, group, data, name=""):
        try:
            lat = cls(group, data["action"], name=name)
        except (KeyError, TypeError) as exc:
            raise ParseError(f"lattice {name!r}: malformed field {exc}") from None
        if "rank" in data and data["rank"] != lat.rank:
            raise ParseError(f"lattice {name!r}: declared rank {data['rank']} != {lat.rank}")
        return lat


class LatticeMap:
    """An equivariant homomorphism ``source -> target`` (matrix on column vectors)."""

    def __init__(self, source, target, matrix, name=""):
        m = intmat.as_matrix(matrix, shape=(target.rank, source.rank))
        if m.shape != (target.rank, source.rank):
            raise Incomposable(f"map {name!r} has shape {m.shape}, expected "
                               f"{(target.rank, source.rank)}")
        if source.group != target.group:
            raise NotEquivariant("source and target live over different groups")
        for k, (ra, rb) in enumerate(zip(source.action, target.action)):
            if not _mat_eq(m.dot(ra), rb.dot(m)):
                raise NotEquivariant(f"map {name!r} does not commute with {source.group.names[k]}")
        self.source = source
        self.target = target
        self.matrix = m
        self.name = name

    def __repr__(self):
        return f"LatticeMap({self.name or '?'}: {self.source.name} -> {self.target.name})"

    def then(self, other):
        """Composite ``other o self``."""
        if other.source.rank != self.target.rank:
            raise Incomposable("ranks do not match")
        return LatticeMap(self.source, other.target, other.matrix.dot(self.matrix))

    def to_json(self):
        return {"source": self.source.name, "target": self.target.name,
                "matrix": intmat.to_lists(self.matrix)}

    @classmethod
    def from_json(cls, data, lattices):
        try:
            src, tgt = lattices[data["source"]], lattices[data["target"]]
            return cls(src, tgt, data["matrix"], name=data.get("name", ""))
        except KeyError as exc:
            raise ParseError(f"map: unknown lattice or missing field {exc}") from None


@dataclass(frozen=True)
class IsoCertificate:
    matrix: object

    def __post_init__(self):
        object.__setattr__(self, "matrix", intmat.as_matrix(self.matrix))


@dataclass
class Verdict:
    """Outcome of a lattice-level check; ``failures`` name what went wrong."""

    ok: bool
    failures: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


# -- constructions -------------------------------------------------------------

def permutation_lattice(gset, name=""):
    mats = []
    for p in gset.action:
        m = intmat.zeros(gset.size, gset.size)
        for i, pi in enumerate(p):
            m[pi, i] = 1
        mats.append(m)
    return GaloisLattice(gset.group, mats, name or f"Z[S{gset.size}]")


def trivial_lattice(group, rank=1, name="Z"):
    return GaloisLattice(group, [intmat.identity(rank)] * len(group.generators), name)


def sign_lattice(group, kernel_label, name=""):
    """Rank-one lattice where the index-two subgroup ``kernel_label`` acts trivially."""
    ker = group.subgroup(kernel_label).elements
    if 2 * len(ker) != group.order:
        raise InvalidAction("kernel of a sign character must have index 2")
    mats = [intmat.as_matrix([[1 if group.index(g) in ker else -1]]) for g in group.generators]
    return GaloisLattice(group, mats, name or f"Z^-({kernel_label})")


def sublattice(lattice, basis, name=""):
    """The invariant sublattice spanned by the columns of ``basis`` (full column rank)."""
    b = intmat.as_matrix(basis, shape=(lattice.rank, 0))
    if b.shape[1] and intmat.rank(b) != b.shape[1]:
        raise NotInvariant("basis vectors are linearly dependent")
    mats = []
    for k, r in enumerate(lattice.action):
        x = intmat.solve_integer(b, r.dot(b)) if b.shape[1] else intmat.zeros(0, 0)
        if x is None:
            raise NotInvariant(f"span is not stable under {lattice.group.names[k]}")
        mats.append(x)
    sub = GaloisLattice(lattice.group, mats, name)
    return sub, LatticeMap(sub, lattice, b, name=f"{name}->{lattice.name}")


def sum_zero_lattice(gset, name=""):
    """Sum-zero sublattice of Z[S], basis e_i - e_last."""
    n = gset.size
    perm = permutation_lattice(gset)
    basis = intmat.zeros(n, n - 1)
    for i in range(n - 1):
        basis[i, i] = 1
        basis[n - 1, i] = -1
    sub, _ = sublattice(perm, basis, name or f"I[S{n}]")
    return sub


def diagonal_quotient_lattice(gset, name=""):
    """Z[S] / Z*(1,...,1) in the basis of the classes of e_0 .. e_{n-2}."""
    n = gset.size
    mats = []
    for p in gset.action:
        m = intmat.zeros(n - 1, n - 1)
        for i in range(n - 1):
            j = p[i]
            if j < n - 1:
                m[j, i] += 1
            else:
                for k in range(n - 1):
                    m[k, i] -= 1
        mats.append(m)
    return GaloisLattice(gset.group, mats, name or f"J[S{n}]")


def augmentation_map(gset, target=None):
    """Z[S] -> Z, sum of coordinates."""
    src = permutation_lattice(gset)
    target = target or trivial_lattice(gset.group)
    return LatticeMap(src, target, [[1] * gset.size], name="augmentation")


# -- operations ----------------------------------------------------------------

def dual_lattice(lattice):
    mats = [intmat.inverse(m).T.copy() for m in lattice.action]
    name = lattice.name[:-2] if lattice.name.endswith("^v") else lattice.name + "^v"
    return GaloisLattice(lattice.group, mats, name)


def dual_map(f):
    """The transpose map ``dual(target) -> dual(source)``."""
    return LatticeMap(dual_lattice(f.target), dual_lattice(f.source), f.matrix.T.copy(),
                      name=f"{f.name}^v")


def verify_exact_sequence(maps, flanked=True):
    """Check that ``L0 -> L1 -> ... -> Lk`` is exact (with 0 at both ends if flanked).

    Node ``i`` is the ``i``-th lattice of the chain.  Images are compared with
    kernels as sublattices (Hermite forms), not just by rank.
    """
    if not maps:
        raise Incomposable("empty sequence")
    for i, (f, g) in enumerate(zip(maps, maps[1:])):
        if f.target.rank != g.source.rank or f.target != g.source:
            raise Incomposable(f"map {i} target does not match map {i + 1} source")
    failures, details = [], {}
    for i, (f, g) in enumerate(zip(maps, maps[1:])):
        node = i + 1
        comp = g.matrix.dot(f.matrix)
        if not _is_zero(comp):
            failures.append((node, "composite nonzero"))
            continue
        ker = intmat.kernel(g.matrix)
        img = intmat.image(f.matrix)
        if not intmat.same_span(ker, img):
            failures.append((node, f"image (rank {img.shape[1]}) != kernel (rank {ker.shape[1]})"))
    if flanked:
        first, last = maps[0], maps[-1]
        if intmat.kernel(first.matrix).shape[1]:
            failures.append((0, "first map not injective"))
        if not intmat.same_span(intmat.image(last.matrix), intmat.identity(last.target.rank)):
            failures.append((len(maps), "last map not surjective"))
    details["ranks"] = [maps[0].source.rank] + [f.target.rank for f in maps]
    return Verdict(not failures, failures, details)


def kernel_mod_n(f, n, name=""):
    """The sublattice {x : f(x) = 0 mod n} of ``f.source`` with its inclusion."""
    if n <= 0:
        raise InvalidModulus("modulus must be a positive integer")
    src, tgt = f.source.rank, f.target.rank
    block = np.hstack([f.matrix, -n * intmat.identity(tgt)]) if tgt else intmat.zeros(0, src)
    if tgt:
        sol = intmat.kernel(block)[:src, :]
        basis = intmat.image(sol)
    else:
        basis = intmat.identity(src)
    sub, inc = sublattice(f.source, basis, name or f"ker({f.name} mod {n})")
    return sub, inc


def quotient_order_mod_n(f, n):
    """Order of the image of ``f`` in ``target / n target``."""
    d, _, _ = intmat.smith(f.matrix)
    out = 1
    for x in d:
        out *= n // math.gcd(int(x), n)
    return out


def index(inclusion):
    """Index of a full-rank inclusion of lattices (|det|)."""
    m = inclusion.matrix
    if m.shape[0] != m.shape[1]:
        raise Incomposable("index needs equal ranks")
    return abs(intmat.det(m))


def check_iso_certificate(a, b, cert):
    """Pass iff ``det t = +-1`` and ``t^-1 rho_a t = rho_b`` for every generator."""
    t = cert.matrix if isinstance(cert, IsoCertificate) else intmat.as_matrix(cert)
    if a.rank != b.rank or t.shape != (a.rank, b.rank):
        raise InvalidCertificate("certificate shape does not match the lattice ranks")
    d = intmat.det(t)
    if d == 0:
        raise InvalidCertificate("certificate matrix is singular")
    failures = []
    if abs(d) != 1:
        failures.append(("det", f"det = {d}"))
    for name, ra, rb in zip(a.group.names, a.action, b.action):
        if not _mat_eq(ra.dot(t), t.dot(rb)):
            failures.append((name, "conjugation mismatch"))
    return Verdict(not failures, failures, {"det": d})


def intertwiners(a, b):
    """Basis of integer matrices ``t`` (a.rank x b.rank) with ``rho_a t = t rho_b``."""
    ra, rb = a.rank, b.rank
    eqs = []
    for ma, mb in zip(a.action, b.action):
        for i in range(ra):
            for j in range(rb):
                row = [0] * (ra * rb)
                for k in range(ra):
                    row[k * rb + j] += ma[i, k]
                for k in range(rb):
                    row[i * rb + k] -= mb[k, j]
                eqs.append(row)
    if not eqs:
        return [intmat.as_matrix(np.eye(ra * rb, dtype=int)[:, c].reshape(ra, rb))
                for c in range(ra * rb)]
    ker = intmat.kernel(intmat.as_matrix(eqs))
    return [ker[:, c].reshape(ra, rb).copy() for c in range(ker.shape[1])]


@dataclass
class IsoSearch:
    certificate: object
    exhausted: bool
    tried: int


def find_iso_certificate(a, b, bound=2, budget=50000):
    """Bounded search for a certificate ``a ~= b``.

    Candidates are integer combinations of an intertwiner basis with
    coefficients in ``[-bound, bound]``, tried in order of increasing L1 norm.
    ``exhausted`` is True when the whole box was searched without success.
    """
    if a.rank != b.rank:
        return IsoSearch(None, True, 0)
    if a.rank == 0:
        return IsoSearch(IsoCertificate(intmat.zeros(0, 0)), True, 1)
    ident = intmat.identity(a.rank)
    if check_iso_certificate(a, b, ident).ok:
        return IsoSearch(IsoCertificate(ident), False, 1)
    basis = intertwiners(a, b)
    d = len(basis)
    tried = 0
    for coeffs in _box_by_norm(d, bound):
        tried += 1
        if tried > budget:
            return IsoSearch(None, False, tried - 1)
        t = sum((c * m for c, m in zip(coeffs, basis) if c), intmat.zeros(a.rank, b.rank))
        if abs(intmat.det(t)) == 1:
            return IsoSearch(IsoCertificate(t), False, tried)
    return IsoSearch(None, True, tried)


def _box_by_norm(d, bound):
    for norm in range(1, d * bound + 1):
        yield from _vectors_with_norm(d, norm, bound)


def _vectors_with_norm(d, norm, bound):
    # all integer vectors of length d with L1 norm == norm and entries in [-bound, bound]
    def rec(i, remaining):
        if i == d:
            if remaining == 0:
                yield ()
            return
        lo = max(0, remaining - bound * (d - i - 1))
        for a in range(lo, min(bound, remaining) + 1):
            for rest in rec(i + 1, remaining - a):
                if a == 0:
                    yield (0,) + rest
                else:
                    yield (a,) + rest
                    yield (-a,) + rest
    yield from rec(0, norm)


@dataclass
class PermutationBasis:
    """Result of :func:`find_permutation_basis`.

    ``status`` is ``"found"`` (with ``basis`` columns permuted like ``gset``),
    ``"none"`` (conclusive: no G-set is compatible with the fixed-point data)
    or ``"unknown"`` (compatible G-sets exist but no certificate was found).
    """

    status: str
    basis: object = None
    gset: GSet | None = None
    reason: str = ""


def _gsets_of_size(group, n):
    sizes = [(lab, group.order // s.order) for lab, s in enumerate(group.subgroups)]
    def rec(start, remaining):
        if remaining == 0:
            yield []
            return
        for k in range(start, len(sizes)):
            lab, sz = sizes[k]
            if sz <= remaining:
                for rest in rec(k, remaining - sz):
                    yield [lab] + rest
    for labels in rec(0, n):
        yield labels


def _torsion_of_quotient(outer, inner):
    """Invariant factors (> 1) of span(outer) / span(inner), ``inner`` inside ``outer``."""
    k = outer.shape[1]
    if k == 0:
        return ()
    im = intmat.image(inner) if inner.shape[1] else inner
    if im.shape[1] == 0:
        return (0,) * k
    coords = intmat.solve_integer(outer, im)
    d, _, _ = intmat.smith(coords)
    d = list(d) + [0] * (k - len(d))
    return tuple(sorted(x for x in d if x != 1))


def tate_invariants(lattice):
    """``(H^0, H^-1)`` Tate cohomology of every subgroup class, as invariant factors.

    ``H^0(H, X) = X^H / N_H X`` and ``H^-1(H, X) = ker N_H / I_H X``.  Isomorphic
    lattices have equal invariants, so a mismatch proves non-isomorphism.
    """
    g, r = lattice.group, lattice.rank
    ident = intmat.identity(r)
    out = []
    for h in g.subgroups:
        mats = [lattice.element_matrix(i) for i in sorted(h.elements)]
        norm = sum(mats[1:], mats[0].copy())
        gens = [lattice.element_matrix(i) - ident for i in h.generators]
        fixed = intmat.kernel(np.vstack(gens)) if gens else ident
        h0 = _torsion_of_quotient(fixed, norm)
        aug = np.hstack(gens) if gens else intmat.zeros(r, 0)
        hm1 = _torsion_of_quotient(intmat.kernel(norm), aug)
        out.append((h0, hm1))
    return tuple(out)


def find_permutation_basis(lattice, max_rank=8, bound=2, budget=50000):
    """Look for a basis of ``lattice`` permuted by the group."""
    g = lattice.group
    if lattice.rank > max_rank:
        return PermutationBasis("unknown", reason=f"rank {lattice.rank} exceeds {max_rank}")
    traces = [sum(lattice.element_matrix(i)[k, k] for k in range(lattice.rank))
              for i in range(g.order)]
    if any(t < 0 for t in traces):
        return PermutationBasis("none", reason="negative trace: not a fixed-point count")
    if any(hm1 for _, hm1 in tate_invariants(lattice)):
        return PermutationBasis("none", reason="nonzero H^-1: permutation lattices have none")
    candidates = []
    for labels in _gsets_of_size(g, lattice.rank):
        s = GSet.from_labels(g, labels)
        fixed = [sum(1 for x in range(s.size) if s.element_perm(i)[x] == x) for i in range(g.order)]
        if fixed != traces:
            continue
        if any(len(GSet.restrict(s, g.subgroup_group(h.label)).orbits())
               != lattice.fixed_rank(h.elements) for h in g.subgroups):
            continue
        candidates.append(s)
    if not candidates:
        return PermutationBasis("none", reason="no G-set matches traces and fixed ranks")
    for s in candidates:
        search = find_iso_certificate(lattice, permutation_lattice(s), bound, budget)
        if search.certificate is not None:
            return PermutationBasis("found", search.certificate.matrix, s)
    return PermutationBasis("unknown", reason="compatible G-sets exist, no certificate found")
