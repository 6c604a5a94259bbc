"""The built-in biquadratic setup: Gal(K/F) = C2 x C2 and its named lattices.

The Galois group is realized inside S4 as <(12), (34)> acting on the
coordinate indices {1, 2, 3, 4} (0-based here), with generator ``s1`` the
transposition (12) and ``s2`` the transposition (34).  The fixed fields are
labelled ``E1 = K^<s1>``, ``E2 = K^<s2>``, ``E12 = K^<s1 s2>``.

Vectors of Z^4 written ``(a, b, c, d)`` are converted to the rank-3 models:

* ``Z^4 / Z(1,1,1,1)`` in the basis of the classes of e1, e2, e3,
* the sum-zero sublattice of ``Z^4`` in the basis e1-e4, e2-e4, e3-e4.

These two bases are dual to each other.
"""
from __future__ import annotations

from functools import lru_cache

from . import intmat
from .groups import GSet, PermGroup
from .lattice import (
    LatticeMap, diagonal_quotient_lattice, kernel_mod_n, permutation_lattice,
    sign_lattice, sublattice, sum_zero_lattice, trivial_lattice,
)

GENERATORS = ([1, 0, 2, 3], [0, 1, 3, 2])
FIELD_LABELS = ("K", "E1", "E2", "E12", "F")


@lru_cache(maxsize=None)
def klein_group():
    return PermGroup(4, GENERATORS, names=("s1", "s2"))


@lru_cache(maxsize=None)
def quadratic_group():
    return PermGroup(2, [[1, 0]], names=("s",))


def label(name):
    """Subgroup class label of the field ``name`` (e.g. ``"E12"`` -> 3)."""
    return FIELD_LABELS.index(name)


@lru_cache(maxsize=None)
def index_set():
    """The four coordinate indices permuted as <(12), (34)>."""
    g = klein_group()
    return GSet(g, GENERATORS)


@lru_cache(maxsize=None)
def pair_set():
    """Indices of e13, e23, e14, e24 permuted through both subscripts."""
    g = klein_group()
    return GSet(g, [[1, 0, 3, 2], [2, 3, 0, 1]])


def quotient_coords(v):
    """Z^4/Z(1,1,1,1) coordinates of the class of ``v``."""
    a, b, c, d = v
    return [a - d, b - d, c - d]


def sum_zero_coords(v):
    """Coordinates of a sum-zero vector of Z^4 in the basis e_i - e4."""
    assert sum(v) == 0
    return list(v[:3])


# -- G, G' and T ----------------------------------------------------------------

@lru_cache(maxsize=None)
def lattice_M():
    """Character lattice of G = R^1_{E/F}(Gm): Z^4 / Z."""
    return diagonal_quotient_lattice(index_set(), "M")


@lru_cache(maxsize=None)
def lattice_N():
    """Character lattice of G' = R_{E/F}(Gm)/Gm: sum-zero vectors of Z^4."""
    return sum_zero_lattice(index_set(), "N")


@lru_cache(maxsize=None)
def lattice_P():
    """Character lattice of T: kernel of (a,b,c,d) -> a+b-c-d on M, basis v1, v2."""
    basis = intmat.as_matrix([quotient_coords((1, 0, 1, 0)), quotient_coords((1, 0, 0, 1))]).T
    return sublattice(lattice_M(), basis, "P")


def map_pi_M():
    return LatticeMap(lattice_M(), trivial_lattice(klein_group()), [[1, 1, -1]], name="pi")


@lru_cache(maxsize=None)
def lattice_Q():
    """The permutation lattice on e13, e23, e14, e24 (free of rank 4)."""
    return permutation_lattice(pair_set(), "Q")


@lru_cache(maxsize=None)
def lattice_sign12():
    """Z with s1 and s2 acting by -1 (sign of S4 restricted)."""
    return sign_lattice(klein_group(), label("E12"), "Z^pm")


def map_phi():
    """1 -> e13 - e23 - e14 + e24."""
    return LatticeMap(lattice_sign12(), lattice_Q(), [[1], [-1], [-1], [1]], name="phi")


def map_pi_Q():
    """e_ij -> e_i - e_j, landing in the sum-zero lattice."""
    cols = [sum_zero_coords(v) for v in ((1, 0, -1, 0), (0, 1, -1, 0), (1, 0, 0, -1), (0, 1, 0, -1))]
    return LatticeMap(lattice_Q(), lattice_N(), intmat.as_matrix(cols).T, name="pi")


# -- the finite group scheme A -------------------------------------------------

def stated_N_basis(n):
    """Columns v13 = n e13, v23 = n e23, v14 = n e14, v = e13 - e23 - e14 + e24."""
    return intmat.as_matrix([[n, 0, 0, 0], [0, n, 0, 0], [0, 0, n, 0], [1, -1, -1, 1]]).T


def lattice_N_mod(n):
    """The kernel of Q -> N -> N/nN, in the basis produced by Hermite reduction."""
    return kernel_mod_n(map_pi_Q(), n, name=f"N({n})")


def lattice_N_stated(n):
    return sublattice(lattice_Q(), stated_N_basis(n), f"N({n})")


def map_pi_N(n):
    """a v13 + b v23 + c v14 + d v -> a + b + c."""
    lat, _ = lattice_N_stated(n)
    return LatticeMap(lat, trivial_lattice(klein_group()), [[1, 1, 1, 0]], name="pi")


def lattice_N_prime(n):
    """Kernel of pi on N(n), in the basis v, v13 - v23, v13 - v14."""
    lat, _ = lattice_N_stated(n)
    basis = intmat.as_matrix([[0, 0, 0, 1], [1, -1, 0, 0], [1, 0, -1, 0]]).T
    return sublattice(lat, basis, f"N'({n})")


def stated_rho(m):
    """Action matrices of (12) and (34) on N' as stated, with 2m in the corner."""
    r12 = [[-1, 0, 2 * m], [0, -1, 0], [0, 0, 1]]
    r34 = [[-1, 2 * m, 0], [0, 1, 0], [0, 0, -1]]
    return intmat.as_matrix(r12), intmat.as_matrix(r34)


def stated_tau(m):
    return intmat.as_matrix([[1, m, m], [0, 1, 0], [0, 0, 1]])


def diagonal_target():
    """diag(-1,-1,1), diag(-1,1,-1): a product of three rank-one sign lattices."""
    from .lattice import GaloisLattice
    return GaloisLattice(klein_group(), [intmat.as_matrix([[-1, 0, 0], [0, -1, 0], [0, 0, 1]]),
                                         intmat.as_matrix([[-1, 0, 0], [0, 1, 0], [0, 0, -1]])],
                         "diag")


ORIENTATION_FLIP = intmat.as_matrix([[-1, 0, 0], [0, 1, 0], [0, 0, 1]])
