"""Motivic classes of algebraic tori and their classifying stacks.

Classes live in the Grothendieck ring of varieties, modelled as polynomials
in the Lefschetz class ``L`` with coefficients in the Burnside ring of the
Galois group.  Tori are given by their character lattices; each rule that
produces a class records the checks it ran, so every value comes with a
derivation trace.
"""
from .errors import MotivicError
from .groups import BurnsideElement, GSet, PermGroup, burnside_mul, induce, marks
from .lattice import GaloisLattice, LatticeMap, find_iso_certificate, tate_invariants
from .ring import (
    ArtinPolynomial, GaloisContext, StackClass, cyclic_specialization, is_zero, stack_equal,
)
from .tori import (
    ClassResult, DerivationStep, SpecialRegistry, TorusSequence, norm_one_quadratic_class,
    quasi_split_class, torus_class, weil_restriction_p1_class,
)
from .scenarios import ScenarioReport, default_context, run

__all__ = [
    "ArtinPolynomial", "BurnsideElement", "ClassResult", "DerivationStep", "GSet",
    "GaloisContext", "GaloisLattice", "LatticeMap", "MotivicError", "PermGroup",
    "ScenarioReport", "SpecialRegistry", "StackClass", "TorusSequence", "burnside_mul",
    "cyclic_specialization", "default_context", "find_iso_certificate", "induce", "is_zero",
    "marks", "norm_one_quadratic_class", "quasi_split_class", "run", "stack_equal",
    "tate_invariants", "torus_class", "weil_restriction_p1_class",
]
