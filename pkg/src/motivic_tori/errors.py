"""Exception hierarchy shared by every module of the package."""


class MotivicError(Exception):
    """Base class for all errors raised by motivic_tori."""


class InvalidGroup(MotivicError):
    pass


class InvalidAction(MotivicError):
    """An action (on a set or a lattice) violates the group relations."""


class UnknownSubgroup(MotivicError):
    pass


class MixedGroups(MotivicError):
    """Operands belong to different groups."""


class MixedContexts(MixedGroups):
    pass


class NotEquivariant(MotivicError):
    pass


class NotInvariant(MotivicError):
    """A proposed sublattice is not stable under the group action."""


class Incomposable(MotivicError):
    pass


class InvalidModulus(MotivicError):
    pass


class InvalidCertificate(MotivicError):
    pass


class NotDivisible(MotivicError):
    """Exact division left a nonzero remainder (kept in ``remainder``)."""

    def __init__(self, message, remainder=None, quotient=None):
        super().__init__(message)
        self.remainder = remainder
        self.quotient = quotient


class UnsoundDenominator(MotivicError):
    pass


class NotQuadratic(MotivicError):
    pass


class BadPayload(MotivicError):
    pass


class RuleScopeError(MotivicError):
    pass


class NotSpecial(MotivicError):
    pass


class NotQuasiSplit(MotivicError):
    pass


class BadSequence(MotivicError):
    pass


class UnsupportedParameter(MotivicError):
    pass


class ParseError(MotivicError):
    pass
