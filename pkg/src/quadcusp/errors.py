"""Exception types raised by the library.

Every domain failure derives from :class:`DomainError`, which the command
line front end maps to exit code 3.
"""
from __future__ import annotations


class DomainError(ValueError):
    """Input is well formed but outside the domain of the operation."""


class DiscriminantMismatch(DomainError):
    pass


class DivisionByZero(DomainError, ZeroDivisionError):
    pass


class NotADiscriminant(DomainError):
    pass


class NegativeDiscriminantForRealEmbedding(DomainError):
    pass


class NegativeDiscriminant(DomainError):
    pass


class ZeroIdeal(DomainError):
    pass


class NotAnIdeal(DomainError):
    pass


class NotInvertible(DomainError):
    pass


class ConductorDivides(DomainError):
    pass


class NotCoprimeToConductor(DomainError):
    pass


class NotPrimitive(DomainError):
    pass


class WrongNorm(DomainError):
    pass


class Degenerate(DomainError):
    pass


class RankDeficient(DomainError):
    pass


class NotDirectSum(DomainError):
    pass


class WrongOrders(DomainError):
    pass


class NotSmartBasis(DomainError):
    pass


class NotInGamma(DomainError):
    pass


class DecompositionFails(DomainError):
    pass


class NormMismatch(DomainError):
    pass


class DegenerateLine(DomainError):
    pass


class SingularGram(DomainError):
    pass


class CoincidentPoints(DomainError):
    pass


class PhaseNotRepresentable(DomainError):
    pass


class SquareDiscriminant(DomainError):
    pass


class UnsupportedStratum(DomainError):
    pass


class ParseError(DomainError):
    pass
