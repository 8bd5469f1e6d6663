"""Exception hierarchy.

Each error carries a ``category`` used by the command line to pick an exit
code: ``parse``, ``axiom``, ``precondition`` or ``internal-alarm``.
"""

from __future__ import annotations


class LieforgeError(Exception):
    category = "precondition"


# fields
class NotPrime(LieforgeError):
    pass


class ReducibleModulus(LieforgeError):
    pass


class OrderTooLarge(LieforgeError):
    pass


class DivisionByZero(LieforgeError, ZeroDivisionError):
    pass


class MixedFields(LieforgeError):
    pass


# linear algebra
class DimensionMismatch(LieforgeError):
    pass


class AmbientMismatch(LieforgeError):
    pass


class NotSquare(LieforgeError):
    pass


class SizeCapExceeded(LieforgeError):
    pass


# algebras
class ParityViolation(LieforgeError):
    category = "axiom"


class SymmetryViolation(LieforgeError):
    category = "axiom"


class BadDimensions(LieforgeError):
    pass


class NotOdd(LieforgeError):
    pass


class WrongCharacteristic(LieforgeError):
    pass


class NotAnIdeal(LieforgeError):
    pass


class NoGrading(LieforgeError):
    pass


class IncompatibleGrading(LieforgeError):
    pass


class IterationCapExceeded(LieforgeError):
    category = "internal-alarm"


# restrictedness
class MissingWitness(LieforgeError):
    pass


class BadSplit(LieforgeError):
    pass


class VariantMismatch(LieforgeError):
    pass


class HasCenter(LieforgeError):
    pass


class InvalidWitness(LieforgeError):
    pass


class NotRestricted(LieforgeError):
    pass


# superization
class NotLieAdmissible(LieforgeError):
    category = "axiom"


class NotSimpleInput(LieforgeError):
    pass


class DecompositionFails(LieforgeError):
    category = "internal-alarm"


# catalog / prolongation
class BadParams(LieforgeError):
    pass


class BadShearing(LieforgeError):
    pass


class NotVectorial(LieforgeError):
    pass


class InconsistentEmbedding(LieforgeError):
    pass


class NotHomogeneous(LieforgeError):
    pass


# files
class ParseError(LieforgeError):
    category = "parse"


class AxiomFailure(LieforgeError):
    category = "axiom"

    def __init__(self, message: str, violations=None):
        super().__init__(message)
        self.violations = list(violations or [])
