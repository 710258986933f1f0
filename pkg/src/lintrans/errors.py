"""Exception types.

Usage errors (bad parameters, violated preconditions) subclass ``ValueError``.
``InvariantViolation`` signals that a computed object failed a check that the
underlying mathematics guarantees, i.e. a bug.
"""


class InvariantViolation(RuntimeError):
    """A guaranteed identity failed on a concrete table."""


class CertFailed(InvariantViolation):
    pass


class NotLinear(InvariantViolation):
    pass


class NoIrreducible(InvariantViolation):
    pass


class BadSpec(ValueError):
    pass


class NotPrime(BadSpec):
    pass


class BudgetExceeded(BadSpec):
    pass


class NotInSubfield(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class ExponentOutOfRange(ValueError):
    pass


class NotATranslator(ValueError):
    """The element does not satisfy the translator identity for the function."""


class ZeroAlpha(ValueError):
    pass


class ZeroGamma(ValueError):
    pass


class BadDegree(ValueError):
    pass


class EvenCharacteristic(ValueError):
    pass


class EvenQ(ValueError):
    pass


class BijectiveL(ValueError):
    pass


class NonBijectiveL(ValueError):
    pass


class CertMismatch(ValueError):
    pass


class BIsMinusOne(ValueError):
    pass


class HypothesisFailed(ValueError):
    pass


class CoefficientsNotInSubfield(ValueError):
    pass


class KernelNotLine(ValueError):
    pass


class HNotBijective(ValueError):
    pass


class FamilyPreconditionFailed(ValueError):
    pass


class GViolatesHypotheses(ValueError):
    pass
