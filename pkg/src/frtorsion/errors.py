"""Exception types shared across the package."""


class FrTorsionError(Exception):
    """Base class for all package errors."""


class IncompatibleRingError(FrTorsionError):
    """Two ring classes do not share the same RingSpec."""


class DomainError(FrTorsionError):
    """An argument is outside the mathematical domain of the operation."""


class WrongKindError(FrTorsionError):
    """A bundle model of the wrong kind (complex vs realification) was passed."""


class ModelError(FrTorsionError):
    """A model file or structured input fails validation."""


class ConvergenceError(FrTorsionError):
    """A series could not reach the requested tolerance within the cap."""


class ConditioningError(FrTorsionError):
    """A matrix family is too close to singular at a quadrature node."""


class CoveringError(FrTorsionError):
    """A covering map description fails the lift-table integrity checks."""


class InvalidComplexError(FrTorsionError):
    """A chain complex does not satisfy d^2 = 0."""


class PreconditionError(FrTorsionError):
    """Machine-checked hypotheses of a lemma fail for the given input."""
