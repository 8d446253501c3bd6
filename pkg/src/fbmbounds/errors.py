"""Exception types raised across the package."""


class DomainError(ValueError):
    """Argument outside the region where a formula or bound is valid."""


class RangeError(OverflowError):
    """Result not representable as a finite double."""


class BracketError(ValueError):
    """Search interval does not straddle a sign change."""


class EvaluationError(ArithmeticError):
    """Objective returned a non-finite value."""


class AccuracyError(RuntimeError):
    """Adaptive procedure exhausted its refinement budget."""


class SamplerError(RuntimeError):
    """Circulant embedding is not nonnegative definite."""
