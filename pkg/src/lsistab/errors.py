"""Exception hierarchy shared by every module."""


class LsiError(Exception):
    """Base class for all errors raised by lsistab."""


class ParameterError(LsiError, ValueError):
    """An argument lies outside its admissible range."""


class NumericalError(LsiError):
    """Base class for failures detected while evaluating or integrating."""


class EvaluationError(NumericalError):
    """An integrand produced a non-finite value at a quadrature node."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class DegenerateInputError(NumericalError):
    """Input sits at a degenerate point (zero norm, zero Fisher information, ...)."""


class NormalizationError(NumericalError):
    """Field is not normalized or centered to the required tolerance."""


class DensityError(NumericalError):
    """A density is negative, or its Fisher integrand is singular."""


class PreconditionError(NumericalError):
    """A quantitative precondition (e.g. a moment bound) is violated."""


class OptimizationError(NumericalError):
    """Every restart of an optimization produced a non-finite objective."""


class FieldSpecError(ParameterError):
    """A field specification string failed to parse; ``position`` is 1-based."""

    def __init__(self, message, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position
