"""Exception hierarchy shared by all modules."""


class LevyIHRError(Exception):
    """Base class for package errors."""


class DomainError(LevyIHRError, ValueError):
    """Argument outside the admissible domain."""


class PoleError(DomainError):
    """Laplace exponent evaluated at a pole."""


class ConvergenceError(LevyIHRError, RuntimeError):
    """An iterative routine failed to converge."""


class SingularityError(LevyIHRError, ArithmeticError):
    """Singular or numerically degenerate linear system."""


class PrecisionError(LevyIHRError, ValueError):
    """Requested accuracy exceeds double-precision capability."""


class UnsupportedModel(LevyIHRError, TypeError):
    """Operation not defined for this model variant."""


class BracketError(LevyIHRError, RuntimeError):
    """Root bracketing failed."""


class WellDefinednessError(LevyIHRError, ValueError):
    """Expected shortfall is not well defined for the model/scenario."""


class RangeError(DomainError):
    """Evaluation point outside the truncation interval."""


class ParseError(LevyIHRError, ValueError):
    """Malformed input file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptySeriesError(LevyIHRError, ValueError):
    """Input series contains no usable observations."""


class NonConvergence(ConvergenceError):
    """Optimizer stopped without meeting its tolerance."""
