"""Exception hierarchy.

The CLI maps these to exit codes: validation errors exit 2, numerical
errors exit 3, hypothesis-check failures exit 4.
"""


class WContrastError(Exception):
    """Base class for all library errors."""


class ValidationError(WContrastError):
    """Bad parameters, malformed inputs, or violated construction invariants."""

    exit_code = 2


class DomainError(ValidationError):
    """An argument outside the mathematical domain of an operation."""


class NumericalError(WContrastError):
    """A numerical procedure failed or two routes disagreed beyond contract."""

    exit_code = 3


class TruncationError(NumericalError):
    """The bound on a truncated tail exceeds the requested tolerance."""


class IntegrabilityError(NumericalError):
    """A tail integral diverges (or its bound exceeds tolerance)."""


class HypothesisError(WContrastError):
    """An assumption checker failed and no override was given."""

    exit_code = 4
