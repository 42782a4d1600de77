"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: bad inputs exit 1, unconverged
computations exit 2, failed verifications exit 3.
"""

from __future__ import annotations


class PlurinormError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(PlurinormError):
    """A numeric or structural parameter is outside its admissible range."""


class DomainMismatchError(PlurinormError):
    """A point, function, or exhaustion is used on the wrong domain."""


class UnsupportedConfigurationError(PlurinormError):
    """A mathematically meaningful request outside the implemented scope."""


class EvaluationError(PlurinormError):
    """An integrand evaluated to a non-finite value at a quadrature node."""

    def __init__(self, message: str, node=None):
        super().__init__(message)
        self.node = node


class InfiniteCountingError(PlurinormError):
    """The counting function diverges: w lies in the image of the pole set.

    This is a first-class outcome, not a bug; sweep drivers catch it,
    record the offending w, and continue.
    """

    def __init__(self, message: str, w=None, pole=None):
        super().__init__(message)
        self.w = w
        self.pole = pole


class PreconditionError(PlurinormError):
    """A theorem's hypothesis fails for the requested configuration."""
