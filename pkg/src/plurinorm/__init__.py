"""Level-set quadrature laboratory for weighted Hardy and Bergman norms,
Nevanlinna-type counting functions, and composition-operator diagnostics
on the unit disk, the unit ball in C^2, and the bidisk."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    DomainMismatchError,
    EvaluationError,
    InfiniteCountingError,
    ParameterError,
    PlurinormError,
    PreconditionError,
    UnsupportedConfigurationError,
)
from .geometry import (
    BIDISK,
    UNIT_BALL,
    UNIT_DISK,
    Domain,
    Exhaustion,
    green_function,
    green_pole,
    log_abs,
    log_max_abs,
    scaled,
    smooth_square,
    truncated,
)
from .functions import (
    ComposedFunction,
    HoloMap,
    Polynomial,
    TestKernel,
    identity_map,
    parse_function,
)
from .weights import gamma_alpha, sigma_alpha, sigma_alpha_full_mass

__all__ = [
    "__version__",
    "BIDISK",
    "UNIT_BALL",
    "UNIT_DISK",
    "Domain",
    "Exhaustion",
    "green_function",
    "green_pole",
    "log_abs",
    "log_max_abs",
    "scaled",
    "smooth_square",
    "truncated",
    "ComposedFunction",
    "HoloMap",
    "Polynomial",
    "TestKernel",
    "identity_map",
    "parse_function",
    "gamma_alpha",
    "sigma_alpha",
    "sigma_alpha_full_mass",
    "DomainMismatchError",
    "EvaluationError",
    "InfiniteCountingError",
    "ParameterError",
    "PlurinormError",
    "PreconditionError",
    "UnsupportedConfigurationError",
]
