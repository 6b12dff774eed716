"""
All errors raised by qnet derive from :class:`QnetError`. Each one carries a numeric code, so that the command line
and any calling script can react to a failure without parsing messages. The command line maps the codes to process
exit statuses: configuration problems exit with 2, numerical convergence failures exit with 3 and any other library
error exits with 1.

Pre-defined exceptions use the following error codes::

    QNET_INVALID_DIMENSION = 100
    QNET_DIMENSION_MISMATCH = 101
    QNET_UNKNOWN_SUBSYSTEM = 102
    QNET_INVALID_PARAMETERS = 110
    QNET_CONFIGURATION_ERROR = 200
    QNET_CONVERGENCE_ERROR = 300
    QNET_DEGENERATE_STEADY_STATE = 301
    QNET_SIZE_LIMIT = 400
    QNET_UNSUPPORTED_CLOSED_FORM = 401
    QNET_PRECONDITION_FAILED = 402
    QNET_RESONANCE_SINGULARITY = 403
    QNET_CODE_SPACE = 404

"""

from __future__ import annotations

from typing import Any

QNET_INVALID_DIMENSION = 100
QNET_DIMENSION_MISMATCH = 101
QNET_UNKNOWN_SUBSYSTEM = 102
QNET_INVALID_PARAMETERS = 110
QNET_CONFIGURATION_ERROR = 200
QNET_CONVERGENCE_ERROR = 300
QNET_DEGENERATE_STEADY_STATE = 301
QNET_SIZE_LIMIT = 400
QNET_UNSUPPORTED_CLOSED_FORM = 401
QNET_PRECONDITION_FAILED = 402
QNET_RESONANCE_SINGULARITY = 403
QNET_CODE_SPACE = 404

EXIT_SUCCESS = 0
EXIT_FAILURE = 1
EXIT_CONFIG_ERROR = 2
EXIT_CONVERGENCE_ERROR = 3


class QnetError(Exception):
    """
    This is the base class of all qnet exceptions. Code calling the library may catch it to handle any
    error raised by a computation.
    """

    exit_code = EXIT_FAILURE

    def __init__(self, code: int, message: str, data: Any = None):
        super().__init__(f"[{code}] {message}")
        self.code = code
        self.message = message
        self.data = data


class InvalidDimension(QnetError):
    """Raised when a Hilbert space or an operator is built with an unusable dimension."""

    def __init__(self, message: str, data: Any = None):
        super().__init__(QNET_INVALID_DIMENSION, f"Invalid dimension: {message}", data)


class DimensionMismatch(QnetError):
    """Raised when two objects combined together do not live in compatible spaces."""

    def __init__(self, message: str, data: Any = None):
        super().__init__(QNET_DIMENSION_MISMATCH, f"Dimension mismatch: {message}", data)


class UnknownSubsystem(QnetError):
    """Raised when a subsystem label is not part of a Hilbert space."""

    def __init__(self, label: str, data: Any = None):
        super().__init__(QNET_UNKNOWN_SUBSYSTEM, f'Unknown subsystem: "{label}"', data)


class InvalidParameters(QnetError):
    """Raised when physical parameters violate their invariants (negative rates, |r| >= 1, ...)."""

    def __init__(self, message: str, data: Any = None):
        super().__init__(QNET_INVALID_PARAMETERS, f"Invalid parameters: {message}", data)


class ConfigurationError(QnetError):
    """Raised when a run configuration cannot be read or does not follow its schema."""

    exit_code = EXIT_CONFIG_ERROR

    def __init__(self, message: str, data: Any = None):
        super().__init__(QNET_CONFIGURATION_ERROR, f"Configuration error: {message}", data)


class ConvergenceError(QnetError):
    """Raised when a numerical procedure does not reach its tolerance."""

    exit_code = EXIT_CONVERGENCE_ERROR

    def __init__(self, message: str, data: Any = None, code: int = QNET_CONVERGENCE_ERROR):
        super().__init__(code, f"Convergence failure: {message}", data)


class StiffnessError(ConvergenceError):
    """Raised when the adaptive integrator gives up (step size underflow)."""

    def __init__(self, message: str, data: Any = None):
        super().__init__(f"integrator stopped, problem may be stiff ({message})", data)


class DegenerateSteadyState(ConvergenceError):
    """Raised when the generator has more than one stationary state."""

    def __init__(self, nullity: int):
        super().__init__(
            f"steady state is not unique, null space has dimension {nullity}",
            data={"nullity": nullity},
            code=QNET_DEGENERATE_STEADY_STATE,
        )
        self.nullity = nullity


class SizeLimitExceeded(QnetError):
    """Raised when a dense representation would exceed the configured size cap."""

    def __init__(self, message: str, data: Any = None):
        super().__init__(QNET_SIZE_LIMIT, f"Size limit exceeded: {message}", data)


class UnsupportedClosedForm(QnetError):
    """Raised when a closed-form expression is requested outside of its validity domain."""

    def __init__(self, message: str, data: Any = None):
        super().__init__(
            QNET_UNSUPPORTED_CLOSED_FORM,
            f"Closed form unavailable: {message}. Use general_scattering() instead",
            data,
        )


class PreconditionError(QnetError):
    """Raised when an operation requires a regime (unidirectional nodes, resonant settings...) not met by its input."""

    def __init__(self, message: str, data: Any = None):
        super().__init__(QNET_PRECONDITION_FAILED, f"Precondition failed: {message}", data)


class ResonanceSingularity(QnetError):
    """Raised when a resolvent cannot be computed because the linear system is singular."""

    def __init__(self, message: str, data: Any = None):
        super().__init__(QNET_RESONANCE_SINGULARITY, f"Singular resolvent: {message}", data)


class CodeSpaceError(QnetError):
    """Raised when a toric code state is required to lie in the code space but has no overlap with it."""

    def __init__(self, message: str, data: Any = None):
        super().__init__(QNET_CODE_SPACE, f"State outside code space: {message}", data)


class WeakCouplingWarning(UserWarning):
    """Emitted when circuit parameters leave the weak-coupling regime the formulas assume."""


class CodeSpaceWarning(UserWarning):
    """Emitted when a state is projected back onto the toric code space."""
