"""Exception hierarchy for the dftr toolkit.

Every error raised by the library derives from DftrError so callers can
catch toolkit failures without masking programming errors.
"""


class DftrError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(DftrError, ValueError):
    """A physical or numerical parameter is outside its admissible domain."""


class ContractError(DftrError, ValueError):
    """Inputs violate an operation precondition (grid mismatch, bad state)."""


class SolverError(DftrError, RuntimeError):
    """An iterative solver failed to converge.

    Carries the last residual norm and iteration count when available.
    """

    def __init__(self, message: str, residual: float | None = None,
                 iterations: int | None = None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class IntegrationError(DftrError, RuntimeError):
    """Time integration produced a non-finite state."""

    def __init__(self, message: str, step_index: int | None = None):
        super().__init__(message)
        self.step_index = step_index


class EstimationError(DftrError, RuntimeError):
    """Decay-rate estimation lacked usable data."""

    def __init__(self, message: str, usable_records: int | None = None):
        super().__init__(message)
        self.usable_records = usable_records


class ConfigError(DftrError, ValueError):
    """A run configuration file is malformed or inconsistent."""
