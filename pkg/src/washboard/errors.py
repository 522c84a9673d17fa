"""Exception hierarchy.

ParameterError / ConfigError map to CLI exit code 2, NumericalError and
its subclasses to exit code 3, failed validation checks to exit code 1.
"""


class WashboardError(Exception):
    """Base class for all package errors."""


class ParameterError(WashboardError):
    """Physically invalid or inconsistent input parameters."""


class ConfigError(WashboardError):
    """Malformed configuration file or command-line override."""


class NumericalError(WashboardError):
    """A numerical routine failed or produced an untrustworthy result."""


class RegimeError(NumericalError):
    """Parameters outside the validity regime of a closed-form solution."""


class IntegrabilityError(NumericalError):
    """Coherence-component coefficients left the integrable branch."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time


class TruncationError(NumericalError):
    """Charge-basis truncation window too small for the requested run."""


class CoverageError(NumericalError):
    """Requested phase-space grid does not cover the state."""


class BranchError(NumericalError):
    """Continuous tracking of a complex square-root branch failed."""


class PoleError(NumericalError):
    """Closed-form expression evaluated too close to one of its poles."""

    def __init__(self, message: str, time: float | None = None):
        super().__init__(message)
        self.time = time
