from typing import Optional


class RelayLabError(Exception):
    """Base class for all relaylab errors."""


class ConfigurationError(RelayLabError, ValueError):
    """Invalid profile, method combination or experiment configuration."""


class GridMismatchError(ConfigurationError):
    """Analysis and simulation series share no grid points."""


class DomainError(RelayLabError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class ExpansionTooLargeError(DomainError):
    """Subset expansion would exceed its term budget; use quadrature instead."""


class DegenerateChannelError(RelayLabError, ValueError):
    """A relay has zero min-gain, so its selection timer never expires."""


class NonConvergenceError(RelayLabError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance.

    The best estimate found before giving up is kept on the exception.
    """

    def __init__(self, message: str, best_estimate: float, error_estimate: Optional[float] = None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate
