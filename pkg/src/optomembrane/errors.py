"""Exception types shared across the solver modules."""


class OptomembraneError(Exception):
    """Base class for all solver errors."""


class SingularConfigurationError(OptomembraneError):
    """A parameter combination makes the dispersion formula non-finite.

    The message names the offending term (e.g. the membrane cotangent at
    n_R k0 L_d = j*pi with a lossless membrane).
    """


class ConfigError(OptomembraneError):
    """Invalid or inconsistent configuration input."""


class RootFindingError(OptomembraneError):
    """Fixed-point enumeration failed to converge.

    Carries the scanned interval and the sign-change table that was used for
    bracketing, to make the failure diagnosable.
    """

    def __init__(self, message, interval=None, sign_table=None):
        super().__init__(message)
        self.interval = interval
        self.sign_table = sign_table


class StabilityError(OptomembraneError):
    """An operation that requires a dynamically stable model got an unstable one."""

    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class InvalidStateError(OptomembraneError):
    """A covariance matrix violates its contract (asymmetry, negative determinant, ...)."""


class NumericalError(OptomembraneError):
    """A numerical result violated its accuracy contract (e.g. solver residual bound)."""
