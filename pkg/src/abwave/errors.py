"""Exception and warning classes shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument is malformed, out of range, or inconsistent with another."""


class DomainError(ValueError):
    """The requested quantity is undefined or divergent at the given arguments."""


class PreconditionError(ValueError):
    """A mathematical hypothesis required by an estimate check does not hold."""


class ZeroDataError(ValueError):
    """Ratio requested for identically zero data."""


class AccuracyError(ArithmeticError):
    """A numerical target was not reached.

    ``achieved`` carries the measured residual (or tail mass) so callers can
    decide whether the result is still usable.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved


class AccuracyWarning(UserWarning):
    """Result returned, but its estimated accuracy is below the usual target."""
