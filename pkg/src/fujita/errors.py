"""Exception types shared across the package."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of an operation."""


class ValidationError(ValueError):
    """Input object violates a structural or modelling constraint.

    ``errors`` holds every problem found, not just the first.
    """

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = list(errors) if errors else [message]


class NumericalError(RuntimeError):
    """A quadrature or iteration failed to converge.

    ``diagnostics`` carries whatever the failing routine could report
    (error estimates, iteration counts, last residual).
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class RangeError(ValueError):
    """Query outside the range covered by stored data."""
