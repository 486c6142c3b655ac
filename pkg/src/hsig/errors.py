"""Exception types shared across the package."""


class HsigError(Exception):
    """Base class for all package errors."""


class ConfigurationError(HsigError, ValueError):
    """Invalid parameters such as mismatched algebras or a negative truncation."""


class InvalidIncrement(HsigError, ValueError):
    """An increment passed to an exponential has a nonzero unit coefficient."""


class ValidationError(HsigError, ValueError):
    """A filtered process failed validation.

    The individual problems are available as ``diagnostics``.
    """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class ResourceError(HsigError, MemoryError):
    """A computation would exceed the configured size budget."""

    def __init__(self, message, estimate=None):
        self.estimate = estimate
        super().__init__(message)
