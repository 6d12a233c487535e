"""Exception types shared across the package."""


class DegenerateInputError(ValueError):
    """Raised when the requested quantity is undefined for the given input,
    e.g. a direction-dependent weight evaluated at the zero frequency."""


class DivergedError(RuntimeError):
    """Raised when time integration produces non-finite values."""
