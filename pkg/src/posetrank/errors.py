"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when an operation is called with ill-formed input."""


class ValidationError(InputError):
    """Raised when a poset, filtration or module fails its structural checks."""
