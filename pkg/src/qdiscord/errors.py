"""Exception types shared across the package."""


class InvalidStateError(ValueError):
    """A matrix or coefficient triple does not describe a physical state."""

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class UnsupportedSizeError(ValueError):
    """The requested qubit count is outside the supported range for this operation."""
