"""Exception types shared across the package."""


class DaodError(Exception):
    """Base class for package-specific errors."""


class InvalidInputError(DaodError, ValueError):
    """Input violates a documented precondition."""


class DimensionMismatchError(InvalidInputError):
    """Paired datasets disagree on feature dimension."""


class NonFiniteError(InvalidInputError):
    """A feature row contains NaN or infinity."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class DegenerateInputError(DaodError, ValueError):
    """Geometry leaves the requested quantity undefined (coincident points,
    zero-norm rows, ...)."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class EmptyKnownTargetsError(DaodError, ValueError):
    """No target sample is currently pseudo-labelled as a known class."""


class NumericalError(DaodError, RuntimeError):
    """Linear solve failed even after jitter escalation."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition
