"""Exception types shared across the package."""


class NCMaxwellError(Exception):
    """Base class for all package errors."""


class NonZeroMean(NCMaxwellError, ValueError):
    """Input to the inverse Laplacian has a component in the Laplacian null space."""


class BadParams(NCMaxwellError, ValueError):
    pass


class NonFinite(NCMaxwellError, FloatingPointError):
    """Raised when a time step produces NaN or inf values."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class FirstClassViolation(NCMaxwellError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class SingularBlock(NCMaxwellError):
    pass


class MismatchError(NCMaxwellError):
    """A bracket identity failed; ``report`` holds the failing entries."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class FitFailure(NCMaxwellError):
    pass


class ParseError(NCMaxwellError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(NCMaxwellError):
    def __init__(self, field, message=""):
        super().__init__(f"{field}: {message}" if message else field)
        self.field = field
