"""Exception types shared across the package."""


class FZError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(FZError, ValueError):
    pass


class UnsupportedLengthError(FZError, ValueError):
    pass


class SizeCapError(InvalidArgumentError):
    pass


class ConvergenceError(FZError, RuntimeError):
    """An iterative method stopped before meeting its tolerance.

    ``best`` holds the last iterates so callers can still inspect them.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class PartialResultError(ConvergenceError):
    """QR iteration stalled on a block; ``best`` holds the eigenvalues deflated so far."""


class DegenerateMapError(FZError, ZeroDivisionError):
    """The Moebius map of a word is affine at this z (R(z) = 0): one fixed point sits at infinity."""

    def __init__(self, message, z=None):
        super().__init__(message)
        self.z = z


class SingularGaugeError(FZError, ValueError):
    pass


class InsufficientWordsError(FZError, ValueError):
    pass


class DataFormatError(FZError, ValueError):
    """A data file could not be parsed; ``line`` is the 1-based line number when known."""

    def __init__(self, message, path=None, line=None):
        where = f"{path}:{line}: " if path is not None and line is not None else ""
        super().__init__(where + message)
        self.path = path
        self.line = line
