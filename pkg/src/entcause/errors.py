"""Exception taxonomy shared across the package.

Every error raised by library code derives from :class:`EntcauseError` so
callers (and the CLI, which maps them to exit code 2) can catch one base type.
"""


class EntcauseError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(EntcauseError, ValueError):
    """An argument violates a documented precondition."""


class UnsupportedSizeError(InvalidParameterError):
    """Input exceeds the size a brute-force routine is willing to handle."""


class TargetUnreachableError(InvalidParameterError):
    """The requested entropy target cannot be met for the given support."""


class ConvergenceFailureError(EntcauseError, RuntimeError):
    """Rejection sampling hit its draw cap; carries the best draw found."""

    def __init__(self, message, best=None, best_entropy=None):
        super().__init__(message)
        self.best = best
        self.best_entropy = best_entropy


class InsufficientDataError(EntcauseError, ValueError):
    """An estimator was handed an empty or unusable dataset."""


class TooManyOrientationsError(EntcauseError, RuntimeError):
    """Acyclic-orientation enumeration would exceed the configured cap."""


class CapacityError(EntcauseError, RuntimeError):
    """An exact computation would exceed the configured state-space cap."""


class DataFormatError(EntcauseError, ValueError):
    """A file (CSV, JSON, BIF) does not conform to its documented format."""


class BifParseError(DataFormatError):
    """BIF parsing or validation failure, annotated with a line number."""

    def __init__(self, message, line=None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
