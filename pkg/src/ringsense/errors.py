"""Exception hierarchy shared by every module.

Each class carries a short ``kind`` string; the CLI reports it in its
machine-readable error JSON and maps it to an exit code.
"""


class RingsenseError(Exception):
    kind = "error"


class DomainError(RingsenseError, ValueError):
    kind = "domain"


class ShapeError(RingsenseError, ValueError):
    kind = "shape"


class PreconditionError(RingsenseError, ValueError):
    kind = "precondition"


class NumericError(RingsenseError, ValueError):
    kind = "numeric"


class SampleRangeError(RingsenseError, ValueError):
    """A sample falls outside the grid it is being mapped onto."""

    kind = "range"

    def __init__(self, message, k=None):
        super().__init__(message)
        self.k = k


class ConfigError(RingsenseError, ValueError):
    kind = "config"


class TrainingError(RingsenseError, RuntimeError):
    """Solver failed to converge; ``diagnostics`` holds the best-so-far state."""

    kind = "training"

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class SchemaError(RingsenseError, ValueError):
    kind = "schema"

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


class MissingInputError(RingsenseError, FileNotFoundError):
    kind = "missing_input"
