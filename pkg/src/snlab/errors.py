"""Exception hierarchy shared by all snlab modules."""


class SnlabError(Exception):
    """Base class for all library errors."""


class PreconditionError(SnlabError):
    """An operation was called with inputs violating its contract."""


class BudgetExceededError(SnlabError):
    """A declared search or enumeration budget ran out before an answer."""


class HorizonExceededError(BudgetExceededError):
    """Region enumeration passed the configured point cap.

    Raised instead of hanging when an infimum over an infinite space is
    requested with too large a radius.
    """

    def __init__(self, space_id, radius, cap):
        self.space_id = space_id
        self.radius = radius
        self.cap = cap
        super().__init__(
            f"enumeration horizon exceeded on {space_id!r}: "
            f"more than {cap} points within radius {radius}"
        )


class InsufficientLevelsError(SnlabError):
    """A chain candidate reaches past the enumerated distance levels."""


class MetricViolationError(SnlabError):
    """A purported finite metric fails a metric axiom.

    ``witness`` names the offending points (a pair or a triple).
    """

    def __init__(self, message, witness=()):
        self.witness = tuple(witness)
        super().__init__(message)


class UnvalidatedGraphError(PreconditionError):
    """A weighted graph was used before passing compatibility validation."""


class FileFormatError(SnlabError):
    """An input file could not be parsed; carries path and line context."""

    def __init__(self, path, message, line=None):
        self.path = path
        self.line = line
        where = f"{path}:{line}" if line is not None else str(path)
        super().__init__(f"{where}: {message}")
