"""Exception types shared by every module."""


class RelkitError(Exception):
    """Base class for library errors."""


class ParseError(RelkitError):
    """Malformed text input; carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ArityError(RelkitError):
    """A tuple or automaton has the wrong number of components."""


class BudgetError(RelkitError):
    """A construction or search exceeded its configured cap.

    ``needed`` is the size that would have been required when it is known.
    """

    def __init__(self, message: str, *, cap: int | None = None, needed: int | None = None,
                 stage: str | None = None):
        self.cap = cap
        self.needed = needed
        self.stage = stage
        super().__init__(message)
