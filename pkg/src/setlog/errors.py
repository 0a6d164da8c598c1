"""Exception types shared across the engine."""


class SetlogError(Exception):
    """Base class for user-facing engine errors."""


class ParseError(SetlogError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        where = f" at line {line}, column {col}" if line is not None else ""
        super().__init__(f"syntax error: {message}{where}")


class TypeCheckError(SetlogError):
    pass


class UnknownClauseError(SetlogError):
    pass


class TimeoutExceeded(SetlogError):
    """Raised when a goal exhausts its solving budget."""
