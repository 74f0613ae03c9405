"""Exception hierarchy shared across the package."""


class FaclocError(Exception):
    """Base class for all package errors."""


class StructuralError(FaclocError, IndexError):
    """An index or dimension does not match the instance it refers to."""


class ParameterError(FaclocError, ValueError):
    """A solver or generator parameter is outside its valid range."""


class ParseError(FaclocError, ValueError):
    """Malformed input text.

    ``position`` is the zero-based token (or line) index where parsing failed.
    """

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class GenerationError(FaclocError, RuntimeError):
    """A random generator could not produce a valid instance."""
