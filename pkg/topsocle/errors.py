"""Exception hierarchy shared by the engine and the CLI."""

from typing import Optional


class TopSocleError(Exception):
    """Base class for every error the engine raises on purpose"""


class ConfigurationError(TopSocleError):
    """Invalid characteristic, mixed backends or bad settings"""


class UsageError(TopSocleError):
    """An operation was called outside its contract"""


class ScenarioError(TopSocleError):
    """A scenario's structural hypothesis does not hold"""


class NotHomogenizableError(TopSocleError):
    """No positive x-weights make f homogeneous in the combined grading"""

    def __init__(self, message: str):
        super().__init__(
            f"{message}; degreewise computation needs a combined grading "
            "(filtration mode for non-homogenizable f is not supported)"
        )


class FieldDivisionError(TopSocleError, ZeroDivisionError):
    """Inverse of zero requested in a field"""


class ExpressionError(TopSocleError):
    """Parse error in an expression string, with position and offending token"""

    def __init__(self, message: str, position: Optional[int] = None, token: Optional[str] = None):
        self.position = position
        self.token = token
        if position is not None:
            message = f"{message} at position {position} (token {token!r})"
        super().__init__(message)
