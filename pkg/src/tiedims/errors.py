"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class ParseError(ToolkitError):
    """An input file could not be parsed. Carries the offending line number."""

    def __init__(self, message: str, line_no: int | None = None):
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)
        self.line_no = line_no


class NotFoundError(ToolkitError):
    """A referenced entity (node, session, ...) does not exist."""


class ConfigError(ToolkitError):
    """Invalid configuration or parameters, detected before any work is done."""


class ShortfallError(ToolkitError):
    """A sampling request could not be satisfied; reports what was achieved."""

    def __init__(self, message: str, requested: int, achieved: int):
        super().__init__(f"{message} (requested {requested}, achieved {achieved})")
        self.requested = requested
        self.achieved = achieved


class DataError(ToolkitError):
    """Data is insufficient or degenerate for the requested computation."""


class ConflictError(ToolkitError):
    """An operation conflicts with current state (e.g. out-of-sync client)."""
