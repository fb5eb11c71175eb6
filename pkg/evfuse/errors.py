"""Exception types shared by the evfuse modules."""

from __future__ import annotations


class EvfuseError(ValueError):
    """Base class for domain violations detected by evfuse."""


class FormatError(EvfuseError):
    """Input data does not follow one of the evfuse file formats.

    Attributes:
        line: One-based line number of the offending line in text formats,
            ``None`` for binary formats or whole-file problems.
    """

    def __init__(self, message: str, line: int | None = None) -> None:
        """Build the error, prefixing the line number when known.

        Args:
            message: Human readable description of the problem.
            line: One-based line number where the problem was found.
        """
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(EvfuseError):
    """A configuration value violates its domain constraint.

    Attributes:
        field: Dotted path of the offending field, e.g. ``voxel.bins``.
    """

    def __init__(self, field: str, message: str) -> None:
        """Build the error with the field path in front of the message.

        Args:
            field: Dotted path of the offending configuration field.
            message: Description of the violated constraint.
        """
        self.field = field
        super().__init__(f"{field}: {message}")
