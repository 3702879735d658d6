"""Exception hierarchy shared across the package.

The CLI maps these onto distinct exit codes, so keep the split between
parse-time and domain-level failures.
"""


class StabnetError(Exception):
    """Base class for all errors raised by stabnet."""


class ParseError(StabnetError):
    """Malformed input file (edge list, GML, partition file)."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DomainError(StabnetError):
    """Structurally valid input that violates an operation's precondition."""


class GenerationError(StabnetError):
    """A seeded generator failed to satisfy its constraints."""
