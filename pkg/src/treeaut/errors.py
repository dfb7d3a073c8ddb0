"""Exception hierarchy; the CLI maps each family to an exit code."""


class TreeAutError(Exception):
    pass


class ParseError(TreeAutError):
    """Malformed input text (exit code 1)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ValidationError(TreeAutError):
    """Well-formed input that violates a structural invariant (exit code 2)."""


class ResourceLimitExceeded(TreeAutError):
    """A configured node, address or search budget ran out (exit code 3)."""


class InvariantViolation(TreeAutError):
    """An internal consistency check failed; always a bug (exit code 4)."""


class NotApplicable(TreeAutError):
    """The requested construction does not exist for this input."""


class NoWitness(TreeAutError):
    """No one-point extension exists inside the ambient tree."""


class Incompatible(TreeAutError):
    """Two systems cannot be amalgamated by disjoint union over the base."""
