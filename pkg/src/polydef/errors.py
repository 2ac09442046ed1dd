"""Exception types shared across the toolkit.

Each class carries the process exit code the command line maps it to.
"""


class PolydefError(Exception):
    exit_code = 1
    kind = "error"


class InputFileError(PolydefError):
    """A required input file does not exist or cannot be opened."""

    exit_code = 3
    kind = "missing-input"


class ParseError(PolydefError, ValueError):
    """Malformed file contents; message carries the line (and column if known)."""

    exit_code = 4
    kind = "parse"

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class StructuralError(ParseError):
    """File parses token-wise but its record structure is inconsistent."""

    kind = "structure"


class ValidationError(PolydefError, ValueError):
    """An argument or object violates a documented precondition or invariant."""

    exit_code = 5
    kind = "invalid"


class NotFoundError(PolydefError, LookupError):
    exit_code = 6
    kind = "not-found"


class OccupationError(ValidationError):
    """Electron count cannot be mapped onto an integer number of filled bands."""

    exit_code = 7
    kind = "occupation"
