"""
Error hierarchy for fraudlab.

Every error carries the exit code the ``flab`` command line reports when the
error escapes a command.
"""
import re
from typing import Optional


class LabError(Exception):
    """Base class for all fraudlab errors."""

    exit_code = 1

    @property
    def code(self) -> str:
        """
        Machine-readable snake_case name of the error class.
        """
        return re.sub(r"(?<!^)(?=[A-Z])", "_", type(self).__name__).lower()

    def __reduce__(self):
        # keep line, field and invariant when an error crosses a process boundary
        return (_restore, (type(self), self.args, dict(self.__dict__)))


def _restore(cls, args, state):
    error = cls.__new__(cls)
    Exception.__init__(error, *args)
    error.__dict__.update(state)
    return error


class InputMissingError(LabError):
    """An input file does not exist."""

    exit_code = 3


class ParseError(LabError):
    """
    A row of a CSV or JSON artifact could not be parsed.
    """

    exit_code = 4

    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        """
        Args:
            message: description of the problem
            line: 1-based line number in the file (header is line 1)
            field: name of the offending field
        """
        self.message = message
        self.line = line
        self.field = field
        location = []
        if line is not None:
            location.append(f"line {line}")
        if field is not None:
            location.append(f"field '{field}'")
        prefix = f"{', '.join(location)}: " if location else ""
        super().__init__(f"{prefix}{message}")


class RecordValidationError(ParseError):
    """
    A parsed record violates one of its type invariants.
    """

    def __init__(self, invariant: str, line: Optional[int] = None, field: Optional[str] = None):
        self.invariant = invariant
        super().__init__(f"invariant violated: {invariant}", line=line, field=field)


class ModelFormatError(ParseError):
    """A model file is truncated, fails its schema or has an unknown version."""


class ConfigError(LabError):
    """Invalid or infeasible configuration."""

    exit_code = 5


class DataError(LabError):
    """
    Semantically invalid data for an operation: single-class input, NaN
    features, leaked apps across a split, missing catalog entries.
    """

    exit_code = 6


class ManifestMismatchError(DataError):
    """A model is applied to a matrix built from a different feature manifest."""


class StoreError(LabError):
    """General Store-related error."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
