"""Exception types shared across the package."""


class BeamOptError(Exception):
    """Base class for all beamopt errors."""


class FieldShapeError(BeamOptError):
    """A field does not match the grid it is used with, or holds bad values."""


class InvalidStiffnessError(BeamOptError):
    """Stiffness profile is not strictly positive and finite everywhere."""


class NumericalFailureError(BeamOptError):
    """A linear solve or time march failed."""


class DivergenceError(NumericalFailureError):
    """Non-finite values appeared during a time march."""


class StepFailureError(NumericalFailureError):
    """No descent step could be found at some optimizer iterate."""


class ConfigError(BeamOptError):
    """Invalid configuration value or unparseable config text."""

    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f" (line {line})" if column is None else f" (line {line}, column {column})"
        super().__init__(message + loc)
        self.line = line
        self.column = column


class FieldIOError(BeamOptError):
    """A field CSV file could not be parsed."""


class GridMismatchError(FieldIOError):
    """Coordinates in a field file disagree with the configured grid."""
