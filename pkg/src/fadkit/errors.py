"""Exception hierarchy shared across the toolkit.

The command-line layer maps these onto process exit codes:
ConfigError -> 2, DataError -> 3, NumericalError -> 4.
"""


class FadkitError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(FadkitError):
    """Invalid configuration: bad flags, missing paths, out-of-range options."""


class DataError(FadkitError):
    """Input data violates a contract (shape, finiteness, missing keys)."""


class FormatError(DataError):
    """A binary or JSON artifact does not match its declared format."""


class LengthError(FormatError):
    """Payload length disagrees with the header."""


class UnframeableClipError(DataError):
    """Clip is shorter than the analysis window and cannot produce a frame."""


class InsufficientDataError(DataError):
    """Too few observations for the requested statistic."""


class UndefinedCorrelationError(DataError):
    """Rank correlation is undefined because an input has zero rank variance."""


class NumericalError(FadkitError):
    """A numerical routine produced or detected an invalid result."""


class IndefiniteMatrixError(NumericalError):
    """A matrix required to be positive semidefinite has a significantly
    negative eigenvalue, beyond what rounding noise can explain."""


class UndefinedInverseError(NumericalError):
    """Inverse FAD requested for a distance of exactly zero."""
