"""Exception hierarchy shared across the package."""


class IbRiskError(Exception):
    """Base class for all package errors."""


class InputError(IbRiskError):
    """Malformed or unusable input data (files, records, windows)."""


class ParameterError(IbRiskError):
    """A scalar parameter is outside its accepted range."""


class CalibrationError(IbRiskError):
    """Balance-sheet calibration is infeasible for the given network."""


class InvariantError(IbRiskError):
    """An internal consistency check failed."""
