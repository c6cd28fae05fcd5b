"""Exception hierarchy shared by the solvers and the command line."""

from __future__ import annotations


class BBMError(Exception):
    """Base class for all package errors."""


class ConfigurationError(BBMError, ValueError):
    """Invalid problem data, parameters or config file content."""


class UnsupportedConfigurationError(ConfigurationError):
    """A valid configuration that a particular solver cannot handle."""


class AccuracyError(BBMError, ArithmeticError):
    """A numerical tolerance could not be met.

    Parameters
    ----------
    message : str
        Human-readable description including which term failed.
    achieved : float, optional
        Best error estimate reached before giving up.
    """

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class StabilityError(AccuracyError):
    """Time stepping blew up."""


class PicardDivergenceError(AccuracyError):
    """Fixed-point iterates stopped contracting."""


class RangeError(BBMError, IndexError):
    """A requested time lies outside the solved horizon."""
