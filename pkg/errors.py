"""
Exception hierarchy for the ultrametric laboratory.
The CLI maps these onto exit codes: ConfigError -> 1, NumericalError -> 2.
"""


class UltrametricLabError(Exception):
    """Base class for every error raised by the laboratory."""


class DomainError(UltrametricLabError, ValueError):
    """An argument lies outside the range an operation is defined on."""


class NormalizationError(DomainError):
    """A vector expected to be l2-normalized is not."""


class InsufficientDataError(UltrametricLabError, ValueError):
    """Too few points, gaps or spectra to form the requested statistic."""


class MissingEigenvectorsError(UltrametricLabError, ValueError):
    """An eigenvector observable was requested from a values-only spectrum."""


class NumericalError(UltrametricLabError, RuntimeError):
    """Eigensolver failed to converge or violated its residual contract."""


class ConfigError(UltrametricLabError, ValueError):
    """Unreadable configuration, unknown key or flag, or invalid value."""
