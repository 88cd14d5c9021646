"""Exception hierarchy. Each category carries a distinct CLI exit code."""


class GreycastError(Exception):
    """Base class for all greycast errors."""

    exit_code = 1


class ConfigurationError(GreycastError):
    """Invalid run configuration: bad split lengths, hyperparameter values, flags."""

    exit_code = 2


class CsvFormatError(GreycastError):
    """Malformed or invalid CSV input."""

    exit_code = 3


class EstimationError(GreycastError):
    """Least-squares estimation failed (singular system, bad background value)."""

    exit_code = 4


class InfeasibleModelError(EstimationError):
    """Model response cannot be evaluated (non-positive base, vanishing development
    coefficient). Surfaced to the optimizer as a penalty."""

    exit_code = 5


class OptimizationError(GreycastError):
    """Hyperparameter search produced no feasible candidate."""

    exit_code = 6

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or []
