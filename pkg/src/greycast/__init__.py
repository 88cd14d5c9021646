"""Grey-system forecasting with fractional accumulation and GWO tuning."""

__version__ = "0.1.0"

from .accumulation import cfa, cfd, classical_ago, frac_binomial_coefficient
from .evaluation import ComparisonTable, EvaluationReport, ape, compare, lewis_grade, mape
from .exceptions import (ConfigurationError, CsvFormatError, EstimationError,
                         GreycastError, InfeasibleModelError, OptimizationError)
from .models import CCFNGBM, DGM, FNGBM, GM, NGBM, make_model, model_from_dict, model_to_dict
from .optimizer import GwoConfig, gwo_minimize, model_fitness, optimize
from .series import SplitSpec, TimeSeries, load_fixture, read_csv, split, write_csv

__all__ = [
    "CCFNGBM", "DGM", "FNGBM", "GM", "NGBM",
    "TimeSeries", "SplitSpec", "split", "load_fixture", "read_csv", "write_csv",
    "cfa", "cfd", "classical_ago", "frac_binomial_coefficient",
    "ape", "mape", "lewis_grade", "compare", "EvaluationReport", "ComparisonTable",
    "GwoConfig", "gwo_minimize", "model_fitness", "optimize",
    "make_model", "model_to_dict", "model_from_dict",
    "GreycastError", "ConfigurationError", "CsvFormatError", "EstimationError",
    "InfeasibleModelError", "OptimizationError",
]
