"""Evaluation toolkit for synthetic time-series generation."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .errors import (DegenerateError, FormatError, InputError, PairingError, ParameterError,
                     ShapeError, SplitError, TruncatedError, TsgError)
from .measures import (MeasureConfig, MeasureReport, acd, dtw, dtw_set, ed, kd, mdd, run_suite,
                       sd, timed)
from .tensor import (DatasetMeta, RawSeries, get_dataset, load_raw_csv, load_tensor, registry,
                     save_tensor)

__all__ = [
    "BACKEND", "DatasetMeta", "DegenerateError", "FormatError", "InputError", "MeasureConfig",
    "MeasureReport", "PairingError", "ParameterError", "RawSeries", "ShapeError", "SplitError",
    "TruncatedError", "TsgError", "acd", "dtw", "dtw_set", "ed", "get_dataset", "kd",
    "load_raw_csv", "load_tensor", "mdd", "registry", "run_suite", "save_tensor", "sd", "timed",
]
