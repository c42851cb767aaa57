from .fits import (
    FitOptions,
    FitReport,
    PairFit,
    fit_avoided_crossing,
    fit_lorentzian_pair,
    fit_map,
    fit_trace,
)
from .lm import LMOptions, LMResult, fd_jacobian, lm_minimize
from .peaks import Peak, find_peaks, smooth_db

__all__ = [
    "FitOptions",
    "FitReport",
    "LMOptions",
    "LMResult",
    "PairFit",
    "Peak",
    "fd_jacobian",
    "find_peaks",
    "fit_avoided_crossing",
    "fit_lorentzian_pair",
    "fit_map",
    "fit_trace",
    "lm_minimize",
    "smooth_db",
]
