"""Whispering-gallery doublet simulation and avoided-crossing parameter recovery."""
from .config import RunConfig, load_config, paper_config
from .doublet import (
    BlochCoefficients,
    DoubletSolution,
    Family,
    PolarizationState,
    bloch_coefficients,
    diagonalize,
)
from .errors import (
    ConfigError,
    ConvergenceFailure,
    FormatError,
    InsufficientSpan,
    NumericalFailure,
    WgDoubletError,
)
from .estimation import FitOptions, FitReport, find_peaks, fit_map, fit_trace, lm_minimize
from .kernels import BACKEND
from .medium import EsrLine, MediumModel, PerturbationTensor
from .response import CavityModel, ModeResponse, TransmissionMap, sweep, synthesize_map

__version__ = "0.1.0"
