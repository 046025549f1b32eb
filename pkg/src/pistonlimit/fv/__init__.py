"""Finite-volume cross-check of the exact piston solutions."""

from ._backend import ENV_FLAG, default_backend, numba_available
from .scheme import (
    FvConfig, FvError, FvResult, GridStudy, concentration_trend, convergence_order, exact_cell_averages,
    grid_study, max_wave_speed, run_fv,
)

__all__ = [
    "ENV_FLAG", "FvConfig", "FvError", "FvResult", "GridStudy", "concentration_trend", "convergence_order",
    "default_backend", "exact_cell_averages", "grid_study", "max_wave_speed",
    "numba_available", "run_fv",
]
