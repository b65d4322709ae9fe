"""Expected zero distributions of random sums sum_j eta_j f_j(z) with iid N(0, 1) coefficients."""
from __future__ import annotations

from .basis import BasisFamily, EvalVector, Kind, evaluate_basis
from .density import (
    AxisBand,
    f_expectation,
    f_jump_limits,
    g_density,
    g_density_imag_axis,
    h_density,
)
from .kernels import KernelBundle, compute_kernels, e1_real
from .montecarlo import RootHistogram, TrialConfig, compare_histogram, roots_trig, run_trials
from .quadrature import QuadratureSpec, Window, expected_zeros_area, expected_zeros_contour
from .roots import roots_polynomial

__version__ = "0.1.0"

__all__ = [
    "AxisBand",
    "BasisFamily",
    "EvalVector",
    "KernelBundle",
    "Kind",
    "QuadratureSpec",
    "RootHistogram",
    "TrialConfig",
    "Window",
    "compare_histogram",
    "compute_kernels",
    "e1_real",
    "evaluate_basis",
    "expected_zeros_area",
    "expected_zeros_contour",
    "f_expectation",
    "f_jump_limits",
    "g_density",
    "g_density_imag_axis",
    "h_density",
    "roots_polynomial",
    "roots_trig",
    "run_trials",
]
