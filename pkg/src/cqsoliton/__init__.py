"""Bound states of the 1D cubic-quintic NLS with an attractive delta potential.

Closed-form soliton profiles, the bifurcation curve with its fold,
a continuous normalized gradient flow solver, Sturm-sequence spectral
analysis of the linearization, and orbital-stability classification.
"""

from .closed_form import (
    SQRT3,
    K_FRONT,
    Branch,
    SolitonSpec,
    check_epsilon,
    eval_derivative,
    eval_profile,
    first_integral_residual,
    fold_point,
    fold_spec,
    free_space_profile,
    front_spec,
    peak_amplitude_squared,
)
from .bifurcation import (
    BifurcationSample,
    CurveTrace,
    mass,
    mass_squared,
    mass_sq_slope,
    slope_limit_at_three_quarters,
    solve_k_for_mass,
    trace_curve,
)
from .gradient_flow import (
    CngfConfig,
    CngfResult,
    Grid,
    GridFunction,
    build_grid,
    cngf_step,
    default_initial_guess,
    energy,
    extracted_k,
    run_cngf,
    sample_profile,
)
from .spectrum import (
    LinearizedOperator,
    SpectrumReport,
    StabilityVerdict,
    assemble_operator,
    classify_stability,
    f_integral,
    fold_kernel_check,
    lowest_eigenvalues,
    morse_index,
    spectrum_report,
    sturm_count,
)
from .validation import run_all as run_validation

__all__ = [
    "SQRT3", "K_FRONT", "Branch", "SolitonSpec", "check_epsilon",
    "eval_derivative", "eval_profile", "first_integral_residual",
    "fold_point", "fold_spec", "free_space_profile", "front_spec",
    "peak_amplitude_squared",
    "BifurcationSample", "CurveTrace", "mass", "mass_squared",
    "mass_sq_slope", "slope_limit_at_three_quarters", "solve_k_for_mass",
    "trace_curve",
    "CngfConfig", "CngfResult", "Grid", "GridFunction", "build_grid",
    "cngf_step", "default_initial_guess", "energy", "extracted_k",
    "run_cngf", "sample_profile",
    "LinearizedOperator", "SpectrumReport", "StabilityVerdict",
    "assemble_operator", "classify_stability", "f_integral",
    "fold_kernel_check", "lowest_eigenvalues", "morse_index",
    "spectrum_report", "sturm_count",
    "run_validation",
]
