"""Coverage probability and throughput of Poisson downlink networks under multi-slope path loss."""

from .analytic import (
    CcdfCurve,
    CoverageResult,
    DomainError,
    Method,
    Metric,
    NetworkScenario,
    ccdf,
    coverage,
    coverage_density,
    coverage_dual,
    coverage_general,
    coverage_multislope,
    coverage_sinr_lower_bound_tworay,
    coverage_sir,
    coverage_snr,
    coverage_snr_tworay,
    coverage_tworay,
    db_to_linear,
    linear_to_db,
    potential_throughput,
    sir_coverage_standard,
)
from .montecarlo import EmpiricalCcdf, Fading, SimConfig, estimate_ccdf, simulate
from .pathloss import PathLossModel, evaluate, make_dual, make_multislope, make_standard
from .quadrature import ConvergenceError
from .scaling import DensitySweep, phase_transition_report, sweep_density
from .specfun import c_beta, exp_integral_e1, lower_incomplete_gamma, q_function

__version__ = "0.1.0"

__all__ = [
    "CcdfCurve", "CoverageResult", "DomainError", "Method", "Metric", "NetworkScenario",
    "ccdf", "coverage", "coverage_density", "coverage_dual", "coverage_general",
    "coverage_multislope", "coverage_sinr_lower_bound_tworay", "coverage_sir", "coverage_snr",
    "coverage_snr_tworay", "coverage_tworay", "db_to_linear", "linear_to_db",
    "potential_throughput", "sir_coverage_standard",
    "EmpiricalCcdf", "Fading", "SimConfig", "estimate_ccdf", "simulate",
    "PathLossModel", "evaluate", "make_dual", "make_multislope", "make_standard",
    "ConvergenceError", "DensitySweep", "phase_transition_report", "sweep_density",
    "c_beta", "exp_integral_e1", "lower_incomplete_gamma", "q_function",
]
