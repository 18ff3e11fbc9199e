"""Security-aware placement of virtual network functions for 5G network slices."""
from .catalog import build_base_scenario, preset, random_tiny_scenario, tiny_scenario
from .evaluate import check_assignment, check_placement, check_security, derive_quantities
from .metrics import MetricsBundle, activation_metrics, compute_metrics, delay_metrics, exposure_metrics
from .model import Placement, Scenario, SecurityToggles, Weights, validate_scenario
from .solver import SolveReport, SolverConfig, greedy_warmstart, lower_bound, solve, solve_bruteforce

__all__ = [
    "MetricsBundle", "Placement", "Scenario", "SecurityToggles", "SolveReport", "SolverConfig", "Weights",
    "activation_metrics", "build_base_scenario", "check_assignment", "check_placement", "check_security",
    "compute_metrics", "delay_metrics", "derive_quantities", "exposure_metrics", "greedy_warmstart",
    "lower_bound", "preset", "random_tiny_scenario", "solve", "solve_bruteforce", "tiny_scenario",
    "validate_scenario",
]
