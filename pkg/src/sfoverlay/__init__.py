"""Distributed rewiring of overlay networks towards a tunable scale-free degree exponent."""

from .analysis import (
    FitError,
    FitResult,
    degree_distribution,
    degree_tvd_correlation,
    estimate_tvd,
    fit_power_law,
    min_walk_length,
    sample_discrete_power_law,
    total_variation,
    tvd_sweep,
)
from .bounds import bound_report, eigengap_lower_bound, second_eigenvalue, spectral_bound, zipf_walk_bound
from .estimators import PowerLawFitter, ScaleFreeRewirer
from .generators import GenSpec, generate_ba, generate_er, random_connected_graph
from .graph import Graph, GraphError, read_edgelist, write_edgelist
from .protocol import SimConfig, Simulator, run_cycle, run_multi_cycle
from .stationary import TargetSpec, acceptance_ratio, alpha_from_gamma, stationary_distribution
from .walk import WalkSnapshot, exact_distribution, mh_step, transition_matrix, transition_matrix_sparse

__version__ = "0.1.0"

__all__ = [
    "FitError", "FitResult", "GenSpec", "Graph", "GraphError", "PowerLawFitter", "ScaleFreeRewirer",
    "SimConfig", "Simulator", "TargetSpec", "WalkSnapshot", "acceptance_ratio", "alpha_from_gamma",
    "bound_report", "degree_distribution", "degree_tvd_correlation", "eigengap_lower_bound", "estimate_tvd",
    "exact_distribution", "fit_power_law", "generate_ba", "generate_er", "min_walk_length", "mh_step",
    "random_connected_graph", "read_edgelist", "run_cycle", "run_multi_cycle", "sample_discrete_power_law",
    "second_eigenvalue", "spectral_bound", "stationary_distribution", "total_variation", "transition_matrix",
    "transition_matrix_sparse", "tvd_sweep", "write_edgelist", "zipf_walk_bound",
]
