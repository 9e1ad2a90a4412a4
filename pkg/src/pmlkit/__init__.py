"""pmlkit: approximate profile maximum likelihood and plug-in property estimation."""

from .allocation import (
    AllocationMatrix,
    check_frac_feasible,
    check_integral_feasible,
    cost_matrix,
    grad_log_g,
    log_g,
    row_entropy_term,
)
from .distribution import PseudoDistribution
from .errors import PmlkitError
from .estimator import ProfileMaximumLikelihood, check_samples
from .grid import DiscretizationSet, build_grid, floor_to_grid, round_distribution, scale_grid
from .oracle import OracleBudget, exact_discrete_pml, exact_profile_prob, iter_profiles
from .pipeline import (
    EstimateResult,
    PipelineResult,
    RunConfig,
    approximate_pml,
    discretize,
    distribution_from_matrix,
    estimate,
    rebalance_levels,
)
from .profile import Profile, build_profile, log_c_phi, profile_from_counts
from .properties import (
    PropertyValue,
    compute_property,
    distance_to_uniformity,
    entropy,
    sorted_l1,
    support_coverage,
    support_size,
)
from .rounding import (
    SwapTrace,
    combine,
    create,
    partial_round,
    partial_round_special,
    round_i_row,
    split,
    swap,
    swap_matrix_round,
    trans,
)
from .solver import SolveResult, lmo, solve_frac, sparsify

__version__ = "0.1.0"

__all__ = [
    "AllocationMatrix",
    "DiscretizationSet",
    "EstimateResult",
    "OracleBudget",
    "PipelineResult",
    "PmlkitError",
    "Profile",
    "ProfileMaximumLikelihood",
    "PropertyValue",
    "PseudoDistribution",
    "RunConfig",
    "SolveResult",
    "SwapTrace",
    "approximate_pml",
    "build_grid",
    "build_profile",
    "check_frac_feasible",
    "check_integral_feasible",
    "check_samples",
    "combine",
    "compute_property",
    "cost_matrix",
    "create",
    "discretize",
    "distance_to_uniformity",
    "distribution_from_matrix",
    "entropy",
    "estimate",
    "exact_discrete_pml",
    "exact_profile_prob",
    "floor_to_grid",
    "grad_log_g",
    "iter_profiles",
    "lmo",
    "log_c_phi",
    "log_g",
    "partial_round",
    "partial_round_special",
    "profile_from_counts",
    "rebalance_levels",
    "round_distribution",
    "round_i_row",
    "row_entropy_term",
    "scale_grid",
    "solve_frac",
    "sorted_l1",
    "sparsify",
    "split",
    "support_coverage",
    "support_size",
    "swap",
    "swap_matrix_round",
    "trans",
]
