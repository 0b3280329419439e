"""Longest-path depths in scaled-attachment random recursive DAGs and
minima of branching random walks."""

__version__ = "0.1.0"

from .attachment import AttachmentSpec, StepSpec, cumulant, mean_step, sample, spec_from_json
from .brw import (
    BrwMinResult,
    TailEstimate,
    exact_lattice_min_cdf,
    left_tail_estimate,
    right_tail_estimate,
    simulate_min,
)
from .constants import LimitConstants, beta, gamma, lambda_k, legendre, limit_constants
from .errors import (
    BudgetError,
    CapacityError,
    DagDepthError,
    DomainError,
    EmptyError,
    NoRootError,
    RootError,
    SpecError,
    UnderpoweredError,
)
from .harness import ExperimentConfig, run_brw_tails, run_convergence
from .oracle import ExactDepthResult, exact_depths
from .rng import derive_seed
from .sarrd import (
    DepthProfile,
    DepthStats,
    ancestor_label,
    depth_stats,
    generate_depths,
    ideal_tree_block_greedy,
)
from .stats import StatSummary
