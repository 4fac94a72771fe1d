"""Online fractional knapsack in the random order model.

A deterministic three-phase online algorithm (sample, secretary, knapsack),
the exact offline fractional oracle it is measured against, closed-form
performance bounds with the phase-split optimization, and a Monte Carlo
harness that checks the algorithm and the probability bounds empirically.
"""

from .bounds import (
    BoundParams,
    OptimizationResult,
    d_min,
    excess_constants,
    mu_bar,
    optimize_params,
    p_lower,
    prob_pack_round,
    prob_pack_total,
    q_lower,
    z_many,
    z_single,
)
from .core import (
    FractionalPacking,
    Instance,
    Item,
    OptimalSolution,
    load_instance,
    normalize,
    objective_of,
    save_instance,
    solve_fractional,
)
from .errors import (
    AlternatingSumUnstable,
    ConvergenceFailure,
    DegenerateInstance,
    DomainError,
    DuplicateItem,
    InvalidInstance,
    InvalidPermutation,
    InvalidSpec,
    KeyMismatch,
    OkfracError,
)
from .incremental import IncrementalSolver
from .online import OnlineState, PhaseParams, RunTrace, run
from .sim import (
    Family,
    GeneratorSpec,
    TrialStats,
    estimate_p_ranks,
    generate,
    random_permutation,
    run_trials,
)

__version__ = "0.1.0"

__all__ = [
    "AlternatingSumUnstable",
    "BoundParams",
    "ConvergenceFailure",
    "DegenerateInstance",
    "DomainError",
    "DuplicateItem",
    "Family",
    "FractionalPacking",
    "GeneratorSpec",
    "IncrementalSolver",
    "Instance",
    "InvalidInstance",
    "InvalidPermutation",
    "InvalidSpec",
    "Item",
    "KeyMismatch",
    "OkfracError",
    "OnlineState",
    "OptimalSolution",
    "OptimizationResult",
    "PhaseParams",
    "RunTrace",
    "TrialStats",
    "d_min",
    "estimate_p_ranks",
    "excess_constants",
    "generate",
    "load_instance",
    "mu_bar",
    "normalize",
    "objective_of",
    "optimize_params",
    "p_lower",
    "prob_pack_round",
    "prob_pack_total",
    "q_lower",
    "random_permutation",
    "run",
    "run_trials",
    "save_instance",
    "solve_fractional",
    "z_many",
    "z_single",
]
