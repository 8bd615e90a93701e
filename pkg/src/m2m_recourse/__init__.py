"""Many-to-many algorithmic recourse as capacitated weighted bipartite matching."""

__version__ = "0.1.0"

from .core import (
    CapacityVector,
    CostMatrix,
    Matching,
    PenaltyConfig,
    RecourseError,
    SizeError,
    ValidationError,
    WeightMatrix,
    WelfareReport,
    evaluate,
    individual_welfare,
)
from .weights import to_weights
from .matching import brute_force_matching, solve_matching
from .capacity import optimal_capacity, welfare_curve
from .penalized import enumerate_capacities, local_search_penalized, solve_penalized
from .recourse import ActionConstraints, Infeasible, LinearProvider, build_cost_matrix, min_cost_action

__all__ = [
    "ActionConstraints",
    "CapacityVector",
    "CostMatrix",
    "Infeasible",
    "LinearProvider",
    "Matching",
    "PenaltyConfig",
    "RecourseError",
    "SizeError",
    "ValidationError",
    "WeightMatrix",
    "WelfareReport",
    "brute_force_matching",
    "build_cost_matrix",
    "enumerate_capacities",
    "evaluate",
    "individual_welfare",
    "local_search_penalized",
    "min_cost_action",
    "optimal_capacity",
    "solve_matching",
    "solve_penalized",
    "to_weights",
    "welfare_curve",
]
