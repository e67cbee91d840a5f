"""Global bounds for box-constrained nonconvex QCPs.

Thin wrapper over the C++ core: adaptive refinement of lifted disjunctive
relaxations of y = x^2, solved by an in-tree branch-and-bound engine.
"""

from ._core import (
    Instance,
    additional_gap_closed,
    angle_span,
    block_counts,
    check_projection_equivalence,
    enumerate_disjunction,
    error_bounds,
    gap_percent,
    grid_optimum,
    knot,
    solve,
)

__all__ = [
    "Instance",
    "additional_gap_closed",
    "angle_span",
    "block_counts",
    "check_projection_equivalence",
    "enumerate_disjunction",
    "error_bounds",
    "gap_percent",
    "grid_optimum",
    "knot",
    "solve",
]

__version__ = "0.1.0"
