"""Equilibrium computation, first-order checks and profile-graph analysis."""

from .models import (
    DEFAULT_SUPPORT_TOL,
    EquilibriumReport,
    KKTBreakdown,
    ProfileEdge,
    ProfileGraph,
    SolverName,
)
from .waterfilling import (
    best_response,
    equilibrium_gap,
    kkt_breakdown,
    kkt_residual,
    multipliers,
    nash_gap,
    project_profile,
    simplex_project,
    waterfill,
    waterfilling_ratio_gap,
)
from .graph import (
    UnionFind,
    equilibrium_face_dim,
    forest_is_hub_invariant,
    is_forest,
    profile_graph,
    support_mask,
)
from .solvers import (
    build_report,
    grid_minimize_2x2,
    multistart,
    newton_polish,
    solve,
    solve_potential_min,
    solve_sequential_waterfilling,
)

__all__ = [
    "DEFAULT_SUPPORT_TOL",
    "EquilibriumReport",
    "KKTBreakdown",
    "ProfileEdge",
    "ProfileGraph",
    "SolverName",
    "best_response",
    "equilibrium_gap",
    "kkt_breakdown",
    "kkt_residual",
    "multipliers",
    "nash_gap",
    "project_profile",
    "simplex_project",
    "waterfill",
    "waterfilling_ratio_gap",
    "UnionFind",
    "equilibrium_face_dim",
    "forest_is_hub_invariant",
    "is_forest",
    "profile_graph",
    "support_mask",
    "build_report",
    "grid_minimize_2x2",
    "multistart",
    "newton_polish",
    "solve",
    "solve_potential_min",
    "solve_sequential_waterfilling",
]
