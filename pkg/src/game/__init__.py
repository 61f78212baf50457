"""Game instances, power profiles and payoff evaluation."""

from .models import (
    BUDGET_RTOL,
    Game,
    GameDomainError,
    GameError,
    GameIndexError,
    GameShapeError,
    PowerProfile,
    ProfileError,
    as_allocation,
    new_game,
)
from .payoffs import (
    marginal_payoffs,
    node_loads,
    potential,
    reconstruct_marginal_payoffs,
    utility,
    utility_matrix,
    utility_per_node,
    verify_exact_potential,
)
from .generators import collinear_game, random_collinear_game, random_game

__all__ = [
    "BUDGET_RTOL",
    "Game",
    "GameDomainError",
    "GameError",
    "GameIndexError",
    "GameShapeError",
    "PowerProfile",
    "ProfileError",
    "as_allocation",
    "new_game",
    "marginal_payoffs",
    "node_loads",
    "potential",
    "reconstruct_marginal_payoffs",
    "utility",
    "utility_matrix",
    "utility_per_node",
    "verify_exact_potential",
    "collinear_game",
    "random_collinear_game",
    "random_game",
]
