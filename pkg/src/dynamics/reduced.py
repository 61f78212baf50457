"""Games restricted to per-user node subsets."""

from __future__ import annotations
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from src.game.models import Game, GameDomainError, PowerProfile, ProfileError, as_allocation, new_game
from src.game.payoffs import ProfileLike


@dataclass(frozen=True)
class ReducedGame:
    """A game restricted to each user's node subset.

    Attributes:
        game: the reduced game; only nodes used by some user are kept and its
            access mask encodes the subsets.
        original: the full game.
        node_index: original index of every reduced column.
        supports: K×A mask of the subsets in original coordinates.
    """
    game: Game
    original: Game
    node_index: np.ndarray
    supports: np.ndarray

    def embed(self, profile: ProfileLike) -> PowerProfile:
        """Lift a reduced profile into the full strategy space with zeros elsewhere."""
        p = as_allocation(profile)
        full = np.zeros(self.original.shape)
        full[:, self.node_index] = p
        return PowerProfile.for_game(self.original, full, embedded=True)

    def restrict(self, profile: ProfileLike) -> PowerProfile:
        """Project a full profile supported on the subsets down to the reduced game."""
        p = as_allocation(profile)
        if np.any(p[~self.supports] != 0):
            raise ProfileError("profile puts power outside the reduced supports", field="allocation")
        return PowerProfile.for_game(self.game, p[:, self.node_index])


def _support_mask(game: Game, supports: np.ndarray | Sequence[Sequence[int]]) -> np.ndarray:
    if isinstance(supports, np.ndarray) and supports.dtype == bool:
        if supports.shape != game.shape:
            raise GameDomainError(f"support mask must have shape {game.shape}", field="supports")
        return np.array(supports)
    if len(supports) != game.num_users:
        raise GameDomainError(
            f"expected {game.num_users} node subsets, got {len(supports)}", field="supports"
        )
    mask = np.zeros(game.shape, dtype=bool)
    for k, nodes in enumerate(supports):
        for alpha in nodes:
            mask[k, game.check_node(int(alpha))] = True
    return mask


def reduced_game(game: Game, supports: np.ndarray | Sequence[Sequence[int]]) -> ReducedGame:
    """Restrict every user k to its node subset A_k.

    Args:
        game: Full game.
        supports: K×A boolean mask or one list of node indices per user.

    Raises:
        GameDomainError: if some A_k is empty or not accessible in the full game.
    """
    mask = _support_mask(game, supports)
    for k in range(game.num_users):
        if not mask[k].any():
            raise GameDomainError(f"node subset of user {k} is empty", field="supports", index=(k,))
        if np.any(mask[k] & ~game.access[k]):
            raise GameDomainError(
                f"node subset of user {k} contains an inaccessible node", field="supports", index=(k,)
            )

    node_index = np.flatnonzero(mask.any(axis=0))
    reduced = new_game(
        game.gains[:, node_index],
        game.noise[node_index],
        game.bandwidths[node_index],
        game.budgets,
        access=mask[:, node_index],
        seed=game.seed,
        gain_distribution=game.gain_distribution,
    )
    return ReducedGame(game=reduced, original=game, node_index=node_index, supports=mask)


def support_of(profile: ProfileLike) -> np.ndarray:
    """Exact nonzero pattern of a profile."""
    return as_allocation(profile) > 0
