"""Degeneracy index: dimension of the directions along which the potential is flat."""

from __future__ import annotations

import numpy as np
from scipy.linalg import null_space, svdvals

from src.game.models import Game
from .models import DEFAULT_RANK_TOL


def constraint_matrix(game: Game) -> np.ndarray:
    """Stacked (K + A) × K·A tangent-constraint matrix.

    Columns are the (k, a) pairs in row-major order; inaccessible pairs get
    zero columns. The first K rows keep each user's total power fixed, the
    last A rows keep each node's received power fixed.
    """
    num_users, num_nodes = game.shape
    rows = np.zeros((num_users + num_nodes, num_users * num_nodes))
    for k in range(num_users):
        for alpha in range(num_nodes):
            if not game.access[k, alpha]:
                continue
            col = k * num_nodes + alpha
            rows[k, col] = 1.0
            rows[num_users + alpha, col] = game.gains[k, alpha]
    return rows


def degeneracy_index(game: Game, rank_tol: float = DEFAULT_RANK_TOL) -> tuple[int, int]:
    """Return (index, constraint_rank) with index = accessible pairs - rank."""
    if rank_tol <= 0:
        raise ValueError(f"rank_tol must be positive, got {rank_tol}")
    matrix = constraint_matrix(game)
    singular = svdvals(matrix)
    rank = int(np.sum(singular > rank_tol * singular.max()))
    pairs = int(game.access.sum())
    return pairs - rank, rank


def degenerate_directions(game: Game, rank_tol: float = DEFAULT_RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the flat directions, shape (index, K, A).

    Moving an equilibrium along any of these directions keeps every budget and
    every node load, hence the potential, unchanged.
    """
    matrix = constraint_matrix(game)
    accessible = game.access.ravel()
    basis = null_space(matrix[:, accessible], rcond=rank_tol)
    directions = np.zeros((basis.shape[1], game.num_users * game.num_nodes))
    directions[:, accessible] = basis.T
    return directions.reshape(-1, game.num_users, game.num_nodes)
