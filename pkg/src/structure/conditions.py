"""Ratio matrices and the sufficient uniqueness conditions Cmax, C1 and C2."""

from __future__ import annotations
from typing import Mapping, Sequence
import logging

import numpy as np

from src.game.models import Game
from .degeneracy import degeneracy_index
from .models import DEFAULT_COND_TOL, DEFAULT_RANK_TOL, ConditionReport
from .spectral import spectral_lower_bound, spectral_radius

logger = logging.getLogger(__name__)


def s_max_matrix(game: Game) -> np.ndarray:
    """S_kl = max over nodes reachable by both users of g_la / g_ka; zero diagonal."""
    g = game.gains
    ratios = g[None, :, :] / g[:, None, :]
    shared = game.access[:, None, :] & game.access[None, :, :]
    s = np.where(shared, ratios, 0.0).max(axis=2)
    np.fill_diagonal(s, 0.0)
    return s


def s_alpha_matrix(game: Game, alpha: int, mask: Sequence[bool] | np.ndarray | None = None) -> np.ndarray:
    """S_kl(a) = g_la / g_ka with zero diagonal.

    Users excluded by mask (or without access to the node) get zero rows and
    columns, which is the rank-deficient variant for users with unusable
    channels at a.
    """
    alpha = game.check_node(alpha)
    column = game.gains[:, alpha]
    s = column[None, :] / column[:, None]
    np.fill_diagonal(s, 0.0)
    keep = np.array(game.access[:, alpha])
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (game.num_users,):
            raise ValueError(f"mask must have length {game.num_users}, got shape {mask.shape}")
        keep &= mask
    s[~keep, :] = 0.0
    s[:, ~keep] = 0.0
    return s


def c2_min_eigenvalue(matrix: np.ndarray) -> float:
    """Smallest eigenvalue of I + (S + S^T) / 2."""
    s = np.asarray(matrix, dtype=float)
    symmetric = np.eye(s.shape[0]) + 0.5 * (s + s.T)
    return float(np.linalg.eigvalsh(symmetric).min())


def check_conditions(
    game: Game,
    masks: Mapping[int, Sequence[bool]] | None = None,
    cond_tol: float = DEFAULT_COND_TOL,
    rank_tol: float = DEFAULT_RANK_TOL,
    power_tol: float = 1e-12,
) -> ConditionReport:
    """Evaluate Cmax, C1, C2 and the degeneracy index of a game.

    Args:
        game: Game to audit.
        masks: Optional per-node user masks for the rank-deficient S(a) variant.
        cond_tol: Decision margin; a condition holds only if it is met by more than this.
        rank_tol: Relative singular-value cutoff for ranks.
        power_tol: Relative tolerance of the power iteration.
    """
    masks = masks or {}
    s_max = s_max_matrix(game)
    rho_smax = spectral_radius(s_max, tol=power_tol)
    bound, applicable = spectral_lower_bound(s_max, rank_tol)

    rho_alpha = np.zeros(game.num_nodes)
    c2_eigs = np.zeros(game.num_nodes)
    for alpha in range(game.num_nodes):
        s = s_alpha_matrix(game, alpha, masks.get(alpha))
        rho_alpha[alpha] = spectral_radius(s, tol=power_tol)
        c2_eigs[alpha] = c2_min_eigenvalue(s)

    ind, rank = degeneracy_index(game, rank_tol)
    report = ConditionReport(
        rho_smax=rho_smax,
        rho_s_alpha=rho_alpha,
        cmax_holds=rho_smax < 1.0 - cond_tol,
        c1_holds=bool(np.all(rho_alpha < 1.0 - cond_tol)),
        c2_holds=bool(np.all(c2_eigs > cond_tol)),
        spectral_lower_bound=bound,
        bound_applicable=applicable,
        degeneracy_index=ind,
        constraint_rank=rank,
        c2_min_eigenvalues=c2_eigs,
        cond_tol=cond_tol,
        rank_tol=rank_tol,
        masked=bool(masks),
        game_hash=game.content_hash(),
    )
    logger.debug("Condition audit for %s: %s", game, report.summary())
    return report
