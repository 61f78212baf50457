"""Lyapunov monitors for the replicator dynamics."""

from __future__ import annotations

import numpy as np
from scipy.special import rel_entr

from src.game.models import Game, as_allocation
from src.game.payoffs import ProfileLike, marginal_payoffs, potential
from .models import KLDivergence


def kl_divergence(q: ProfileLike, p: ProfileLike) -> KLDivergence:
    """H_q(p) = sum over supp(q) of q log(q / p).

    Returns the unsupported marker when p vanishes somewhere q is positive.
    """
    q_arr = as_allocation(q)
    p_arr = as_allocation(p)
    if q_arr.shape != p_arr.shape:
        raise ValueError(f"shape mismatch: {q_arr.shape} vs {p_arr.shape}")
    if np.any((q_arr > 0) & (p_arr <= 0)):
        return KLDivergence.unsupported()
    return KLDivergence(float(rel_entr(q_arr, p_arr).sum()))


def lyapunov_L(game: Game, q: ProfileLike, p: ProfileLike) -> float:
    """L_q(p) = -sum (p - q) v(p); equals -dH_q/dt along orbits."""
    diff = as_allocation(p) - as_allocation(q)
    return float(-np.sum(diff * marginal_payoffs(game, p)))


def growth_estimate_gap(game: Game, q: ProfileLike, p: ProfileLike) -> float:
    """L_q(p) - (Phi(p) - Phi(q)); non-negative by convexity of the potential."""
    return lyapunov_L(game, q, p) - (potential(game, p) - potential(game, q))
