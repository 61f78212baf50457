"""Water-filling best responses, simplex projection and first-order checks."""

from __future__ import annotations
import logging

import numpy as np
from scipy.optimize import bisect

from src.game.models import Game, PowerProfile, as_allocation
from src.game.payoffs import ProfileLike, marginal_payoffs, node_loads, utility
from .models import DEFAULT_SUPPORT_TOL, KKTBreakdown

logger = logging.getLogger(__name__)


def waterfill(
    bandwidths: np.ndarray,
    floors: np.ndarray,
    budget: float,
) -> np.ndarray:
    """Maximize sum_a b_a log(c_a + x_a) subject to x >= 0, sum x = budget.

    The solution is x_a = max(0, b_a / lam - c_a). The water level lam is
    bracketed and located by bisection on the decreasing budget function, then
    made exact on the resulting active set.
    """
    b = np.asarray(bandwidths, dtype=float)
    c = np.asarray(floors, dtype=float)
    if b.size == 1:
        return np.array([budget])

    def excess(lam: float) -> float:
        return float(np.maximum(b / lam - c, 0.0).sum() - budget)

    lam_lo = float(np.max(b / (c + budget)))
    lam_hi = float(np.max(b / c))
    if excess(lam_lo) <= 0.0:
        lam = lam_lo
    else:
        lam = bisect(excess, lam_lo, lam_hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=2000)

    active = b / lam - c > 0
    if not active.any():
        active[np.argmax(b / c)] = True
    for _ in range(b.size + 1):
        lam = b[active].sum() / (budget + c[active].sum())
        levels = b / lam - c
        next_active = levels > 0
        if np.array_equal(next_active, active):
            break
        if not next_active.any():
            break
        active = next_active

    x = np.where(active, np.maximum(b / lam - c, 0.0), 0.0)
    total = x.sum()
    if total > 0:
        x *= budget / total
    return x


def best_response(game: Game, profile: ProfileLike, k: int) -> np.ndarray:
    """Unique maximizer of u_k against the opponents' allocations.

    Returns:
        Length-A allocation of user k (zeros on inaccessible nodes).
    """
    k = game.check_user(k)
    p = as_allocation(profile)
    nodes = np.flatnonzero(game.access[k])
    g = game.gains[k, nodes]
    interference = node_loads(game, p)[nodes] - g * p[k, nodes]

    result = np.zeros(game.num_nodes)
    result[nodes] = waterfill(game.bandwidths[nodes], interference / g, float(game.budgets[k]))
    return result


def simplex_project(vector: np.ndarray, budget: float) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = budget} by sort and threshold."""
    if budget <= 0:
        raise ValueError(f"budget must be positive, got {budget}")
    v = np.asarray(vector, dtype=float)
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - budget
    ind = np.arange(1, v.size + 1)
    cond = u - cssv / ind > 0
    rho = ind[cond][-1]
    theta = cssv[cond][-1] / rho
    return np.maximum(v - theta, 0.0)


def project_profile(game: Game, allocation: np.ndarray) -> np.ndarray:
    """Project every user's row onto its scaled simplex over accessible nodes."""
    projected = np.zeros(game.shape)
    for k in range(game.num_users):
        nodes = np.flatnonzero(game.access[k])
        projected[k, nodes] = simplex_project(allocation[k, nodes], float(game.budgets[k]))
    return projected


def multipliers(game: Game, profile: ProfileLike, mask: np.ndarray | None = None) -> np.ndarray:
    """Lagrange multipliers lam_k = max over accessible nodes of v_ka."""
    allowed = game.access if mask is None else game.access & mask
    v = np.where(allowed, marginal_payoffs(game, profile), -np.inf)
    return v.max(axis=1)


def kkt_breakdown(game: Game, profile: ProfileLike, mask: np.ndarray | None = None) -> KKTBreakdown:
    """Stationarity and complementary-slackness violations per user.

    With a mask the multipliers range over the masked entries only, which is
    the residual of the face a replicator orbit is confined to.
    """
    p = as_allocation(profile)
    v = marginal_payoffs(game, p)
    allowed = game.access if mask is None else game.access & mask
    lam = multipliers(game, p, mask)
    gaps = np.where(allowed, lam[:, None] - v, 0.0)
    average = np.einsum("ka,ka->k", p, np.where(game.access, v, 0.0)) / game.budgets
    user_residuals = np.maximum(lam - average, 0.0)
    slackness = np.max(p * gaps, axis=1)
    return KKTBreakdown(
        multipliers=lam,
        user_residuals=user_residuals,
        complementary_slackness=slackness,
        max_violation=float(slackness.max()),
    )


def kkt_residual(game: Game, profile: ProfileLike, mask: np.ndarray | None = None) -> float:
    """max_k (lam_k - P_k^-1 sum_b p_kb v_kb); zero exactly at a Nash equilibrium."""
    return float(kkt_breakdown(game, profile, mask).user_residuals.max())


def waterfilling_ratio_gap(
    game: Game,
    profile: ProfileLike,
    support_tol: float = 1e-6,
) -> float:
    """Largest |g_ka/g_kb - r_a/r_b| over pairs a, b both supported by one user.

    r_a = load_a / b_a is common to all users, so at equilibrium each user's
    gain ratios across its supported nodes match the r ratios.
    """
    p = as_allocation(profile)
    r = node_loads(game, p) / game.bandwidths
    support = p > support_tol * game.budgets[:, None]
    worst = 0.0
    for k in range(game.num_users):
        nodes = np.flatnonzero(support[k])
        if nodes.size < 2:
            continue
        g = game.gains[k, nodes]
        gain_ratios = g[:, None] / g[None, :]
        load_ratios = r[nodes][:, None] / r[nodes][None, :]
        worst = max(worst, float(np.abs(gain_ratios - load_ratios).max()))
    return worst


def equilibrium_gap(
    game: Game,
    profile: ProfileLike,
    support_tol: float = DEFAULT_SUPPORT_TOL,
    zero_tol: float = 1e-9,
) -> float:
    """Smallest lam_k - v_ka over accessible nodes a user leaves unsupported.

    Replicator mass on such a node decays like exp(-gap * t), so the gap sets
    how long an orbit needs to shed it. Entries whose gap is below zero_tol
    are tied with the multiplier and ignored. Returns inf when no unsupported
    node has a positive gap.
    """
    p = as_allocation(profile)
    lam = multipliers(game, p)
    gaps = lam[:, None] - marginal_payoffs(game, p)
    unsupported = game.access & (p <= support_tol * game.budgets[:, None])
    positive = gaps[unsupported & (gaps > zero_tol)]
    return float(positive.min()) if positive.size else float("inf")


def nash_gap(game: Game, profile: ProfileLike) -> float:
    """Largest payoff improvement any single user could obtain by deviating."""
    p = np.array(as_allocation(profile))
    worst = 0.0
    for k in range(game.num_users):
        current = utility(game, p, k)
        deviated = np.array(p)
        deviated[k] = best_response(game, p, k)
        worst = max(worst, utility(game, deviated, k) - current)
    return max(worst, 0.0)

