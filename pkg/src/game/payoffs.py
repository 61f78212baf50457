"""Payoffs, potential and marginal payoffs of a parallel-MAC game.

All functions accept either a validated PowerProfile or a raw K×A array, so
test harnesses can evaluate rows with zero budget. Logarithms are natural.
"""

from __future__ import annotations
from typing import Callable
import logging

import numpy as np

from .models import Game, PowerProfile, as_allocation

logger = logging.getLogger(__name__)

ProfileLike = PowerProfile | np.ndarray
PotentialFn = Callable[[Game, np.ndarray], float]


def node_loads(game: Game, profile: ProfileLike) -> np.ndarray:
    """Total received power plus noise at each node: sigma²_a + sum_k g_ka p_ka."""
    p = as_allocation(profile)
    return game.noise + np.einsum("ka,ka->a", game.gains, p)


def utility_matrix(game: Game, profile: ProfileLike) -> np.ndarray:
    """K×A matrix of per-node spectral efficiencies u_ka."""
    p = as_allocation(profile)
    signal = game.gains * p
    interference = node_loads(game, p)[None, :] - signal
    return game.bandwidths[None, :] * np.log1p(signal / interference)


def utility_per_node(game: Game, profile: ProfileLike, k: int, alpha: int) -> float:
    k = game.check_user(k)
    alpha = game.check_node(alpha)
    p = as_allocation(profile)
    signal = game.gains[k, alpha] * p[k, alpha]
    interference = node_loads(game, p)[alpha] - signal
    return float(game.bandwidths[alpha] * np.log1p(signal / interference))


def utility(game: Game, profile: ProfileLike, k: int) -> float:
    """Spectral efficiency of user k (sum of its per-node terms)."""
    k = game.check_user(k)
    return float(utility_matrix(game, profile)[k].sum())


def potential(game: Game, profile: ProfileLike) -> float:
    """Exact potential -sum_a b_a log(load_a); minimized at equilibrium."""
    return float(-np.dot(game.bandwidths, np.log(node_loads(game, profile))))


def marginal_payoffs(game: Game, profile: ProfileLike) -> np.ndarray:
    """v_ka = b_a g_ka / load_a, the negative gradient of the potential.

    Entries at inaccessible pairs are reported as computed; callers mask them.
    """
    loads = node_loads(game, profile)
    return game.bandwidths[None, :] * game.gains / loads[None, :]


def reconstruct_marginal_payoffs(
    game: Game,
    profile: ProfileLike,
    observed: np.ndarray,
) -> np.ndarray:
    """Recover v from observed per-node spectral efficiencies.

    A transmitting user k at node a knows b_a, g_ka and p_ka and observes
    u_ka = b_a log(load_a / (load_a - g_ka p_ka)), which inverts to
    load_a = g_ka p_ka / (1 - exp(-u_ka / b_a)). The load is common to all
    users of a node, so silent users read it off any transmitting one. A node
    with no transmitter carries only its noise.
    """
    p = as_allocation(profile)
    u = np.asarray(observed, dtype=float)
    if u.shape != game.shape:
        raise ValueError(f"observed efficiencies must have shape {game.shape}, got {u.shape}")

    loads = np.array(game.noise, dtype=float)
    for alpha in range(game.num_nodes):
        senders = np.flatnonzero((p[:, alpha] > 0) & (u[:, alpha] > 0))
        if senders.size == 0:
            continue
        k = senders[np.argmax(p[senders, alpha])]
        ratio = -np.expm1(-u[k, alpha] / game.bandwidths[alpha])
        loads[alpha] = game.gains[k, alpha] * p[k, alpha] / ratio
    return game.bandwidths[None, :] * game.gains / loads[None, :]


def verify_exact_potential(
    game: Game,
    num_samples: int = 100,
    seed: int | None = None,
    tol: float = 1e-8,
    potential_fn: PotentialFn | None = None,
) -> tuple[bool, float]:
    """Check u_k(p') - u_k(p) == Phi(p) - Phi(p') on random unilateral deviations.

    Args:
        game: Game under test.
        num_samples: Number of (profile, deviation) pairs.
        seed: RNG seed for the sampled profiles.
        tol: Allowed absolute deviation.
        potential_fn: Potential to test; defaults to `potential`.

    Returns:
        (holds, max_deviation) over all samples.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    phi = potential_fn or potential
    rng = np.random.default_rng(seed)
    worst = 0.0

    for _ in range(num_samples):
        base = PowerProfile.random_interior(game, seed=int(rng.integers(2**32))).allocation
        k = int(rng.integers(game.num_users))
        deviated = np.array(base)
        nodes = np.flatnonzero(game.access[k])
        deviated[k] = 0.0
        deviated[k, nodes] = rng.dirichlet(np.ones(nodes.size)) * game.budgets[k]

        payoff_gain = utility(game, deviated, k) - utility(game, base, k)
        potential_drop = phi(game, base) - phi(game, deviated)
        worst = max(worst, abs(payoff_gain - potential_drop))

    logger.debug("Exact potential check on %s: max deviation %.3e", game, worst)
    return worst <= tol, worst
