"""Nash equilibrium solvers: potential minimization and sequential water-filling."""

from __future__ import annotations
from typing import Any
import logging

import numpy as np

from src.game.models import Game, PowerProfile, as_allocation
from src.game.payoffs import marginal_payoffs, node_loads, potential
from .graph import equilibrium_face_dim, is_forest, profile_graph, support_mask
from .models import DEFAULT_SUPPORT_TOL, EquilibriumReport, SolverName
from .waterfilling import (
    best_response,
    kkt_breakdown,
    kkt_residual,
    nash_gap,
    project_profile,
    waterfilling_ratio_gap,
)

logger = logging.getLogger(__name__)

ARMIJO_C = 1e-4
MIN_STEP = 1e-20
POLISH_THRESHOLD = 1e-4
POLISH_MAX_STEPS = 30


def _initial_allocation(game: Game, init: PowerProfile | np.ndarray | None) -> np.ndarray:
    if init is None:
        return np.array(PowerProfile.uniform(game).allocation)
    if isinstance(init, PowerProfile):
        return np.array(init.allocation)
    return np.array(PowerProfile.for_game(game, init).allocation)


def _renormalize(game: Game, p: np.ndarray) -> np.ndarray:
    p = np.where(game.access, np.maximum(p, 0.0), 0.0)
    return p * (game.budgets / p.sum(axis=1))[:, None]


def newton_polish(
    game: Game,
    allocation: np.ndarray,
    support_tol: float = DEFAULT_SUPPORT_TOL,
) -> np.ndarray | None:
    """Solve the first-order system on the current support by Newton's method.

    Unknowns are the supported entries and one multiplier per user; the
    equations are v_ka = lam_k on the support and the budget rows. With
    support_tol 0 the support is the exact nonzero pattern left by projection.
    Returns the polished allocation, or None when the iterate leaves the
    support or the polished point does not lower the residual.
    """
    p = np.array(allocation)
    support = support_mask(p, support_tol) & game.access
    rows, cols = np.nonzero(support)
    m, num_users = rows.size, game.num_users
    if m == 0:
        return None

    lam = np.array([marginal_payoffs(game, p)[k, support[k]].mean() for k in range(num_users)])
    x = p[rows, cols]
    start_residual = kkt_residual(game, p)

    for _ in range(POLISH_MAX_STEPS):
        trial = np.zeros(game.shape)
        trial[rows, cols] = x
        loads = node_loads(game, trial)
        v = marginal_payoffs(game, trial)
        equations = np.concatenate([v[rows, cols] - lam[rows], trial.sum(axis=1) - game.budgets])

        jac = np.zeros((m + num_users, m + num_users))
        same_node = cols[:, None] == cols[None, :]
        curvature = (
            game.bandwidths[cols][:, None]
            * game.gains[rows, cols][:, None]
            * game.gains[rows, cols][None, :]
            / loads[cols][:, None] ** 2
        )
        jac[:m, :m] = np.where(same_node, -curvature, 0.0)
        jac[np.arange(m), m + rows] = -1.0
        jac[m + rows, np.arange(m)] = 1.0

        delta = np.linalg.lstsq(jac, -equations, rcond=None)[0]
        dx, dlam = delta[:m], delta[m:]
        shrinking = dx < 0
        tau = 1.0
        if shrinking.any():
            tau = min(1.0, 0.99 * float(np.min(-x[shrinking] / dx[shrinking])))
        x = x + tau * dx
        lam = lam + tau * dlam
        if tau < 1.0 or np.any(x <= 0):
            # Newton wants to leave the support: the active set is wrong.
            return None
        if np.max(np.abs(equations)) < 1e-15:
            break

    polished = np.zeros(game.shape)
    polished[rows, cols] = x
    polished = _renormalize(game, polished)
    if kkt_residual(game, polished) < start_residual:
        return polished
    return None


def build_report(
    game: Game,
    allocation: np.ndarray,
    solver: str,
    iterations: int,
    tol: float,
    support_tol: float = DEFAULT_SUPPORT_TOL,
    seed: int | None = None,
    **metadata: Any,
) -> EquilibriumReport:
    """Evaluate an allocation and assemble the full equilibrium report."""
    profile = PowerProfile.for_game(game, allocation, solver=solver)
    breakdown = kkt_breakdown(game, profile)
    residual = float(breakdown.user_residuals.max())
    face_dim = equilibrium_face_dim(profile, support_tol)
    return EquilibriumReport(
        profile=profile,
        kkt_residual=residual,
        iterations=iterations,
        converged=residual <= tol,
        potential_value=potential(game, profile),
        multipliers=breakdown.multipliers,
        support=support_mask(profile, support_tol),
        solver=solver,
        tolerance=tol,
        support_tol=support_tol,
        seed=seed if seed is not None else game.seed,
        game_hash=game.content_hash(),
        face_dim=face_dim,
        dimension_margin=game.num_nodes - face_dim,
        is_forest=is_forest(profile_graph(profile, support_tol)),
        nash_gap=nash_gap(game, profile),
        waterfilling_gap=waterfilling_ratio_gap(game, profile, support_tol),
        breakdown=breakdown,
        metadata=dict(metadata),
    )


def solve_potential_min(
    game: Game,
    init: PowerProfile | np.ndarray | None = None,
    tol: float = 1e-12,
    max_iters: int = 20000,
    support_tol: float = DEFAULT_SUPPORT_TOL,
    polish: bool = True,
) -> EquilibriumReport:
    """Projected-gradient descent on the potential over the product of simplices.

    Each iteration steps along the marginal payoffs, projects every user row
    back onto its simplex and backtracks (halving from 1.0) until the Armijo
    condition holds. Near convergence the support's first-order system is
    polished by Newton steps.

    Returns:
        EquilibriumReport; converged is False when max_iters was exhausted.
    """
    p = _initial_allocation(game, init)
    phi = potential(game, p)
    residual = kkt_residual(game, p)
    iterations = 0

    while residual > tol and iterations < max_iters:
        iterations += 1
        v = marginal_payoffs(game, p)
        step = 1.0
        while True:
            candidate = project_profile(game, p + step * v)
            ascent = float(np.sum(v * (candidate - p)))
            candidate_phi = potential(game, candidate)
            if candidate_phi <= phi - ARMIJO_C * ascent or step < MIN_STEP:
                break
            step *= 0.5

        if step < MIN_STEP or np.array_equal(candidate, p):
            logger.warning("Projected gradient stalled at iteration %d (residual %.3e)", iterations, residual)
            break
        p, phi = candidate, candidate_phi
        residual = kkt_residual(game, p)

        if polish and residual < POLISH_THRESHOLD and residual > tol:
            polished = newton_polish(game, p, support_tol=0.0)
            if polished is not None:
                p, phi = polished, potential(game, polished)
                residual = kkt_residual(game, p)
                logger.debug("Newton polish at iteration %d: residual %.3e", iterations, residual)

        if iterations % 1000 == 0:
            logger.debug("Iteration %d residual %.3e potential %.12g", iterations, residual, phi)

    report = build_report(game, p, SolverName.PGD.value, iterations, tol, support_tol)
    if not report.converged:
        logger.warning("Potential minimization did not converge: residual %.3e", report.kkt_residual)
    return report


def solve_sequential_waterfilling(
    game: Game,
    init: PowerProfile | np.ndarray | None = None,
    tol: float = 1e-12,
    max_rounds: int = 20000,
    support_tol: float = DEFAULT_SUPPORT_TOL,
) -> EquilibriumReport:
    """Round-robin best responses, users in index order within each round."""
    p = _initial_allocation(game, init)
    rounds = 0
    residual = kkt_residual(game, p)

    while residual > tol and rounds < max_rounds:
        rounds += 1
        previous = np.array(p)
        for k in range(game.num_users):
            p[k] = best_response(game, p, k)
        residual = kkt_residual(game, p)
        move = float(np.max(np.abs(p - previous)))
        logger.debug("Round %d residual %.3e move %.3e", rounds, residual, move)
        if move < tol:
            break

    report = build_report(game, p, SolverName.SWF.value, rounds, tol, support_tol)
    if not report.converged:
        logger.warning("Sequential water-filling did not converge: residual %.3e", report.kkt_residual)
    return report


def solve(
    game: Game,
    solver: str | SolverName = SolverName.PGD,
    init: PowerProfile | np.ndarray | None = None,
    tol: float = 1e-12,
    max_iters: int = 20000,
    support_tol: float = DEFAULT_SUPPORT_TOL,
) -> EquilibriumReport:
    """Dispatch to the named solver."""
    name = SolverName(solver)
    if name is SolverName.SWF:
        return solve_sequential_waterfilling(game, init, tol, max_iters, support_tol)
    return solve_potential_min(game, init, tol, max_iters, support_tol)


def multistart(
    game: Game,
    starts: int = 10,
    seed: int | None = None,
    solver: str | SolverName = SolverName.PGD,
    tol: float = 1e-12,
    max_iters: int = 20000,
    support_tol: float = DEFAULT_SUPPORT_TOL,
) -> tuple[list[EquilibriumReport], float]:
    """Solve from several random interior starts.

    Returns:
        (reports, spread) where spread is the largest pairwise max-norm
        distance between the computed profiles.
    """
    seeds = np.random.SeedSequence(seed).spawn(starts)
    reports = [
        solve(
            game,
            solver,
            init=PowerProfile.random_interior(game, seed=int(s.generate_state(1)[0])),
            tol=tol,
            max_iters=max_iters,
            support_tol=support_tol,
        )
        for s in seeds
    ]
    spread = 0.0
    for i, first in enumerate(reports):
        for second in reports[i + 1:]:
            spread = max(spread, float(np.max(np.abs(first.allocation - second.allocation))))
    return reports, spread


def grid_minimize_2x2(game: Game, resolution: float = 1e-3) -> tuple[np.ndarray, float]:
    """Brute-force potential minimizer of a two-user, two-node game on a grid."""
    if game.shape != (2, 2):
        raise ValueError(f"grid search needs a 2×2 game, got {game.shape}")
    steps = int(round(1.0 / resolution)) + 1
    x = np.linspace(0.0, 1.0, steps)
    first, second = np.meshgrid(x * game.budgets[0], x * game.budgets[1], indexing="ij")
    loads_a = game.noise[0] + game.gains[0, 0] * first + game.gains[1, 0] * second
    loads_b = (
        game.noise[1]
        + game.gains[0, 1] * (game.budgets[0] - first)
        + game.gains[1, 1] * (game.budgets[1] - second)
    )
    values = -(game.bandwidths[0] * np.log(loads_a) + game.bandwidths[1] * np.log(loads_b))
    i, j = np.unravel_index(np.argmin(values), values.shape)
    allocation = np.array([
        [first[i, j], game.budgets[0] - first[i, j]],
        [second[i, j], game.budgets[1] - second[i, j]],
    ])
    return allocation, float(values[i, j])


def allocation_distance(first: PowerProfile | np.ndarray, second: PowerProfile | np.ndarray) -> float:
    return float(np.max(np.abs(as_allocation(first) - as_allocation(second))))
