"""Seeded convergence runs of the replicator dynamics on random games.

MACGAME_ACCEPTANCE_GAMES sets how many random games the generic run covers
(default 50); the collinear run always covers 10 games.
"""

import os

import numpy as np
import pytest

from src.dynamics.models import TerminationReason
from src.dynamics.replicator import integrate
from src.equilibrium.graph import support_mask
from src.equilibrium.solvers import allocation_distance, solve_potential_min
from src.equilibrium.waterfilling import equilibrium_gap
from src.game.generators import random_collinear_game, random_game
from src.game.models import PowerProfile
from src.game.payoffs import node_loads, potential

NUM_GAMES = int(os.getenv("MACGAME_ACCEPTANCE_GAMES", "50"))
NUM_COLLINEAR = 10
STARTS = 5

BASE_HORIZON = 1e3
# e-folds of the slowest local mode before giving up
SETTLE_FOLDS = 30.0
RESIDUAL_TOL = 1e-10
MAX_STEP = 1.0


def game_size(seed):
    rng = np.random.default_rng(10_000 + seed)
    return int(rng.integers(2, 6)), int(rng.integers(2, 6))


def settling_horizon(game, equilibrium):
    """Time for the slowest mode near the equilibrium to decay SETTLE_FOLDS times."""
    q = equilibrium.allocation
    supported = support_mask(q)
    # a supported entry relaxes at about q_ka * b_a * g_ka^2 / load_a^2
    curvature = game.bandwidths * game.gains**2 / node_loads(game, q) ** 2
    rate = min(equilibrium_gap(game, q), float(np.min((q * curvature)[supported])))
    return max(BASE_HORIZON, SETTLE_FOLDS / rate)


def run_starts(game, equilibrium, seed):
    horizon = settling_horizon(game, equilibrium)
    runs = []
    for start in range(STARTS):
        init = PowerProfile.random_interior(game, seed=1000 * seed + start)
        runs.append(integrate(
            game,
            init,
            horizon=horizon,
            residual_tol=RESIDUAL_TOL,
            reference_q=equilibrium,
            stride=50,
            kl_guard=False,
            max_step=MAX_STEP,
        ))
    return runs


def assert_descent(trajectory):
    assert trajectory.terminated_reason is not TerminationReason.STEP_FLOOR
    assert trajectory.final_residual <= 1e-5
    assert np.all(np.diff(trajectory.potential_values) <= 1e-12)
    kl = [float(value) for value in trajectory.kl_values]
    assert np.all(np.isfinite(kl))
    assert np.all(np.diff(kl) <= 1e-10)


class TestGenericConvergence:
    """Test interior orbits reach the unique equilibrium of random games."""

    @pytest.mark.parametrize("seed", range(NUM_GAMES))
    def test_converges_to_solver_equilibrium(self, seed):
        """Test residual, distance and both Lyapunov monitors on five starts."""
        game = random_game(*game_size(seed), seed=seed)
        report = solve_potential_min(game)
        assert report.converged
        for trajectory in run_starts(game, report.profile, seed):
            assert_descent(trajectory)
            assert allocation_distance(trajectory.final_profile, report.profile) <= 1e-3


class TestCollinearConvergence:
    """Test orbits of degenerate games end on one potential level."""

    @pytest.mark.parametrize("seed", range(NUM_COLLINEAR))
    def test_limits_share_potential(self, seed):
        """Test every start converges and limits agree in potential."""
        game = random_collinear_game(*game_size(seed), seed=seed)
        report = solve_potential_min(game)
        assert report.kkt_residual <= 1e-9
        runs = run_starts(game, report.profile, seed)
        for trajectory in runs:
            assert_descent(trajectory)
        levels = [potential(game, trajectory.final_profile) for trajectory in runs]
        assert max(levels) - min(levels) <= 1e-8
        assert abs(levels[0] - report.potential_value) <= 1e-8
