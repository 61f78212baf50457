"""Tests for game models, payoffs and generators."""

import json

import numpy as np
import pytest

from src.equilibrium.solvers import solve_potential_min
from src.game.generators import collinear_game, draw_gains, random_collinear_game, random_game
from src.game.models import (
    Game,
    GameDomainError,
    GameIndexError,
    GameShapeError,
    PowerProfile,
    ProfileError,
    new_game,
)
from src.game.payoffs import (
    marginal_payoffs,
    node_loads,
    potential,
    reconstruct_marginal_payoffs,
    utility,
    utility_matrix,
    utility_per_node,
    verify_exact_potential,
)


def crossed_game() -> Game:
    """Two users, two nodes, each user strongest on its own node."""
    return new_game([[2.0, 1.0], [1.0, 2.0]], [1.0, 1.0], [1.0, 1.0], [1.0, 1.0])


class TestNewGame:
    """Test cases for game construction and validation."""

    def test_basic_creation(self):
        """Test a valid game keeps its data and shape."""
        game = crossed_game()
        assert game.shape == (2, 2)
        assert game.num_users == 2
        assert game.num_nodes == 2
        assert game.has_full_access
        np.testing.assert_array_equal(game.gains, [[2.0, 1.0], [1.0, 2.0]])

    def test_arrays_are_read_only(self):
        """Test game arrays cannot be mutated in place."""
        game = crossed_game()
        with pytest.raises(ValueError):
            game.gains[0, 0] = 5.0

    def test_non_positive_noise_names_field_and_index(self):
        """Test a zero noise power is rejected with its location."""
        with pytest.raises(GameDomainError) as exc:
            new_game([[1.0, 1.0]], [1.0, 0.0], [1.0, 1.0], [1.0])
        assert exc.value.field == "noise"
        assert exc.value.index == (1,)

    def test_negative_gain_rejected(self):
        """Test a negative gain is rejected."""
        with pytest.raises(GameDomainError) as exc:
            new_game([[1.0, -1.0]], [1.0, 1.0], [1.0, 1.0], [1.0])
        assert exc.value.field == "gains"
        assert exc.value.index == (0, 1)

    def test_non_finite_budget_rejected(self):
        """Test an infinite budget is rejected."""
        with pytest.raises(GameDomainError):
            new_game([[1.0]], [1.0], [1.0], [np.inf])

    def test_shape_mismatch(self):
        """Test inconsistent vector lengths raise GameShapeError."""
        with pytest.raises(GameShapeError):
            new_game([[1.0, 1.0]], [1.0], [1.0, 1.0], [1.0])
        with pytest.raises(GameShapeError):
            new_game([[1.0, 1.0]], [1.0, 1.0], [1.0, 1.0], [1.0, 1.0])

    def test_domain_errors_are_value_errors(self):
        """Test the error hierarchy plugs into ValueError handlers."""
        assert issubclass(GameDomainError, ValueError)
        assert issubclass(ProfileError, GameDomainError)
        assert issubclass(GameIndexError, IndexError)

    def test_access_row_without_nodes(self):
        """Test a user with no accessible node is rejected."""
        with pytest.raises(GameDomainError) as exc:
            new_game([[1.0, 1.0], [1.0, 1.0]], [1, 1], [1, 1], [1, 1], access=[[1, 1], [0, 0]])
        assert exc.value.field == "access"

    def test_normalized_bandwidths(self):
        """Test raw bandwidths are rescaled to sum to one on request."""
        game = new_game([[1.0, 1.0]], [1.0, 1.0], [2.0, 6.0], [1.0], normalize_bandwidths=True)
        np.testing.assert_allclose(game.bandwidths, [0.25, 0.75])
        assert game.bandwidths_normalized

        raw = new_game([[1.0, 1.0]], [1.0, 1.0], [2.0, 6.0], [1.0])
        assert not raw.bandwidths_normalized

    def test_index_checks(self):
        """Test out-of-range user and node indices."""
        game = crossed_game()
        with pytest.raises(GameIndexError):
            game.check_user(2)
        with pytest.raises(GameIndexError):
            game.check_node(-1)


class TestGameSerialization:
    """Test cases for game documents and content hashes."""

    def test_to_dict(self):
        """Test dictionary layout of a full-access game."""
        data = crossed_game().to_dict()
        assert data["num_users"] == 2
        assert data["gains"] == [[2.0, 1.0], [1.0, 2.0]]
        assert "access" not in data
        assert "seed" not in data

    def test_from_json_preserves_data(self):
        """Test a game survives a JSON document bit for bit."""
        game = random_game(3, 4, seed=11)
        restored = Game.from_json(game.to_json())
        np.testing.assert_array_equal(restored.gains, game.gains)
        assert restored.seed == 11
        assert restored.gain_distribution == "exponential"
        assert restored.content_hash() == game.content_hash()

    def test_access_mask_round_trip(self):
        """Test a partial access mask is written and read back."""
        game = new_game([[1.0, 2.0], [3.0, 4.0]], [1, 1], [1, 1], [1, 1], access=[[1, 0], [1, 1]])
        data = json.loads(game.to_json())
        assert data["access"] == [[1, 0], [1, 1]]
        assert not Game.from_dict(data).access[0, 1]

    def test_missing_field(self):
        """Test a document without budgets is rejected."""
        data = crossed_game().to_dict()
        del data["budgets"]
        with pytest.raises(GameShapeError):
            Game.from_dict(data)

    def test_declared_shape_mismatch(self):
        """Test declared dimensions must match the gain matrix."""
        data = crossed_game().to_dict()
        data["num_nodes"] = 3
        with pytest.raises(GameShapeError):
            Game.from_dict(data)

    def test_hash_ignores_provenance(self):
        """Test the content hash depends on model data only."""
        first = random_game(2, 3, seed=5)
        relabelled = new_game(first.gains, first.noise, first.bandwidths, first.budgets, seed=99)
        assert first.content_hash() == relabelled.content_hash()
        assert first.content_hash() != random_game(2, 3, seed=6).content_hash()


class TestPowerProfile:
    """Test cases for profile validation and constructors."""

    def setup_method(self):
        self.game = crossed_game()

    def test_uniform(self):
        """Test uniform split over accessible nodes."""
        profile = PowerProfile.uniform(self.game)
        np.testing.assert_allclose(profile.allocation, [[0.5, 0.5], [0.5, 0.5]])
        assert profile.metadata["init"] == "uniform"

    def test_uniform_respects_access(self):
        """Test uniform split skips inaccessible nodes."""
        game = new_game([[1, 1, 1]], [1, 1, 1], [1, 1, 1], [3.0], access=[[1, 0, 1]])
        np.testing.assert_allclose(PowerProfile.uniform(game).allocation, [[1.5, 0.0, 1.5]])

    def test_vertex(self):
        """Test a vertex puts the whole budget on one node."""
        profile = PowerProfile.vertex(self.game, [1, 0])
        np.testing.assert_array_equal(profile.allocation, [[0.0, 1.0], [1.0, 0.0]])

    def test_vertex_needs_one_node_per_user(self):
        """Test vertex assignment length is checked."""
        with pytest.raises(GameShapeError):
            PowerProfile.vertex(self.game, [0])

    def test_random_interior_is_reproducible(self):
        """Test seeded interior draws are reproducible and strictly positive."""
        first = PowerProfile.random_interior(self.game, seed=3)
        second = PowerProfile.random_interior(self.game, seed=3)
        np.testing.assert_array_equal(first.allocation, second.allocation)
        assert np.all(first.allocation > 0)
        np.testing.assert_allclose(first.budgets, self.game.budgets)

    def test_budget_violation(self):
        """Test a row that does not spend its budget is rejected."""
        with pytest.raises(ProfileError) as exc:
            PowerProfile.for_game(self.game, [[0.5, 0.5], [0.5, 0.4]])
        assert exc.value.index == (1,)

    def test_budget_within_tolerance(self):
        """Test rounding-level budget gaps are accepted."""
        PowerProfile.for_game(self.game, [[0.5, 0.5 + 1e-12], [1.0, 0.0]])

    def test_negative_power(self):
        """Test negative entries are rejected."""
        with pytest.raises(ProfileError):
            PowerProfile.for_game(self.game, [[1.5, -0.5], [0.5, 0.5]])

    def test_inaccessible_power(self):
        """Test power on an inaccessible node is rejected."""
        game = new_game([[1, 1], [1, 1]], [1, 1], [1, 1], [1, 1], access=[[1, 0], [1, 1]])
        with pytest.raises(ProfileError):
            PowerProfile.for_game(game, [[0.5, 0.5], [0.5, 0.5]])

    def test_support(self):
        """Test the support mask is relative to the budget."""
        profile = PowerProfile.for_game(self.game, [[1.0 - 1e-9, 1e-9], [0.3, 0.7]])
        np.testing.assert_array_equal(profile.support(), [[True, False], [True, True]])

    def test_to_dict_from_dict(self):
        """Test profile documents keep allocation and metadata."""
        profile = PowerProfile.vertex(self.game, [0, 1])
        restored = PowerProfile.from_dict(profile.to_dict(), self.game)
        np.testing.assert_array_equal(restored.allocation, profile.allocation)
        assert restored.metadata == {"init": "vertex"}


class TestPayoffs:
    """Test cases for utilities, potential and marginal payoffs."""

    def setup_method(self):
        self.game = crossed_game()
        self.equilibrium = PowerProfile.vertex(self.game, [0, 1])

    def test_node_loads(self):
        """Test loads are noise plus received power."""
        np.testing.assert_allclose(node_loads(self.game, self.equilibrium), [3.0, 3.0])

    def test_utility_at_vertex(self):
        """Test each user gets log 3 on its own node."""
        assert utility(self.game, self.equilibrium, 0) == pytest.approx(np.log(3.0))
        assert utility_per_node(self.game, self.equilibrium, 1, 1) == pytest.approx(np.log(3.0))
        assert utility_per_node(self.game, self.equilibrium, 1, 0) == 0.0

    def test_utility_matrix_rows_sum_to_utility(self):
        """Test per-node terms add up to the user's payoff."""
        profile = PowerProfile.random_interior(self.game, seed=1)
        matrix = utility_matrix(self.game, profile)
        for k in range(2):
            assert matrix[k].sum() == pytest.approx(utility(self.game, profile, k))

    def test_potential_value(self):
        """Test the potential at the crossed vertex."""
        assert potential(self.game, self.equilibrium) == pytest.approx(-2.0 * np.log(3.0))

    def test_marginal_payoffs_at_uniform(self):
        """Test v = b g / load at the uniform profile."""
        v = marginal_payoffs(self.game, PowerProfile.uniform(self.game))
        np.testing.assert_allclose(v, [[0.8, 0.4], [0.4, 0.8]])

    def test_marginal_payoffs_are_negative_gradient(self):
        """Test v matches central differences of the potential."""
        game = random_game(3, 3, seed=4)
        p = np.array(PowerProfile.random_interior(game, seed=2).allocation)
        v = marginal_payoffs(game, p)
        eps = 1e-6
        for k in range(3):
            for a in range(3):
                up, down = p.copy(), p.copy()
                up[k, a] += eps
                down[k, a] -= eps
                fd = -(potential(game, up) - potential(game, down)) / (2 * eps)
                assert fd == pytest.approx(v[k, a], rel=1e-6)

    def test_payoffs_accept_zero_budget_rows(self):
        """Test raw arrays with an empty row evaluate without validation."""
        raw = np.array([[1.0, 0.0], [0.0, 0.0]])
        assert utility(self.game, raw, 1) == 0.0
        assert np.isfinite(potential(self.game, raw))

    def test_reconstruct_marginal_payoffs(self):
        """Test v is recovered from observed spectral efficiencies."""
        game = random_game(3, 4, seed=8)
        profile = PowerProfile.random_interior(game, seed=9)
        observed = utility_matrix(game, profile)
        recovered = reconstruct_marginal_payoffs(game, profile, observed)
        np.testing.assert_allclose(recovered, marginal_payoffs(game, profile), rtol=1e-9)

    def test_reconstruct_with_silent_node(self):
        """Test a node nobody transmits on falls back to its noise."""
        game = random_game(2, 3, seed=10)
        profile = PowerProfile.vertex(game, [0, 0])
        recovered = reconstruct_marginal_payoffs(game, profile, utility_matrix(game, profile))
        np.testing.assert_allclose(recovered, marginal_payoffs(game, profile), rtol=1e-9)

    def test_reconstruct_shape_check(self):
        """Test observed efficiencies must be K×A."""
        with pytest.raises(ValueError):
            reconstruct_marginal_payoffs(self.game, self.equilibrium, np.zeros(2))


class TestExactPotential:
    """Test cases for the exact-potential property."""

    def test_holds_on_random_games(self):
        """Test unilateral payoff changes equal potential drops."""
        for seed in range(5):
            game = random_game(3, 3, seed=seed)
            holds, deviation = verify_exact_potential(game, num_samples=40, seed=seed)
            assert holds
            assert deviation < 1e-10

    def test_detects_wrong_potential(self):
        """Test a scaled potential is reported as a violation."""
        game = random_game(2, 2, seed=0)
        holds, deviation = verify_exact_potential(
            game, num_samples=20, seed=0, potential_fn=lambda g, p: 2.0 * potential(g, p)
        )
        assert not holds
        assert deviation > 1e-6

    def test_shifted_potential_reports_power_change(self):
        """Test Phi + p_11 misses by exactly the deviating change in p_11."""
        game = random_game(1, 3, seed=0)
        for seed in range(5):
            holds, deviation = verify_exact_potential(
                game,
                num_samples=1,
                seed=seed,
                potential_fn=lambda g, p: potential(g, p) + p[0, 0],
            )
            rng = np.random.default_rng(seed)
            base = PowerProfile.random_interior(game, seed=int(rng.integers(2**32))).allocation
            rng.integers(game.num_users)
            moved = rng.dirichlet(np.ones(game.num_nodes))[0] * game.budgets[0]
            assert deviation == pytest.approx(abs(moved - base[0, 0]), abs=1e-12)
            assert holds == (deviation <= 1e-8)

    def test_rejects_non_positive_tolerance(self):
        """Test tol must be positive."""
        with pytest.raises(ValueError):
            verify_exact_potential(crossed_game(), tol=0.0)


class TestGenerators:
    """Test cases for random and collinear games."""

    def test_random_game_defaults(self):
        """Test default noise, bandwidths and budgets."""
        game = random_game(3, 4, seed=1)
        np.testing.assert_allclose(game.noise, np.ones(4))
        np.testing.assert_allclose(game.bandwidths, np.full(4, 0.25))
        np.testing.assert_allclose(game.budgets, np.ones(3))
        assert game.bandwidths_normalized

    def test_random_game_is_reproducible(self):
        """Test the same seed gives the same gains."""
        np.testing.assert_array_equal(random_game(2, 2, seed=7).gains, random_game(2, 2, seed=7).gains)
        assert not np.array_equal(random_game(2, 2, seed=7).gains, random_game(2, 2, seed=8).gains)

    def test_log_uniform_range(self):
        """Test log-uniform gains stay inside their range."""
        gains = draw_gains(np.random.default_rng(0), 50, 4, "log_uniform")
        assert gains.min() >= 0.1 - 1e-12
        assert gains.max() <= 10.0 + 1e-12

    def test_unknown_distribution(self):
        """Test unknown gain laws are rejected."""
        with pytest.raises(GameDomainError):
            random_game(2, 2, seed=0, gain_distribution="cauchy")

    def test_invalid_dimensions(self):
        """Test K and A must be positive."""
        with pytest.raises(GameDomainError):
            random_game(0, 2)
        with pytest.raises(GameDomainError):
            random_game(2, 0)

    def test_collinear_game(self):
        """Test rows are multiples of the base row."""
        game = collinear_game([1.0, 2.0, 3.0], [1.0, 0.5])
        np.testing.assert_allclose(game.gains, [[1.0, 2.0, 3.0], [0.5, 1.0, 1.5]])
        assert np.linalg.matrix_rank(game.gains) == 1
        assert game.gain_distribution == "collinear"

    def test_random_collinear_game(self):
        """Test row k is factor**k times the first row."""
        game = random_collinear_game(3, 4, seed=2, factor=3.0)
        np.testing.assert_allclose(game.gains[2], 9.0 * game.gains[0])
        assert game.seed == 2
        assert game.gain_distribution == "collinear:exponential"

    def test_exponential_gains_have_unit_mean(self):
        """Test 10^4 exponential draws average to 1."""
        gains = draw_gains(np.random.default_rng(0), 100, 100, "exponential")
        assert gains.mean() == pytest.approx(1.0, abs=0.05)


class TestLogBase:
    """Test cases for measuring rates in bits instead of nats."""

    def setup_method(self):
        self.game = random_game(3, 3, seed=4)
        # b_a log2(x) = (b_a / ln 2) log(x)
        self.bits = new_game(
            self.game.gains, self.game.noise, self.game.bandwidths / np.log(2.0), self.game.budgets
        )

    def test_payoffs_rescale(self):
        """Test utilities and the potential scale by 1/ln 2."""
        p = PowerProfile.random_interior(self.game, seed=1)
        for k in range(self.game.num_users):
            assert utility(self.bits, p, k) == pytest.approx(utility(self.game, p, k) / np.log(2.0))
        assert potential(self.bits, p) == pytest.approx(potential(self.game, p) / np.log(2.0))

    def test_equilibrium_is_unchanged(self):
        """Test the equilibrium does not depend on the logarithm base."""
        nats = solve_potential_min(self.game)
        bits = solve_potential_min(self.bits)
        assert nats.converged and bits.converged
        np.testing.assert_allclose(bits.allocation, nats.allocation, atol=1e-8)
        np.testing.assert_array_equal(bits.support, nats.support)
