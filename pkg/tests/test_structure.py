"""Tests for spectral tools, degeneracy and the uniqueness conditions."""

import numpy as np
import pytest

from src.equilibrium.solvers import solve_potential_min
from src.game.generators import collinear_game, random_collinear_game, random_game
from src.game.models import new_game
from src.game.payoffs import potential
from src.structure.conditions import c2_min_eigenvalue, check_conditions, s_alpha_matrix, s_max_matrix
from src.structure.degeneracy import constraint_matrix, degeneracy_index, degenerate_directions
from src.structure.models import ConditionReport
from src.structure.spectral import spectral_lower_bound, spectral_radius


def crossed_game():
    return new_game([[2.0, 1.0], [1.0, 2.0]], [1.0, 1.0], [1.0, 1.0], [1.0, 1.0])


class TestSpectralRadius:
    """Test cases for the power iteration."""

    def test_symmetric_pair(self):
        """Test [[0, 2], [2, 0]] has radius 2."""
        assert spectral_radius(np.array([[0.0, 2.0], [2.0, 0.0]])) == pytest.approx(2.0, rel=1e-10)

    def test_matches_eigvals(self):
        """Test power iteration against a dense eigendecomposition."""
        rng = np.random.default_rng(0)
        for _ in range(10):
            m = rng.uniform(0.0, 2.0, size=(4, 4))
            expected = np.max(np.abs(np.linalg.eigvals(m)))
            assert spectral_radius(m) == pytest.approx(expected, rel=1e-9)

    def test_negative_entries(self):
        """Test matrices with negative entries use the dense fallback."""
        m = np.array([[0.0, -3.0], [1.0, 0.0]])
        assert spectral_radius(m) == pytest.approx(np.sqrt(3.0))

    def test_zero_matrix(self):
        """Test the zero matrix has radius zero."""
        assert spectral_radius(np.zeros((3, 3))) == 0.0

    def test_reducible_matrix(self):
        """Test a matrix with zero rows still gets the right radius."""
        m = np.array([[0.0, 3.0, 0.0], [3.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        assert spectral_radius(m) == pytest.approx(3.0, rel=1e-9)

    def test_non_square(self):
        """Test non-square input is rejected."""
        with pytest.raises(ValueError):
            spectral_radius(np.ones((2, 3)))


class TestSpectralLowerBound:
    """Test cases for the trace/rank bound."""

    def test_symmetric_pair(self):
        """Test the bound is tight on [[0, 2], [2, 0]]."""
        value, applicable = spectral_lower_bound(np.array([[0.0, 2.0], [2.0, 0.0]]))
        assert applicable
        assert value == pytest.approx(2.0)

    def test_three_user_ratio_matrix(self):
        """Test the bound on a three-user per-node ratio matrix is 1."""
        game = random_game(3, 2, seed=1)
        value, applicable = spectral_lower_bound(s_alpha_matrix(game, 0))
        assert applicable
        assert value == pytest.approx(1.0)

    def test_rank_one(self):
        """Test the bound is not applicable below rank 2."""
        value, applicable = spectral_lower_bound(np.array([[1.0, 1.0], [1.0, 1.0]]))
        assert not applicable
        assert value == 0.0


class TestRatioMatrices:
    """Test cases for S_max and S(a)."""

    def test_s_max_crossed(self):
        """Test S_max of the crossed game."""
        np.testing.assert_allclose(s_max_matrix(crossed_game()), [[0.0, 2.0], [2.0, 0.0]])

    def test_s_alpha_entries(self):
        """Test S(a)_kl = g_la / g_ka with zero diagonal."""
        game = new_game([[1.0], [4.0]], [1.0], [1.0], [1.0, 1.0])
        np.testing.assert_allclose(s_alpha_matrix(game, 0), [[0.0, 4.0], [0.25, 0.0]])

    def test_s_alpha_radius_is_users_minus_one(self):
        """Test rho(S(a)) = K - 1 for every node."""
        for num_users in (2, 3, 4):
            game = random_game(num_users, 3, seed=num_users)
            for alpha in range(3):
                assert spectral_radius(s_alpha_matrix(game, alpha)) == pytest.approx(num_users - 1, rel=1e-9)

    def test_s_alpha_mask(self):
        """Test masked users get zero rows and columns."""
        game = random_game(3, 2, seed=2)
        s = s_alpha_matrix(game, 1, mask=[True, False, True])
        assert np.all(s[1] == 0.0)
        assert np.all(s[:, 1] == 0.0)
        assert spectral_radius(s) == pytest.approx(1.0, rel=1e-9)

    def test_s_alpha_mask_length(self):
        """Test a mask of the wrong length is rejected."""
        with pytest.raises(ValueError):
            s_alpha_matrix(random_game(3, 2, seed=0), 0, mask=[True, False])

    def test_s_max_ignores_unshared_nodes(self):
        """Test ratios only range over nodes both users reach."""
        game = new_game([[1.0, 1.0], [5.0, 2.0]], [1, 1], [1, 1], [1, 1], access=[[1, 1], [0, 1]])
        s = s_max_matrix(game)
        assert s[0, 1] == pytest.approx(2.0)
        assert s[1, 0] == pytest.approx(0.5)

    def test_c2_eigenvalue(self):
        """Test I + sym(S) for the two-user ratio matrix."""
        s = np.array([[0.0, 4.0], [0.25, 0.0]])
        assert c2_min_eigenvalue(s) == pytest.approx(1.0 - 2.125)


class TestDegeneracy:
    """Test cases for the degeneracy index."""

    @pytest.mark.parametrize(
        "shape,expected",
        [((2, 2), 0), ((2, 3), 1), ((3, 4), 5), ((1, 3), 0), ((4, 1), 0)],
    )
    def test_generic_index(self, shape, expected):
        """Test ind = max(0, KA - K - A) on generic games."""
        ind, rank = degeneracy_index(random_game(*shape, seed=3))
        assert ind == expected
        assert rank == shape[0] * shape[1] - expected

    @pytest.mark.parametrize("num_users", range(2, 7))
    @pytest.mark.parametrize("num_nodes", range(2, 7))
    def test_generic_index_grid(self, num_users, num_nodes):
        """Test the generic formula on every size up to 6x6."""
        game = random_game(num_users, num_nodes, seed=10 * num_users + num_nodes)
        ind, _ = degeneracy_index(game)
        assert ind == max(0, num_users * num_nodes - num_users - num_nodes)

    def test_collinear_index(self):
        """Test collinear gains raise the index."""
        assert degeneracy_index(collinear_game([1.0, 2.0], [1.0, 2.0]))[0] == 1
        assert degeneracy_index(random_collinear_game(3, 3, seed=1))[0] == 4

    def test_constraint_matrix_shape(self):
        """Test the stacked constraint matrix layout."""
        game = new_game([[1.0, 2.0], [3.0, 4.0]], [1, 1], [1, 1], [1, 1], access=[[1, 0], [1, 1]])
        m = constraint_matrix(game)
        assert m.shape == (4, 4)
        assert np.all(m[:, 1] == 0.0)
        np.testing.assert_allclose(m[2], [1.0, 0.0, 3.0, 0.0])

    def test_rank_tol_positive(self):
        """Test rank_tol must be positive."""
        with pytest.raises(ValueError):
            degeneracy_index(crossed_game(), rank_tol=0.0)

    def test_potential_flat_along_directions(self):
        """Test the potential is unchanged along degenerate directions."""
        game = collinear_game([1.0, 1.0], [1.0, 2.0], bandwidths=[0.5, 0.5])
        directions = degenerate_directions(game)
        assert directions.shape == (1, 2, 2)
        np.testing.assert_allclose(directions[0].sum(axis=1), 0.0, atol=1e-12)

        report = solve_potential_min(game, tol=1e-10)
        moved = report.allocation + 0.05 * directions[0]
        assert np.all(moved >= 0)
        assert potential(game, moved) == pytest.approx(report.potential_value, abs=1e-12)

    def test_no_directions_for_generic_games(self):
        """Test a generic 2x2 game has no flat directions."""
        assert degenerate_directions(random_game(2, 2, seed=0)).shape == (0, 2, 2)


class TestCheckConditions:
    """Test cases for the condition audit."""

    def test_crossed_game(self):
        """Test every condition fails on the crossed game."""
        report = check_conditions(crossed_game())
        assert report.rho_smax == pytest.approx(2.0)
        assert not report.cmax_holds
        assert not report.c1_holds
        assert not report.c2_holds
        assert report.spectral_lower_bound == pytest.approx(2.0)
        assert report.degeneracy_index == 0

    def test_multi_user_games_fail(self):
        """Test no condition holds once there are two users."""
        for num_users in (2, 3):
            for seed in range(5):
                report = check_conditions(random_game(num_users, 3, seed=seed))
                assert report.rho_smax >= 1.0 - 1e-9
                assert report.min_rho_s_alpha == pytest.approx(num_users - 1, rel=1e-9)
                assert not report.any_condition_holds

    def test_single_user_holds(self):
        """Test a lone user satisfies all conditions."""
        report = check_conditions(random_game(1, 3, seed=0))
        assert report.rho_smax == 0.0
        assert report.cmax_holds and report.c1_holds and report.c2_holds
        assert not report.bound_applicable

    def test_masks(self):
        """Test masking all but one user per node satisfies C1."""
        game = random_game(3, 2, seed=5)
        masks = {0: [True, False, False], 1: [False, True, False]}
        report = check_conditions(game, masks=masks)
        assert report.masked
        assert report.c1_holds
        np.testing.assert_allclose(report.rho_s_alpha, [0.0, 0.0])

    def test_report_dict_round_trip(self):
        """Test condition reports survive their document form."""
        game = random_game(2, 3, seed=1)
        report = check_conditions(game)
        restored = ConditionReport.from_dict(report.to_dict())
        assert restored.rho_smax == report.rho_smax
        np.testing.assert_array_equal(restored.rho_s_alpha, report.rho_s_alpha)
        assert restored.game_hash == game.content_hash()
        assert "degeneracy index" in restored.summary()
