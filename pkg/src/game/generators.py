"""Random and structured game generators."""

from __future__ import annotations
from typing import Sequence

import numpy as np

from .models import Game, GameDomainError, new_game


GAIN_DISTRIBUTIONS = ("exponential", "log_uniform")
LOG_UNIFORM_RANGE = (0.1, 10.0)


def draw_gains(
    rng: np.random.Generator,
    num_users: int,
    num_nodes: int,
    gain_distribution: str = "exponential",
) -> np.ndarray:
    """Draw a K×A gain matrix from a continuous law.

    "exponential" is unit-mean (|h|² of a unit complex Gaussian channel);
    "log_uniform" is uniform in log over [0.1, 10].
    """
    if gain_distribution == "exponential":
        gains = rng.exponential(1.0, size=(num_users, num_nodes))
        # exact zeros have probability zero but would break validation
        return np.maximum(gains, np.finfo(float).tiny)
    if gain_distribution == "log_uniform":
        lo, hi = np.log(LOG_UNIFORM_RANGE[0]), np.log(LOG_UNIFORM_RANGE[1])
        return np.exp(rng.uniform(lo, hi, size=(num_users, num_nodes)))
    raise GameDomainError(
        f"unknown gain distribution {gain_distribution!r}; expected one of {GAIN_DISTRIBUTIONS}",
        field="gain_distribution",
    )


def _check_dims(num_users: int, num_nodes: int) -> None:
    if num_users < 1:
        raise GameDomainError(f"number of users must be >= 1, got {num_users}", field="num_users")
    if num_nodes < 1:
        raise GameDomainError(f"number of nodes must be >= 1, got {num_nodes}", field="num_nodes")


def random_game(
    num_users: int,
    num_nodes: int,
    seed: int | None = None,
    gain_distribution: str = "exponential",
    noise: Sequence[float] | None = None,
    bandwidths: Sequence[float] | None = None,
    budgets: Sequence[float] | None = None,
) -> Game:
    """Random game with i.i.d. gains; noise 1, bandwidths 1/A and budgets 1 unless given."""
    _check_dims(num_users, num_nodes)
    rng = np.random.default_rng(seed)
    gains = draw_gains(rng, num_users, num_nodes, gain_distribution)
    return new_game(
        gains,
        np.ones(num_nodes) if noise is None else noise,
        np.full(num_nodes, 1.0 / num_nodes) if bandwidths is None else bandwidths,
        np.ones(num_users) if budgets is None else budgets,
        seed=None if seed is None else int(seed),
        gain_distribution=gain_distribution,
    )


def collinear_game(
    base_gains: Sequence[float],
    factors: Sequence[float],
    noise: Sequence[float] | None = None,
    bandwidths: Sequence[float] | None = None,
    budgets: Sequence[float] | None = None,
) -> Game:
    """Degenerate game whose gain rows are g_k = factors[k] * base_gains."""
    base = np.asarray(base_gains, dtype=float)
    c = np.asarray(factors, dtype=float)
    num_nodes, num_users = base.size, c.size
    _check_dims(num_users, num_nodes)
    return new_game(
        np.outer(c, base),
        np.ones(num_nodes) if noise is None else noise,
        np.full(num_nodes, 1.0 / num_nodes) if bandwidths is None else bandwidths,
        np.ones(num_users) if budgets is None else budgets,
        gain_distribution="collinear",
    )


def random_collinear_game(
    num_users: int,
    num_nodes: int,
    seed: int | None = None,
    factor: float = 2.0,
    gain_distribution: str = "exponential",
) -> Game:
    """Random first row, remaining rows scaled by factor, factor², ..."""
    _check_dims(num_users, num_nodes)
    if factor <= 0:
        raise GameDomainError(f"collinear factor must be positive, got {factor}", field="factor")
    rng = np.random.default_rng(seed)
    base = draw_gains(rng, 1, num_nodes, gain_distribution)[0]
    game = collinear_game(base, factor ** np.arange(num_users))
    return new_game(
        game.gains,
        game.noise,
        game.bandwidths,
        game.budgets,
        seed=None if seed is None else int(seed),
        gain_distribution=f"collinear:{gain_distribution}",
    )
