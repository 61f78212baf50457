"""Spectral radius and trace-based lower bound for small matrices."""

from __future__ import annotations
import logging

import numpy as np
from scipy.linalg import svdvals

logger = logging.getLogger(__name__)


def _check_square(matrix: np.ndarray) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


def spectral_radius(
    matrix: np.ndarray,
    tol: float = 1e-12,
    max_iters: int = 2000,
    seed: int = 0,
) -> float:
    """Largest eigenvalue modulus.

    Non-negative matrices use power iteration on M + I from a random positive
    start, stopping when the Collatz-Wielandt ratio bounds agree to tol
    relative. Matrices with negative entries, or iterations that stall, fall
    back to a dense eigendecomposition.
    """
    m = _check_square(matrix)
    n = m.shape[0]
    if n == 0:
        return 0.0
    if np.any(m < 0):
        return float(np.max(np.abs(np.linalg.eigvals(m))))

    shifted = m + np.eye(n)
    x = np.random.default_rng(seed).uniform(0.5, 1.5, size=n)
    for it in range(max_iters):
        y = shifted @ x
        ratios = y / x
        lo, hi = float(ratios.min()), float(ratios.max())
        if hi - lo <= tol * hi:
            logger.debug("Power iteration converged after %d iterations", it + 1)
            return max(0.5 * (lo + hi) - 1.0, 0.0)
        x = y / np.linalg.norm(y)
        if np.any(x <= 0):
            break

    logger.debug("Power iteration stalled on %d×%d matrix; using eigvals", n, n)
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def spectral_lower_bound(matrix: np.ndarray, rank_tol: float = 1e-10) -> tuple[float, bool]:
    """Trace/rank lower bound |tr|/S + sqrt((tr(M²) - tr²/S) / (S(S-1))), S = rank.

    Returns:
        (value, applicable); applicable is False and value 0 when rank < 2.
    """
    m = _check_square(matrix)
    if m.size == 0:
        return 0.0, False
    singular = svdvals(m)
    rank = int(np.sum(singular > rank_tol * singular[0])) if singular[0] > 0 else 0
    if rank < 2:
        return 0.0, False
    tr = float(np.trace(m))
    tr_sq = float(np.trace(m @ m))
    spread = max((tr_sq - tr * tr / rank) / (rank * (rank - 1)), 0.0)
    return abs(tr) / rank + float(np.sqrt(spread)), True
