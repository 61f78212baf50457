"""Replicator dynamics on the product of scaled simplices."""

from __future__ import annotations
from typing import Literal
import logging

import numpy as np

from src.game.models import Game, PowerProfile, as_allocation
from src.game.payoffs import ProfileLike, marginal_payoffs, potential
from src.equilibrium.solvers import solve_potential_min
from src.equilibrium.waterfilling import kkt_residual
from src.structure.degeneracy import degeneracy_index
from .lyapunov import kl_divergence
from .models import TerminationReason, Trajectory, UnderflowEvent
from .reduced import reduced_game, support_of

logger = logging.getLogger(__name__)

PHI_SLACK = 1e-14
KL_SLACK = 1e-12
MAX_CLAMP = 1e-8
REGROW_AFTER = 10


def replicator_field(game: Game, profile: ProfileLike) -> np.ndarray:
    """dp_ka/dt = p_ka (v_ka - v_k), v_k the power-weighted user average.

    The average divides by each row's actual total so rows of the field sum
    to zero.
    """
    p = as_allocation(profile)
    v = marginal_payoffs(game, p)
    totals = p.sum(axis=1)
    weighted = np.einsum("ka,ka->k", p, v)
    average = np.divide(weighted, totals, out=np.zeros_like(weighted), where=totals > 0)
    return p * (v - average[:, None])


def rk4_step(game: Game, allocation: np.ndarray, step: float) -> np.ndarray:
    """One classical fourth-order Runge-Kutta step of the replicator field."""
    k1 = replicator_field(game, allocation)
    k2 = replicator_field(game, allocation + 0.5 * step * k1)
    k3 = replicator_field(game, allocation + 0.5 * step * k2)
    k4 = replicator_field(game, allocation + step * k3)
    return allocation + step * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0


def _clamp(game: Game, allocation: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Zero negative entries and rescale rows to the budgets; returns (profile, clamped mass per user)."""
    clamped = np.where(allocation < 0, -allocation, 0.0).sum(axis=1)
    p = np.maximum(allocation, 0.0)
    return p * (game.budgets / p.sum(axis=1))[:, None], clamped


def integrate(
    game: Game,
    init: PowerProfile | np.ndarray,
    step: float = 0.05,
    horizon: float = 1000.0,
    residual_tol: float = 1e-6,
    reference_q: ProfileLike | None = None,
    stride: int = 1,
    step_floor: float = 1e-10,
    kl_guard: bool = True,
    max_step: float | None = None,
) -> Trajectory:
    """Integrate the replicator dynamics with fixed-step RK4 and descent control.

    After each step negative entries are clamped and rows renormalized; a step
    is rejected and the step size halved when it clamps more than 1e-8·P_k,
    raises the potential, or (with a reference and kl_guard) raises the KL
    divergence from the reference. After a run of accepted steps the step
    size doubles, up to max_step (the initial step when unset).

    Args:
        game: Game to play.
        init: Initial profile.
        step: Initial step size.
        horizon: Final time.
        residual_tol: Stop once the KKT residual falls to this value.
        reference_q: Optional reference profile for the KL monitor.
        stride: Store every stride-th accepted step (first and last always).
        step_floor: Give up when the step size halves below this value.
        kl_guard: Reject steps that increase the monitored KL divergence.
        max_step: Cap for step growth; late boundary approach is slow, so
            long horizons want a cap above the initial step.

    Raises:
        ProfileError: if init is not a valid profile of game.
    """
    if step <= 0 or horizon <= 0 or residual_tol <= 0:
        raise ValueError("step, horizon and residual_tol must be positive")
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    cap = step if max_step is None else max_step
    if cap < step:
        raise ValueError(f"max_step {max_step} is below the initial step {step}")

    start = init if isinstance(init, PowerProfile) else PowerProfile.for_game(game, init)
    start = PowerProfile.for_game(game, start.allocation)
    q = None if reference_q is None else np.array(as_allocation(reference_q))
    face = support_of(start)

    p = np.array(start.allocation)
    t = 0.0
    h = step
    phi = potential(game, p)
    best_phi = phi
    residual = kkt_residual(game, p, face)
    kl = kl_divergence(q, p) if q is not None else None
    best_kl = float(kl) if kl is not None else np.inf

    trajectory = Trajectory(initial_step=step, reference=q)
    trajectory.append(t, start, phi, residual, 0.0, kl)
    pending_clamp = 0.0
    streak = 0
    reason = TerminationReason.HORIZON
    stored_at = 0

    while True:
        if residual <= residual_tol:
            reason = TerminationReason.CONVERGED
            break
        if t >= horizon * (1.0 - 1e-15):
            reason = TerminationReason.HORIZON
            break

        h_eff = min(h, horizon - t)
        candidate, clamped = _clamp(game, rk4_step(game, p, h_eff))
        reject = bool(np.any(clamped > MAX_CLAMP * game.budgets))
        candidate_phi = potential(game, candidate) if not reject else phi
        if not reject and candidate_phi > best_phi + PHI_SLACK:
            reject = True
        candidate_kl = None
        if not reject and q is not None:
            candidate_kl = kl_divergence(q, candidate)
            if kl_guard and candidate_kl.finite and float(candidate_kl) > best_kl + KL_SLACK:
                reject = True

        if reject:
            trajectory.rejected_steps += 1
            streak = 0
            h *= 0.5
            if h < step_floor:
                logger.warning("Step size fell below %.3g at t=%.6g", step_floor, t)
                reason = TerminationReason.STEP_FLOOR
                break
            continue

        lost = (p > 0) & (candidate == 0)
        for k, alpha in zip(*np.nonzero(lost)):
            trajectory.underflow_events.append(UnderflowEvent(t + h_eff, int(k), int(alpha)))
            logger.info("Coordinate (%d, %d) underflowed to zero at t=%.6g", k, alpha, t + h_eff)

        t += h_eff
        p, phi = candidate, candidate_phi
        best_phi = min(best_phi, phi)
        residual = kkt_residual(game, p, face)
        kl = candidate_kl
        if kl is not None and kl.finite:
            best_kl = min(best_kl, float(kl))
        pending_clamp += float(clamped.sum())
        trajectory.accepted_steps += 1
        streak += 1
        if streak >= REGROW_AFTER and h < cap:
            h = min(2.0 * h, cap)
            streak = 0

        if trajectory.accepted_steps % stride == 0:
            trajectory.append(t, PowerProfile.for_game(game, p), phi, residual, pending_clamp, kl)
            pending_clamp = 0.0
            stored_at = trajectory.accepted_steps

    if stored_at != trajectory.accepted_steps:
        trajectory.append(t, PowerProfile.for_game(game, p), phi, residual, pending_clamp, kl)

    trajectory.terminated_reason = reason
    trajectory.step_size = h
    logger.debug(
        "Integration stopped (%s) at t=%.6g after %d steps, residual %.3e",
        reason.value, t, trajectory.accepted_steps, residual,
    )
    return trajectory


def attach_kl(trajectory: Trajectory, reference: ProfileLike, source: str) -> Trajectory:
    """Recompute the KL monitor of every stored sample against a fixed reference."""
    q = np.array(as_allocation(reference))
    trajectory.kl_values = [kl_divergence(q, profile) for profile in trajectory.profiles]
    trajectory.reference = q
    trajectory.reference_source = source
    return trajectory


def simulate(
    game: Game,
    init: PowerProfile | np.ndarray,
    step: float = 0.05,
    horizon: float = 1000.0,
    residual_tol: float = 1e-6,
    stride: int = 1,
    reference: Literal["auto", "solver", "final", "none"] = "auto",
    solver_tol: float = 1e-12,
    max_step: float | None = None,
) -> Trajectory:
    """Integrate with the KL monitor wired to a sensible reference.

    The target of an orbit is the equilibrium of the game reduced to the
    initial support. With "auto", a non-degenerate reduced game supplies its
    solver equilibrium as the monitored reference; a degenerate one is
    monitored post hoc against the final sample, since its limit is not known
    in advance.
    """
    start = init if isinstance(init, PowerProfile) else PowerProfile.for_game(game, init)
    q = None
    source = None
    if reference in ("auto", "solver"):
        restricted = reduced_game(game, support_of(start))
        ind, _ = degeneracy_index(restricted.game)
        if reference == "solver" or ind == 0:
            report = solve_potential_min(restricted.game, tol=solver_tol)
            q = restricted.embed(report.profile).allocation
            source = "solver"

    trajectory = integrate(
        game, start, step, horizon, residual_tol, reference_q=q, stride=stride, max_step=max_step
    )
    if q is not None:
        trajectory.reference_source = source
    elif reference in ("auto", "final"):
        attach_kl(trajectory, trajectory.final_profile, "final")
    trajectory.metadata.update(
        {
            "game_hash": game.content_hash(),
            "step": step,
            "horizon": horizon,
            "residual_tol": residual_tol,
            "stride": stride,
            "max_step": step if max_step is None else max_step,
        }
    )
    return trajectory


def stationary_residual(game: Game, profile: ProfileLike) -> float:
    """Max-norm of the replicator field; zero at vertices and equilibria."""
    return float(np.max(np.abs(replicator_field(game, profile))))
