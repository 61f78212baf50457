"""Replicator dynamics, Lyapunov monitors and reduced games."""

from .models import KLDivergence, TerminationReason, Trajectory, UnderflowEvent, UNSUPPORTED
from .lyapunov import growth_estimate_gap, kl_divergence, lyapunov_L
from .reduced import ReducedGame, reduced_game, support_of
from .replicator import (
    attach_kl,
    integrate,
    replicator_field,
    rk4_step,
    simulate,
    stationary_residual,
)

__all__ = [
    "KLDivergence",
    "TerminationReason",
    "Trajectory",
    "UnderflowEvent",
    "UNSUPPORTED",
    "growth_estimate_gap",
    "kl_divergence",
    "lyapunov_L",
    "ReducedGame",
    "reduced_game",
    "support_of",
    "attach_kl",
    "integrate",
    "replicator_field",
    "rk4_step",
    "simulate",
    "stationary_residual",
]
