"""Data models for replicator-dynamics trajectories."""

from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
from typing import Any
import math

import numpy as np

from src.game.models import PowerProfile


UNSUPPORTED = "unsupported"


class TerminationReason(str, Enum):
    """Why an integration stopped."""
    CONVERGED = "converged"
    HORIZON = "horizon"
    STEP_FLOOR = "step_floor"


@dataclass(frozen=True)
class KLDivergence:
    """Relative entropy of a profile from a reference, or the unsupported marker.

    `value is None` means the reference puts power where the profile has none,
    so the divergence is infinite.
    """
    value: float | None

    @classmethod
    def unsupported(cls) -> KLDivergence:
        return cls(None)

    @property
    def finite(self) -> bool:
        return self.value is not None

    def __float__(self) -> float:
        return math.inf if self.value is None else float(self.value)

    def to_field(self) -> str:
        return UNSUPPORTED if self.value is None else f"{self.value:.17g}"

    def to_json(self) -> float | str:
        return UNSUPPORTED if self.value is None else self.value

    @classmethod
    def from_json(cls, raw: float | str | None) -> KLDivergence:
        if raw is None or raw == UNSUPPORTED:
            return cls.unsupported()
        return cls(float(raw))


@dataclass(frozen=True)
class UnderflowEvent:
    """A coordinate that was positive and became exactly zero."""
    time: float
    user: int
    node: int

    def to_dict(self) -> dict[str, Any]:
        return {"time": self.time, "user": self.user, "node": self.node}


@dataclass
class Trajectory:
    """Stored samples of an integrated replicator orbit.

    Samples are the initial state, every stride-th accepted step and the
    final state. Each sample carries the potential, the KKT residual, the
    mass clamped since the previous sample and, when a reference is
    monitored, the KL divergence from it.
    """
    times: list[float] = field(default_factory=list)
    profiles: list[PowerProfile] = field(default_factory=list)
    potential_values: list[float] = field(default_factory=list)
    kkt_residuals: list[float] = field(default_factory=list)
    clamped_mass: list[float] = field(default_factory=list)
    kl_values: list[KLDivergence] | None = None
    step_size: float = 0.0
    initial_step: float = 0.0
    terminated_reason: TerminationReason = TerminationReason.HORIZON
    accepted_steps: int = 0
    rejected_steps: int = 0
    underflow_events: list[UnderflowEvent] = field(default_factory=list)
    reference: np.ndarray | None = None
    reference_source: str | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def append(
        self,
        time: float,
        profile: PowerProfile,
        potential_value: float,
        residual: float,
        clamped: float,
        kl: KLDivergence | None = None,
    ) -> None:
        self.times.append(float(time))
        self.profiles.append(profile)
        self.potential_values.append(float(potential_value))
        self.kkt_residuals.append(float(residual))
        self.clamped_mass.append(float(clamped))
        if kl is not None:
            if self.kl_values is None:
                self.kl_values = []
            self.kl_values.append(kl)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def final_profile(self) -> PowerProfile:
        return self.profiles[-1]

    @property
    def final_time(self) -> float:
        return self.times[-1]

    @property
    def final_residual(self) -> float:
        return self.kkt_residuals[-1]

    @property
    def converged(self) -> bool:
        return self.terminated_reason is TerminationReason.CONVERGED

    def allocations(self) -> np.ndarray:
        """Stacked samples, shape (n, K, A)."""
        return np.stack([p.allocation for p in self.profiles])

    def header(self) -> list[str]:
        num_users, num_nodes = self.profiles[0].shape
        columns = ["t"]
        columns += [f"p_{k + 1}_{a + 1}" for k in range(num_users) for a in range(num_nodes)]
        columns += ["potential", "kl", "kkt_residual", "clamped_mass"]
        return columns

    def rows(self) -> list[list[str]]:
        """CSV rows with reals at 17 significant digits."""
        out = []
        for i, t in enumerate(self.times):
            kl = self.kl_values[i].to_field() if self.kl_values else ""
            row = [f"{t:.17g}"]
            row += [f"{x:.17g}" for x in self.profiles[i].allocation.ravel()]
            row += [
                f"{self.potential_values[i]:.17g}",
                kl,
                f"{self.kkt_residuals[i]:.17g}",
                f"{self.clamped_mass[i]:.17g}",
            ]
            out.append(row)
        return out

    def summary_dict(self) -> dict[str, Any]:
        """Metadata for the sidecar document."""
        final_kl = self.kl_values[-1].to_json() if self.kl_values else None
        return {
            "samples": len(self),
            "final_time": self.final_time,
            "final_residual": self.final_residual,
            "final_potential": self.potential_values[-1],
            "final_kl": final_kl,
            "final_profile": self.final_profile.allocation.tolist(),
            "terminated_reason": self.terminated_reason.value,
            "initial_step": self.initial_step,
            "final_step": self.step_size,
            "accepted_steps": self.accepted_steps,
            "rejected_steps": self.rejected_steps,
            "underflow_events": [e.to_dict() for e in self.underflow_events],
            "reference": None if self.reference is None else self.reference.tolist(),
            "reference_source": self.reference_source,
            **self.metadata,
        }
