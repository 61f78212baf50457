"""Data models for uniqueness-condition audits."""

from __future__ import annotations
from dataclasses import dataclass, field
from typing import Any
import json

import numpy as np


DEFAULT_COND_TOL = 1e-9
DEFAULT_RANK_TOL = 1e-10


@dataclass
class ConditionReport:
    """Verdicts and values of the sufficient uniqueness conditions.

    Attributes:
        rho_smax: spectral radius of the max-ratio matrix.
        rho_s_alpha: spectral radius of each per-node ratio matrix.
        cmax_holds: rho_smax < 1 - cond_tol.
        c1_holds: every rho_s_alpha < 1 - cond_tol.
        c2_holds: I + sym(S(a)) positive definite (min eigenvalue > cond_tol) for every node.
        spectral_lower_bound: trace/rank lower bound on rho_smax (0 when not applicable).
        bound_applicable: False when the matrix rank is below 2.
        degeneracy_index: K·A - constraint_rank over accessible pairs.
        constraint_rank: numerical rank of the stacked tangent-constraint matrix.
        c2_min_eigenvalues: smallest eigenvalue of I + sym(S(a)) per node.
    """
    rho_smax: float
    rho_s_alpha: np.ndarray
    cmax_holds: bool
    c1_holds: bool
    c2_holds: bool
    spectral_lower_bound: float
    bound_applicable: bool
    degeneracy_index: int
    constraint_rank: int
    c2_min_eigenvalues: np.ndarray
    cond_tol: float = DEFAULT_COND_TOL
    rank_tol: float = DEFAULT_RANK_TOL
    masked: bool = False
    game_hash: str | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def min_rho_s_alpha(self) -> float:
        return float(np.min(self.rho_s_alpha))

    @property
    def any_condition_holds(self) -> bool:
        return self.cmax_holds or self.c1_holds or self.c2_holds

    def to_dict(self) -> dict[str, Any]:
        return {
            "rho_smax": self.rho_smax,
            "rho_s_alpha": self.rho_s_alpha.tolist(),
            "cmax_holds": self.cmax_holds,
            "c1_holds": self.c1_holds,
            "c2_holds": self.c2_holds,
            "spectral_lower_bound": self.spectral_lower_bound,
            "bound_applicable": self.bound_applicable,
            "degeneracy_index": self.degeneracy_index,
            "constraint_rank": self.constraint_rank,
            "c2_min_eigenvalues": self.c2_min_eigenvalues.tolist(),
            "cond_tol": self.cond_tol,
            "rank_tol": self.rank_tol,
            "masked": self.masked,
            "game_hash": self.game_hash,
            "metadata": dict(self.metadata),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ConditionReport:
        return cls(
            rho_smax=float(data["rho_smax"]),
            rho_s_alpha=np.asarray(data["rho_s_alpha"], dtype=float),
            cmax_holds=bool(data["cmax_holds"]),
            c1_holds=bool(data["c1_holds"]),
            c2_holds=bool(data["c2_holds"]),
            spectral_lower_bound=float(data["spectral_lower_bound"]),
            bound_applicable=bool(data.get("bound_applicable", True)),
            degeneracy_index=int(data["degeneracy_index"]),
            constraint_rank=int(data["constraint_rank"]),
            c2_min_eigenvalues=np.asarray(data.get("c2_min_eigenvalues", []), dtype=float),
            cond_tol=float(data.get("cond_tol", DEFAULT_COND_TOL)),
            rank_tol=float(data.get("rank_tol", DEFAULT_RANK_TOL)),
            masked=bool(data.get("masked", False)),
            game_hash=data.get("game_hash"),
            metadata=dict(data.get("metadata", {})),
        )

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def summary(self) -> str:
        def verdict(flag: bool) -> str:
            return "holds" if flag else "fails"

        return (
            f"rho(S_max) = {self.rho_smax:.6g} (Cmax {verdict(self.cmax_holds)}), "
            f"min rho(S(a)) = {self.min_rho_s_alpha:.6g} (C1 {verdict(self.c1_holds)}), "
            f"C2 {verdict(self.c2_holds)}, degeneracy index {self.degeneracy_index}"
        )
