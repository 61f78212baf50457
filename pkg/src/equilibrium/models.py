"""Data models for equilibrium computation and profile-graph analysis."""

from __future__ import annotations
from dataclasses import dataclass, field
from enum import Enum
from typing import Any
import json

import networkx as nx
import numpy as np

from src.game.models import Game, PowerProfile


DEFAULT_SUPPORT_TOL = 1e-6


class SolverName(str, Enum):
    """Available equilibrium solvers."""
    PGD = "pgd"
    SWF = "swf"


@dataclass(frozen=True)
class KKTBreakdown:
    """Per-user view of the first-order conditions."""
    multipliers: np.ndarray
    user_residuals: np.ndarray
    complementary_slackness: np.ndarray
    max_violation: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "multipliers": self.multipliers.tolist(),
            "user_residuals": self.user_residuals.tolist(),
            "complementary_slackness": self.complementary_slackness.tolist(),
            "max_violation": self.max_violation,
        }


@dataclass(frozen=True)
class ProfileEdge:
    """Edge between two network nodes, owned by the user who splits power over them."""
    source: int
    target: int
    owner: int

    def to_tuple(self) -> tuple[int, int, int]:
        return (self.source, self.target, self.owner)


@dataclass
class ProfileGraph:
    """Multigraph on the network nodes representing a power profile.

    Each user with support of size s contributes s - 1 edges, from its hub
    node to every other node it transmits to.
    """
    num_nodes: int
    edges: list[ProfileEdge] = field(default_factory=list)
    hubs: list[int | None] = field(default_factory=list)

    @property
    def nodes(self) -> list[int]:
        return list(range(self.num_nodes))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def edges_of(self, owner: int) -> list[ProfileEdge]:
        return [e for e in self.edges if e.owner == owner]

    def to_networkx(self) -> nx.MultiGraph:
        """Convert to a networkx MultiGraph (edge key = owner user)."""
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.nodes)
        for user, hub in enumerate(self.hubs):
            if hub is not None:
                owners = graph.nodes[hub].get("hub_of")
                graph.nodes[hub]["hub_of"] = f"{owners},{user}" if owners else str(user)
        for edge in self.edges:
            graph.add_edge(edge.source, edge.target, key=edge.owner, owner=edge.owner)
        return graph

    def to_dict(self) -> dict[str, Any]:
        return {
            "num_nodes": self.num_nodes,
            "edges": [list(e.to_tuple()) for e in self.edges],
            "hubs": list(self.hubs),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ProfileGraph:
        return cls(
            num_nodes=data["num_nodes"],
            edges=[ProfileEdge(*e) for e in data.get("edges", [])],
            hubs=list(data.get("hubs", [])),
        )


@dataclass
class EquilibriumReport:
    """Solver output together with its equilibrium diagnostics."""
    profile: PowerProfile
    kkt_residual: float
    iterations: int
    converged: bool
    potential_value: float
    multipliers: np.ndarray
    support: np.ndarray
    solver: str
    tolerance: float
    support_tol: float = DEFAULT_SUPPORT_TOL
    seed: int | None = None
    game_hash: str | None = None
    face_dim: int = 0
    dimension_margin: int = 0
    is_forest: bool = True
    nash_gap: float = 0.0
    waterfilling_gap: float = 0.0
    breakdown: KKTBreakdown | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def allocation(self) -> np.ndarray:
        return self.profile.allocation

    def to_dict(self) -> dict[str, Any]:
        """Convert report to dictionary."""
        data: dict[str, Any] = {
            "solver": self.solver,
            "converged": self.converged,
            "iterations": self.iterations,
            "tolerance": self.tolerance,
            "support_tol": self.support_tol,
            "kkt_residual": self.kkt_residual,
            "potential_value": self.potential_value,
            "profile": self.profile.allocation.tolist(),
            "multipliers": self.multipliers.tolist(),
            "support": self.support.astype(int).tolist(),
            "face_dim": self.face_dim,
            "dimension_margin": self.dimension_margin,
            "is_forest": self.is_forest,
            "nash_gap": self.nash_gap,
            "waterfilling_gap": self.waterfilling_gap,
            "seed": self.seed,
            "game_hash": self.game_hash,
        }
        if self.breakdown is not None:
            data["kkt_breakdown"] = self.breakdown.to_dict()
        if self.metadata:
            data["metadata"] = dict(self.metadata)
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any], game: Game) -> EquilibriumReport:
        """Rebuild a report against the game it was computed for."""
        breakdown = None
        if "kkt_breakdown" in data:
            b = data["kkt_breakdown"]
            breakdown = KKTBreakdown(
                multipliers=np.asarray(b["multipliers"], dtype=float),
                user_residuals=np.asarray(b["user_residuals"], dtype=float),
                complementary_slackness=np.asarray(b["complementary_slackness"], dtype=float),
                max_violation=float(b["max_violation"]),
            )
        return cls(
            profile=PowerProfile.for_game(game, data["profile"]),
            kkt_residual=float(data["kkt_residual"]),
            iterations=int(data["iterations"]),
            converged=bool(data["converged"]),
            potential_value=float(data["potential_value"]),
            multipliers=np.asarray(data["multipliers"], dtype=float),
            support=np.asarray(data["support"], dtype=bool),
            solver=data["solver"],
            tolerance=float(data["tolerance"]),
            support_tol=float(data.get("support_tol", DEFAULT_SUPPORT_TOL)),
            seed=data.get("seed"),
            game_hash=data.get("game_hash"),
            face_dim=int(data.get("face_dim", 0)),
            dimension_margin=int(data.get("dimension_margin", 0)),
            is_forest=bool(data.get("is_forest", True)),
            nash_gap=float(data.get("nash_gap", 0.0)),
            waterfilling_gap=float(data.get("waterfilling_gap", 0.0)),
            breakdown=breakdown,
            metadata=dict(data.get("metadata", {})),
        )

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    def summary(self) -> str:
        status = "converged" if self.converged else "NOT converged"
        return (
            f"{self.solver}: {status} after {self.iterations} iterations, "
            f"residual {self.kkt_residual:.3e}, potential {self.potential_value:.12g}, "
            f"face dim {self.face_dim}, forest {self.is_forest}"
        )
