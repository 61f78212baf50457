"""Graph representation of power profiles and the forest test."""

from __future__ import annotations
from typing import Sequence

import numpy as np

from src.game.models import PowerProfile, as_allocation
from src.game.payoffs import ProfileLike
from .models import DEFAULT_SUPPORT_TOL, ProfileEdge, ProfileGraph


class UnionFind:
    """Disjoint sets over 0..n-1 with union by size and path compression."""

    def __init__(self, length: int):
        self.parents: list[int | None] = [None] * length
        self.sizes = [1] * length

    def find(self, i: int) -> int:
        root = i
        while self.parents[root] is not None:
            root = self.parents[root]  # type: ignore[assignment]
        while i != root:
            parent = self.parents[i]
            self.parents[i] = root
            i = parent  # type: ignore[assignment]
        return root

    def union(self, i: int, j: int) -> bool:
        """Merge the sets of i and j; False if they were already joined."""
        i, j = self.find(i), self.find(j)
        if i == j:
            return False
        if self.sizes[i] < self.sizes[j]:
            i, j = j, i
        self.parents[j] = i
        self.sizes[i] += self.sizes[j]
        return True


def support_mask(profile: ProfileLike, support_tol: float = DEFAULT_SUPPORT_TOL) -> np.ndarray:
    """Entries above support_tol times the user's total power."""
    if support_tol < 0:
        raise ValueError(f"support_tol must be non-negative, got {support_tol}")
    p = as_allocation(profile)
    return p > support_tol * p.sum(axis=1, keepdims=True)


def profile_graph(
    profile: ProfileLike,
    support_tol: float = DEFAULT_SUPPORT_TOL,
    hubs: Sequence[int | None] | None = None,
) -> ProfileGraph:
    """Build the representing multigraph of a profile.

    The hub of each user defaults to its lowest-index supported node; an
    explicit hub must belong to the user's support.
    """
    support = support_mask(profile, support_tol)
    num_users, num_nodes = support.shape
    graph = ProfileGraph(num_nodes=num_nodes)

    for k in range(num_users):
        nodes = [int(a) for a in np.flatnonzero(support[k])]
        if not nodes:
            graph.hubs.append(None)
            continue
        hub = nodes[0] if hubs is None or hubs[k] is None else int(hubs[k])  # type: ignore[arg-type]
        if hub not in nodes:
            raise ValueError(f"hub {hub} of user {k} is not in its support {nodes}")
        graph.hubs.append(hub)
        graph.edges.extend(ProfileEdge(hub, a, k) for a in nodes if a != hub)
    return graph


def is_forest(graph: ProfileGraph) -> bool:
    """True iff the multigraph has no cycle (parallel edges form a cycle)."""
    components = UnionFind(graph.num_nodes)
    return all(components.union(e.source, e.target) for e in graph.edges)


def equilibrium_face_dim(profile: ProfileLike, support_tol: float = DEFAULT_SUPPORT_TOL) -> int:
    """Dimension of the smallest face of the strategy space holding the profile in its interior."""
    support = support_mask(profile, support_tol)
    sizes = support.sum(axis=1)
    return int(np.maximum(sizes - 1, 0).sum())


def forest_is_hub_invariant(
    profile: PowerProfile | np.ndarray,
    support_tol: float = DEFAULT_SUPPORT_TOL,
    max_graphs: int = 256,
) -> bool:
    """Check that every admissible hub choice gives the same forest verdict."""
    support = support_mask(profile, support_tol)
    choices = [list(np.flatnonzero(row)) or [None] for row in support]
    verdicts: set[bool] = set()
    for count, hubs in enumerate(np.ndindex(*[len(c) for c in choices])):
        if count >= max_graphs:
            break
        selected = [choices[k][i] for k, i in enumerate(hubs)]
        verdicts.add(is_forest(profile_graph(profile, support_tol, hubs=selected)))
    return len(verdicts) == 1
