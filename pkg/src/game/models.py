"""Core data models for parallel multiple-access-channel power games."""

from __future__ import annotations
from dataclasses import dataclass, field
from typing import Any, Sequence
import hashlib
import json

import numpy as np


BUDGET_RTOL = 1e-9


class GameError(Exception):
    """Base class for invalid game or profile data."""
    pass


class GameDomainError(GameError, ValueError):
    """Raised when an entry lies outside its admissible domain."""

    def __init__(self, message: str, field: str | None = None, index: Any = None):
        super().__init__(message)
        self.field = field
        self.index = index


class GameShapeError(GameError, ValueError):
    """Raised when array dimensions are inconsistent."""
    pass


class GameIndexError(GameError, IndexError):
    """Raised when a user or node index is out of range."""
    pass


class ProfileError(GameDomainError):
    """Raised when a power profile violates the strategy-space constraints."""
    pass


def _frozen(values: Any, dtype: Any = float) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _check_positive(name: str, arr: np.ndarray) -> None:
    if not np.all(np.isfinite(arr)):
        bad = tuple(int(i) for i in np.argwhere(~np.isfinite(arr))[0])
        raise GameDomainError(f"{name}{list(bad)} is not finite", field=name, index=bad)
    if np.any(arr <= 0):
        bad = tuple(int(i) for i in np.argwhere(arr <= 0)[0])
        raise GameDomainError(
            f"{name}{list(bad)} = {arr[bad]!r} must be strictly positive",
            field=name,
            index=bad,
        )


@dataclass(frozen=True, eq=False)
class Game:
    """Immutable parallel-MAC game instance.

    Attributes:
        gains: K×A channel gains g[k, a] > 0.
        noise: length-A noise powers sigma²_a > 0.
        bandwidths: length-A bandwidths b_a > 0.
        budgets: length-K power budgets P_k > 0.
        access: K×A mask of the nodes each user can reach (all true by default).
        bandwidths_normalized: True when the bandwidths sum to one.
        seed: provenance seed for generated games.
        gain_distribution: provenance name of the gain law.
    """
    gains: np.ndarray
    noise: np.ndarray
    bandwidths: np.ndarray
    budgets: np.ndarray
    access: np.ndarray
    bandwidths_normalized: bool = False
    seed: int | None = None
    gain_distribution: str | None = None

    @property
    def num_users(self) -> int:
        return int(self.gains.shape[0])

    @property
    def num_nodes(self) -> int:
        return int(self.gains.shape[1])

    @property
    def shape(self) -> tuple[int, int]:
        return self.num_users, self.num_nodes

    @property
    def has_full_access(self) -> bool:
        return bool(np.all(self.access))

    def check_user(self, k: int) -> int:
        if not 0 <= k < self.num_users:
            raise GameIndexError(f"user index {k} out of range [0, {self.num_users})")
        return int(k)

    def check_node(self, alpha: int) -> int:
        if not 0 <= alpha < self.num_nodes:
            raise GameIndexError(f"node index {alpha} out of range [0, {self.num_nodes})")
        return int(alpha)

    def to_dict(self) -> dict[str, Any]:
        """Convert game to dictionary (gains row-major)."""
        data: dict[str, Any] = {
            "num_users": self.num_users,
            "num_nodes": self.num_nodes,
            "gains": self.gains.tolist(),
            "noise": self.noise.tolist(),
            "bandwidths": self.bandwidths.tolist(),
            "budgets": self.budgets.tolist(),
        }
        if not self.has_full_access:
            data["access"] = self.access.astype(int).tolist()
        if self.seed is not None:
            data["seed"] = self.seed
        if self.gain_distribution is not None:
            data["gain_distribution"] = self.gain_distribution
        return data

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Game:
        """Create and validate a game from a dictionary."""
        try:
            gains = data["gains"]
            noise = data["noise"]
            bandwidths = data["bandwidths"]
            budgets = data["budgets"]
        except KeyError as e:
            raise GameShapeError(f"game document is missing field {e.args[0]!r}") from None
        game = new_game(
            gains,
            noise,
            bandwidths,
            budgets,
            access=data.get("access"),
            seed=data.get("seed"),
            gain_distribution=data.get("gain_distribution"),
        )
        declared = (data.get("num_users"), data.get("num_nodes"))
        if declared != (None, None) and declared != game.shape:
            raise GameShapeError(
                f"declared shape {declared} does not match gains shape {game.shape}"
            )
        return game

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_json(cls, json_str: str) -> Game:
        return cls.from_dict(json.loads(json_str))

    def content_hash(self) -> str:
        """sha256 of the canonical JSON document (provenance fields excluded)."""
        payload = {
            k: v for k, v in self.to_dict().items() if k not in ("seed", "gain_distribution")
        }
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()

    def __repr__(self) -> str:
        return f"Game(K={self.num_users}, A={self.num_nodes}, hash={self.content_hash()[:12]})"


def new_game(
    gains: Sequence[Sequence[float]] | np.ndarray,
    noise: Sequence[float] | np.ndarray,
    bandwidths: Sequence[float] | np.ndarray,
    budgets: Sequence[float] | np.ndarray,
    access: Sequence[Sequence[bool]] | np.ndarray | None = None,
    normalize_bandwidths: bool = False,
    seed: int | None = None,
    gain_distribution: str | None = None,
) -> Game:
    """Validate model data and build an immutable Game.

    Raises:
        GameShapeError: on inconsistent dimensions.
        GameDomainError: on a non-positive or non-finite entry (field and index named).
    """
    try:
        g = np.array(gains, dtype=float)
        sigma2 = np.array(noise, dtype=float)
        b = np.array(bandwidths, dtype=float)
        p_max = np.array(budgets, dtype=float)
    except (TypeError, ValueError) as e:
        raise GameShapeError(f"game data is not rectangular numeric data: {e}") from None

    if g.ndim != 2 or g.size == 0:
        raise GameShapeError(f"gains must be a non-empty K×A matrix, got shape {g.shape}")
    num_users, num_nodes = g.shape
    for name, arr, expected in (
        ("noise", sigma2, num_nodes),
        ("bandwidths", b, num_nodes),
        ("budgets", p_max, num_users),
    ):
        if arr.shape != (expected,):
            raise GameShapeError(f"{name} must have length {expected}, got shape {arr.shape}")

    for name, arr in (("gains", g), ("noise", sigma2), ("bandwidths", b), ("budgets", p_max)):
        _check_positive(name, arr)

    if access is None:
        mask = np.ones((num_users, num_nodes), dtype=bool)
    else:
        mask = np.array(access, dtype=bool)
        if mask.shape != (num_users, num_nodes):
            raise GameShapeError(f"access must have shape {(num_users, num_nodes)}, got {mask.shape}")
        empty = np.flatnonzero(~mask.any(axis=1))
        if empty.size:
            raise GameDomainError(
                f"user {int(empty[0])} has no accessible node", field="access", index=(int(empty[0]),)
            )

    if normalize_bandwidths:
        b = b / b.sum()
    normalized = bool(np.isclose(b.sum(), 1.0, rtol=0.0, atol=1e-12))

    return Game(
        gains=_frozen(g),
        noise=_frozen(sigma2),
        bandwidths=_frozen(b),
        budgets=_frozen(p_max),
        access=_frozen(mask, dtype=bool),
        bandwidths_normalized=normalized,
        seed=seed,
        gain_distribution=gain_distribution,
    )


@dataclass(frozen=True, eq=False)
class PowerProfile:
    """One point of the product of scaled simplices."""
    allocation: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def for_game(cls, game: Game, allocation: Any, **metadata: Any) -> PowerProfile:
        """Validate an allocation against a game's budgets and access mask.

        Raises:
            ProfileError: if an entry is negative, a budget is not met within
                1e-9·P_k, or power is sent to an inaccessible node.
        """
        p = np.array(allocation, dtype=float)
        if p.shape != game.shape:
            raise GameShapeError(f"profile must have shape {game.shape}, got {p.shape}")
        if not np.all(np.isfinite(p)):
            raise ProfileError("profile contains non-finite entries", field="allocation")
        if np.any(p < 0):
            bad = tuple(int(i) for i in np.argwhere(p < 0)[0])
            raise ProfileError(f"negative power {p[bad]!r} at {list(bad)}", field="allocation", index=bad)
        if np.any(p[~game.access] != 0):
            bad = tuple(int(i) for i in np.argwhere((p != 0) & ~game.access)[0])
            raise ProfileError(f"power sent to inaccessible node at {list(bad)}", field="allocation", index=bad)
        totals = p.sum(axis=1)
        gap = np.abs(totals - game.budgets)
        if np.any(gap > BUDGET_RTOL * game.budgets):
            k = int(np.argmax(gap / game.budgets))
            raise ProfileError(
                f"user {k} allocates {totals[k]!r}, budget is {game.budgets[k]!r}",
                field="allocation",
                index=(k,),
            )
        return cls(_frozen(p), dict(metadata))

    @classmethod
    def uniform(cls, game: Game) -> PowerProfile:
        """Each user splits the budget evenly over its accessible nodes."""
        counts = game.access.sum(axis=1, keepdims=True)
        p = np.where(game.access, game.budgets[:, None] / counts, 0.0)
        return cls.for_game(game, p, init="uniform")

    @classmethod
    def vertex(cls, game: Game, assignment: Sequence[int]) -> PowerProfile:
        """Each user k puts the full budget on node assignment[k]."""
        if len(assignment) != game.num_users:
            raise GameShapeError(f"vertex needs {game.num_users} node indices, got {len(assignment)}")
        p = np.zeros(game.shape)
        for k, alpha in enumerate(assignment):
            p[k, game.check_node(int(alpha))] = game.budgets[k]
        return cls.for_game(game, p, init="vertex")

    @classmethod
    def random_interior(cls, game: Game, seed: int | None = None) -> PowerProfile:
        """Dirichlet(1, ..., 1) draw on every user's accessible nodes."""
        rng = np.random.default_rng(seed)
        p = np.zeros(game.shape)
        for k in range(game.num_users):
            nodes = np.flatnonzero(game.access[k])
            p[k, nodes] = rng.dirichlet(np.ones(nodes.size)) * game.budgets[k]
        p = p * (game.budgets / p.sum(axis=1))[:, None]
        return cls.for_game(game, p, init="random", seed=seed)

    @property
    def budgets(self) -> np.ndarray:
        return self.allocation.sum(axis=1)

    @property
    def shape(self) -> tuple[int, int]:
        return tuple(self.allocation.shape)  # type: ignore[return-value]

    def support(self, support_tol: float = 1e-6) -> np.ndarray:
        """Boolean K×A mask of entries above support_tol·P_k."""
        return self.allocation > support_tol * self.budgets[:, None]

    def to_dict(self) -> dict[str, Any]:
        return {"allocation": self.allocation.tolist(), "metadata": dict(self.metadata)}

    @classmethod
    def from_dict(cls, data: dict[str, Any], game: Game) -> PowerProfile:
        return cls.for_game(game, data["allocation"], **data.get("metadata", {}))


def as_allocation(profile: PowerProfile | np.ndarray | Sequence[Sequence[float]]) -> np.ndarray:
    """Return the K×A allocation array of a profile-like value."""
    if isinstance(profile, PowerProfile):
        return profile.allocation
    return np.asarray(profile, dtype=float)
