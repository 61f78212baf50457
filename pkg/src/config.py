"""Scenario configuration shared by the command-line tools."""

from __future__ import annotations
from pathlib import Path
from typing import Any, Literal
import json

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, model_validator

from src.game.generators import random_collinear_game, random_game
from src.game.models import Game, PowerProfile
from src.report.exporter import read_game

DEFAULT_SIZE = 2


class RandomGameSpec(BaseModel):
    """Random game of a given size.

    Unset sizes build a DEFAULT_SIZE game; a batch draws them per instance instead.
    """
    model_config = ConfigDict(extra="forbid")

    users: PositiveInt | None = None
    nodes: PositiveInt | None = None
    seed: int | None = None
    distribution: Literal["exponential", "log_uniform"] = "exponential"
    collinear_factor: PositiveFloat | None = None

    def build(self) -> Game:
        users = self.users or DEFAULT_SIZE
        nodes = self.nodes or DEFAULT_SIZE
        if self.collinear_factor is not None:
            return random_collinear_game(users, nodes, self.seed, self.collinear_factor, self.distribution)
        return random_game(users, nodes, self.seed, self.distribution)


class GameSource(BaseModel):
    """Exactly one of an inline document, a file path or a random spec."""
    model_config = ConfigDict(extra="forbid")

    inline: dict[str, Any] | None = None
    path: Path | None = None
    random: RandomGameSpec | None = None

    @model_validator(mode="after")
    def _exactly_one(self) -> GameSource:
        given = [name for name in ("inline", "path", "random") if getattr(self, name) is not None]
        if len(given) != 1:
            raise ValueError(f"exactly one game source is required, got {given or 'none'}")
        return self

    def load(self) -> Game:
        if self.inline is not None:
            return Game.from_dict(self.inline)
        if self.path is not None:
            return read_game(self.path)
        assert self.random is not None
        return self.random.build()


class SolverSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    solver: Literal["pgd", "swf"] = "pgd"
    tol: PositiveFloat = 1e-12
    max_iters: PositiveInt = 20000
    support_tol: float = Field(1e-6, ge=0)
    starts: PositiveInt = 10


class DynamicsSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    step: PositiveFloat = 0.05
    horizon: PositiveFloat = 1000.0
    residual_tol: PositiveFloat = 1e-6
    max_step: PositiveFloat | None = None
    stride: PositiveInt = 1
    init: Literal["uniform", "random", "vertex", "file"] = "uniform"
    init_seed: int | None = None
    vertex: list[int] | None = None
    init_path: Path | None = None

    @model_validator(mode="after")
    def _init_complete(self) -> DynamicsSettings:
        if self.init == "vertex" and not self.vertex:
            raise ValueError("vertex init needs one node index per user")
        if self.init == "file" and self.init_path is None:
            raise ValueError("file init needs init_path")
        return self

    def build_init(self, game: Game) -> PowerProfile:
        """Initial profile for a game.

        A file holds either a bare K×A matrix or a document with a
        "profile" or "allocation" entry (solver reports qualify).
        """
        if self.init == "uniform":
            return PowerProfile.uniform(game)
        if self.init == "random":
            return PowerProfile.random_interior(game, seed=self.init_seed)
        if self.init == "vertex":
            return PowerProfile.vertex(game, self.vertex or [])
        assert self.init_path is not None
        data = json.loads(Path(self.init_path).read_text(encoding="utf-8"))
        if isinstance(data, dict):
            data = data.get("profile", data.get("allocation"))
        return PowerProfile.for_game(game, data, init="file")


class OutputSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    out: Path | None = None
    sidecar: bool = True


class ScenarioConfig(BaseModel):
    """Everything a command needs: game source, solver, dynamics, outputs and batch size."""
    model_config = ConfigDict(extra="forbid")

    game: GameSource = Field(default_factory=lambda: GameSource(random=RandomGameSpec()))
    solver: SolverSettings = Field(default_factory=SolverSettings)
    dynamics: DynamicsSettings = Field(default_factory=DynamicsSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    count: PositiveInt = 200

    @classmethod
    def from_file(cls, path: str | Path) -> ScenarioConfig:
        """Load a JSON scenario document."""
        return cls.model_validate_json(Path(path).read_text(encoding="utf-8"))

    def with_overrides(self, overrides: dict[str, Any]) -> ScenarioConfig:
        """Return a new config with nested overrides applied; None values are ignored.

        A game override naming a different source replaces the current one.
        """
        data = self.model_dump()
        game = {key: value for key, value in overrides.get("game", {}).items() if value is not None}
        rest = {key: value for key, value in overrides.items() if key != "game"}
        merged = _merge(data, rest)
        if game:
            current = {key: value for key, value in data["game"].items() if value is not None}
            if set(game) == set(current):
                merged["game"] = _merge(current, game)
            else:
                merged["game"] = game
        return ScenarioConfig.model_validate(merged)

    def load_game(self) -> Game:
        return self.game.load()


def _merge(base: dict[str, Any], overrides: dict[str, Any]) -> dict[str, Any]:
    result = dict(base)
    for key, value in overrides.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(result.get(key), dict):
            result[key] = _merge(result[key], value)
        else:
            result[key] = value
    return result
