"""Reading and writing games, reports, trajectories and batch tables."""

from __future__ import annotations
from pathlib import Path
from typing import Any, Iterable, Sequence
import csv
import json

import networkx as nx

from src.dynamics.models import Trajectory
from src.equilibrium.models import ProfileGraph
from src.game.models import Game


def read_game(path: str | Path) -> Game:
    """Load and validate a Game document.

    Raises:
        OSError: if the file cannot be read.
        GameError: if the document is not a valid game.
    """
    text = Path(path).read_text(encoding="utf-8")
    return Game.from_json(text)


def write_text(path: str | Path, text: str) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path


class ReportExporter:
    """Export domain objects to JSON, CSV and GraphML files."""

    def __init__(self, indent: int = 2):
        """Initialize exporter.

        Args:
            indent: JSON indentation level.
        """
        self._indent = indent

    def to_json(self, obj: Any, path: str | Path | None = None) -> str:
        """Serialize anything with a to_dict() (or a plain dict) to JSON.

        Args:
            obj: Game, report or dictionary.
            path: Optional file path to write to.

        Returns:
            JSON string representation.
        """
        data = obj.to_dict() if hasattr(obj, "to_dict") else obj
        json_str = json.dumps(data, indent=self._indent)
        if path:
            write_text(path, json_str + "\n")
        return json_str

    def write_game(self, game: Game, path: str | Path) -> Path:
        return write_text(path, game.to_json(indent=self._indent) + "\n")

    def write_trajectory(self, trajectory: Trajectory, path: str | Path) -> Path:
        """Write one CSV row per stored sample."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(trajectory.header())
            writer.writerows(trajectory.rows())
        return path

    def write_sidecar(
        self,
        trajectory: Trajectory,
        path: str | Path,
        game: Game,
        **extra: Any,
    ) -> Path:
        """Write the trajectory metadata document next to its CSV."""
        data = {
            "game_hash": game.content_hash(),
            "seed": game.seed,
            **trajectory.summary_dict(),
            **extra,
        }
        return write_text(path, json.dumps(data, indent=self._indent) + "\n")

    def to_graphml(self, graph: ProfileGraph, path: str | Path) -> None:
        """Export a profile graph to GraphML.

        Args:
            graph: Profile graph to export.
            path: File path to write to.
        """
        nx.write_graphml(graph.to_networkx(), str(path))

    def write_table(
        self,
        rows: Iterable[Sequence[Any]],
        header: Sequence[str],
        path: str | Path,
    ) -> Path:
        """Write a CSV table; floats use 17 significant digits."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_cell(cell) for cell in row])
        return path


def format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)
