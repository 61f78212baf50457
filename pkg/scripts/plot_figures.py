"""Render potential level sets with replicator orbits, and convergence curves.

Reads the outputs of ``macgame generate`` / ``macgame simulate``:

    python scripts/plot_figures.py levels game.json run1.csv run2.csv -o levels.png
    python scripts/plot_figures.py convergence run1.csv run2.csv -o convergence.png

Needs the ``plot`` extra (matplotlib).
"""

from __future__ import annotations
from pathlib import Path
from typing import Sequence
import argparse
import csv
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from src.game.models import Game  # noqa: E402
from src.game.payoffs import potential  # noqa: E402
from src.report.exporter import read_game  # noqa: E402

GOLDEN = (np.sqrt(5) - 1.0) / 2.0


def read_trajectory_csv(path: str | Path) -> dict[str, np.ndarray]:
    """Columns of a trajectory CSV as float arrays; unsupported or empty KL cells become NaN."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        columns: dict[str, list[float]] = {name: [] for name in reader.fieldnames or []}
        for row in reader:
            for name, cell in row.items():
                try:
                    columns[name].append(float(cell))
                except ValueError:
                    columns[name].append(float("nan"))
    return {name: np.asarray(values) for name, values in columns.items()}


def potential_grid(game: Game, resolution: int = 200) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Potential over the unit square of node-1 shares of a 2×2 game."""
    if game.shape != (2, 2):
        raise ValueError(f"level sets need a 2x2 game, got {game.shape}")
    shares = np.linspace(0.0, 1.0, resolution)
    x, y = np.meshgrid(shares, shares)
    values = np.empty_like(x)
    budgets = game.budgets
    for i in range(resolution):
        for j in range(resolution):
            p = np.array(
                [
                    [budgets[0] * x[i, j], budgets[0] * (1 - x[i, j])],
                    [budgets[1] * y[i, j], budgets[1] * (1 - y[i, j])],
                ]
            )
            values[i, j] = potential(game, p)
    return x, y, values


def _style(ax: plt.Axes) -> None:
    ax.spines["right"].set_visible(False)
    ax.spines["top"].set_visible(False)
    ax.xaxis.set_ticks_position("bottom")
    ax.yaxis.set_ticks_position("left")


def plot_level_sets(
    game: Game,
    trajectories: Sequence[dict[str, np.ndarray]],
    path: str | Path,
    resolution: int = 200,
    levels: int = 25,
) -> Path:
    """Contour plot of the potential with one orbit per trajectory."""
    x, y, values = potential_grid(game, resolution)
    fig, ax = plt.subplots(figsize=(5.0, 5.0))
    contour = ax.contour(x, y, values, levels=levels, cmap="viridis", linewidths=0.8)
    fig.colorbar(contour, ax=ax, label="potential")
    for data in trajectories:
        px = data["p_1_1"] / game.budgets[0]
        py = data["p_2_1"] / game.budgets[1]
        ax.plot(px, py, color="black", linewidth=1.0)
        ax.plot(px[0], py[0], "o", color="tab:blue", markersize=4)
        ax.plot(px[-1], py[-1], "*", color="tab:red", markersize=8)
    ax.set_xlabel("user 1 share on node 1")
    ax.set_ylabel("user 2 share on node 1")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.0)
    _style(ax)
    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def plot_convergence(trajectories: Sequence[dict[str, np.ndarray]], path: str | Path) -> Path:
    """KKT residual and KL divergence against time, log scale."""
    width = 8.0
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(width, width * GOLDEN))
    for i, data in enumerate(trajectories):
        label = f"run {i + 1}"
        top.semilogy(data["t"], np.maximum(data["kkt_residual"], 1e-300), label=label)
        kl = data.get("kl")
        if kl is not None and np.any(np.isfinite(kl)):
            bottom.semilogy(data["t"], np.maximum(kl, 1e-300), label=label)
    top.set_ylabel("KKT residual")
    bottom.set_ylabel("KL to reference")
    bottom.set_xlabel("t")
    for ax in (top, bottom):
        _style(ax)
    if trajectories:
        top.legend(frameon=False)
    path = Path(path)
    fig.savefig(path, bbox_inches="tight")
    plt.close(fig)
    return path


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="plot_figures", description="Render figures from macgame outputs")
    sub = parser.add_subparsers(dest="figure", required=True)
    levels = sub.add_parser("levels", help="Potential level sets with orbits (2x2 games)")
    levels.add_argument("game", help="Game JSON file")
    levels.add_argument("trajectories", nargs="*", help="Trajectory CSV files")
    levels.add_argument("--resolution", type=int, default=200)
    levels.add_argument("--out", "-o", default="levels.png")
    convergence = sub.add_parser("convergence", help="Residual and KL against time")
    convergence.add_argument("trajectories", nargs="+", help="Trajectory CSV files")
    convergence.add_argument("--out", "-o", default="convergence.png")
    args = parser.parse_args(argv)

    try:
        runs = [read_trajectory_csv(p) for p in args.trajectories]
        if args.figure == "levels":
            out = plot_level_sets(read_game(args.game), runs, args.out, resolution=args.resolution)
        else:
            out = plot_convergence(runs, args.out)
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 4
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2
    print(f"Figure written to: {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
