"""Batch experiments over many random games."""

from __future__ import annotations
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any
import logging
import os

import numpy as np

from src.equilibrium.solvers import multistart
from src.game.generators import random_game
from src.structure.conditions import check_conditions
from .exporter import ReportExporter

logger = logging.getLogger(__name__)

THREADS_ENV = "MACGAME_THREADS"

BATCH_COLUMNS = [
    "seed",
    "K",
    "A",
    "rho_smax",
    "min_rho_s_alpha",
    "cmax",
    "c1",
    "c2",
    "ind",
    "constraint_rank",
    "spectral_lower_bound",
    "forest",
    "face_dim",
    "multistart_spread",
    "converged",
    "kkt_residual",
    "potential",
]


@dataclass(frozen=True)
class BatchSpec:
    """What to run for every instance of a batch.

    users/nodes fix the game size; when None each instance draws it
    uniformly from 1..max_users / 1..max_nodes.
    """
    count: int = 200
    seed: int = 0
    users: int | None = None
    nodes: int | None = None
    max_users: int = 4
    max_nodes: int = 4
    gain_distribution: str = "exponential"
    starts: int = 10
    tol: float = 1e-12
    max_iters: int = 20000
    support_tol: float = 1e-6


@dataclass(frozen=True)
class BatchRow:
    """Summary of one instance."""
    seed: int
    K: int
    A: int
    rho_smax: float
    min_rho_s_alpha: float
    cmax: bool
    c1: bool
    c2: bool
    ind: int
    constraint_rank: int
    spectral_lower_bound: float
    forest: bool
    face_dim: int
    multistart_spread: float
    converged: bool
    kkt_residual: float
    potential: float

    def to_row(self) -> list[Any]:
        return [getattr(self, column) for column in BATCH_COLUMNS]


@dataclass
class BatchSummary:
    """Aggregate rates over a batch."""
    rows: list[BatchRow]
    spread_tol: float = 1e-6

    @property
    def count(self) -> int:
        return len(self.rows)

    def _rate(self, flags: list[bool]) -> float:
        return sum(flags) / len(flags) if flags else 1.0

    @property
    def forest_rate(self) -> float:
        return self._rate([r.forest for r in self.rows])

    @property
    def face_bound_rate(self) -> float:
        return self._rate([r.face_dim <= r.A - 1 for r in self.rows])

    @property
    def uniqueness_rate(self) -> float:
        return self._rate([r.multistart_spread <= self.spread_tol for r in self.rows])

    @property
    def convergence_rate(self) -> float:
        return self._rate([r.converged for r in self.rows])

    @property
    def condition_failure_rate(self) -> float:
        multi = [r for r in self.rows if r.K >= 2]
        return self._rate([not (r.cmax or r.c1 or r.c2) for r in multi])

    @property
    def degeneracy_formula_rate(self) -> float:
        return self._rate([r.ind == max(0, r.K * r.A - r.K - r.A) for r in self.rows])

    def to_dict(self) -> dict[str, Any]:
        return {
            "count": self.count,
            "forest_rate": self.forest_rate,
            "face_bound_rate": self.face_bound_rate,
            "uniqueness_rate": self.uniqueness_rate,
            "convergence_rate": self.convergence_rate,
            "condition_failure_rate": self.condition_failure_rate,
            "degeneracy_formula_rate": self.degeneracy_formula_rate,
        }


def worker_count() -> int:
    """Worker processes allowed by MACGAME_THREADS (default: CPU count)."""
    raw = os.getenv(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return os.cpu_count() or 1
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning("Ignoring non-integer %s=%r", THREADS_ENV, raw)
        return os.cpu_count() or 1


def instance_seeds(spec: BatchSpec) -> list[int]:
    """Independent per-instance seeds spawned from the batch seed."""
    children = np.random.SeedSequence(spec.seed).spawn(spec.count)
    return [int(child.generate_state(1)[0]) for child in children]


def run_instance(seed: int, spec: BatchSpec) -> BatchRow:
    """Generate, solve from several starts and audit one random game."""
    rng = np.random.default_rng(seed)
    num_users = spec.users or int(rng.integers(1, spec.max_users + 1))
    num_nodes = spec.nodes or int(rng.integers(1, spec.max_nodes + 1))
    game = random_game(num_users, num_nodes, seed=seed, gain_distribution=spec.gain_distribution)

    reports, spread = multistart(
        game,
        starts=spec.starts,
        seed=seed,
        tol=spec.tol,
        max_iters=spec.max_iters,
        support_tol=spec.support_tol,
    )
    best = min(reports, key=lambda r: r.kkt_residual)
    conditions = check_conditions(game)
    return BatchRow(
        seed=seed,
        K=num_users,
        A=num_nodes,
        rho_smax=conditions.rho_smax,
        min_rho_s_alpha=conditions.min_rho_s_alpha,
        cmax=conditions.cmax_holds,
        c1=conditions.c1_holds,
        c2=conditions.c2_holds,
        ind=conditions.degeneracy_index,
        constraint_rank=conditions.constraint_rank,
        spectral_lower_bound=conditions.spectral_lower_bound,
        forest=all(r.is_forest for r in reports),
        face_dim=max(r.face_dim for r in reports),
        multistart_spread=spread,
        converged=all(r.converged for r in reports),
        kkt_residual=best.kkt_residual,
        potential=best.potential_value,
    )


def _run_one(args: tuple[int, BatchSpec]) -> BatchRow:
    return run_instance(*args)


def run_batch(spec: BatchSpec, workers: int | None = None) -> BatchSummary:
    """Run every instance of a batch, in a process pool unless one worker is allowed.

    Rows come back in seed order whatever the worker count.
    """
    seeds = instance_seeds(spec)
    workers = workers or worker_count()
    logger.info("Running %d instances on %d worker(s)", len(seeds), workers)
    if workers == 1:
        rows = [run_instance(s, spec) for s in seeds]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_one, [(s, spec) for s in seeds], chunksize=4))
    return BatchSummary(rows)


def write_batch(summary: BatchSummary, path: str | Path, exporter: ReportExporter | None = None) -> Path:
    exporter = exporter or ReportExporter()
    return exporter.write_table((row.to_row() for row in summary.rows), BATCH_COLUMNS, path)


def spec_dict(spec: BatchSpec) -> dict[str, Any]:
    return asdict(spec)
