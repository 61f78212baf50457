"""Serialization, invariant suite and batch experiments."""

from .exporter import ReportExporter, format_cell, read_game, write_text
from .validator import CheckResult, GameValidator, InvariantReport, validate_game
from .batch import (
    BATCH_COLUMNS,
    THREADS_ENV,
    BatchRow,
    BatchSpec,
    BatchSummary,
    instance_seeds,
    run_batch,
    run_instance,
    worker_count,
    write_batch,
)

__all__ = [
    "ReportExporter",
    "format_cell",
    "read_game",
    "write_text",
    "GameValidator",
    "InvariantReport",
    "CheckResult",
    "validate_game",
    "BATCH_COLUMNS",
    "THREADS_ENV",
    "BatchRow",
    "BatchSpec",
    "BatchSummary",
    "instance_seeds",
    "run_batch",
    "run_instance",
    "worker_count",
    "write_batch",
]
