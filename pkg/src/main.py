"""CLI entry point for the power-allocation game engine."""

from __future__ import annotations
from pathlib import Path
from typing import Any
import argparse
import json
import logging
import sys

from pydantic import ValidationError

from .config import RandomGameSpec, ScenarioConfig
from .dynamics.replicator import simulate
from .equilibrium.graph import profile_graph
from .equilibrium.solvers import solve
from .game.models import GameError
from .report.batch import BatchSpec, run_batch, spec_dict, write_batch
from .report.exporter import ReportExporter, write_text
from .report.validator import GameValidator
from .structure.conditions import check_conditions

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_NOT_CONVERGED = 3
EXIT_IO = 4

COMMANDS = ("generate", "solve", "check", "simulate", "verify", "batch")


def positive_int(raw: str) -> int:
    try:
        value = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {raw!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def positive_float(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {raw!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {raw}")
    return value


def collinear_factor(raw: str) -> float:
    """Positive factor, written bare (`2.0`) or as `c=2.0`."""
    return positive_float(raw[2:] if raw.startswith("c=") else raw)


def vertex_assignment(raw: str) -> list[int]:
    """Comma-separated node index per user, e.g. `0,1,1`."""
    try:
        nodes = [int(part) for part in raw.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad vertex assignment: {raw!r}") from None
    if not nodes:
        raise argparse.ArgumentTypeError("vertex assignment is empty")
    return nodes


def build_parser() -> argparse.ArgumentParser:
    """Parser with one sub-command per operation; every sub-command takes the shared options."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", type=str, help="JSON scenario file")
    common.add_argument("--game", "-g", type=str, help="Game JSON file (overrides the scenario's game)")
    common.add_argument("--users", "-K", type=positive_int, help="Number of users of a random game")
    common.add_argument("--nodes", "-A", type=positive_int, help="Number of access nodes of a random game")
    common.add_argument("--seed", type=int, help="Seed for random games and random starts")
    common.add_argument(
        "--collinear",
        type=collinear_factor,
        nargs="?",
        const=2.0,
        metavar="[c=]FACTOR",
        help="Generate collinear gain rows scaled by powers of this factor (default 2)",
    )
    common.add_argument("--solver", choices=["pgd", "swf"], help="Equilibrium solver")
    common.add_argument("--tol", type=positive_float, help="Solver tolerance on the KKT residual")
    common.add_argument("--max-iters", type=positive_int, help="Solver iteration cap")
    common.add_argument("--starts", type=positive_int, help="Random starts per batch instance")
    common.add_argument("--step", type=positive_float, help="Initial RK4 step")
    common.add_argument("--horizon", type=positive_float, help="Integration horizon")
    common.add_argument("--max-step", type=positive_float, help="Largest step the integrator may grow to")
    common.add_argument("--stride", type=positive_int, help="Store every n-th accepted step")
    common.add_argument(
        "--init",
        type=str,
        help="Initial profile: uniform, random, vertex, vertex:i,j,..., file, or a JSON file path",
    )
    common.add_argument("--vertex", type=vertex_assignment, help="Node per user for --init vertex, e.g. 0,1")
    common.add_argument("--init-file", type=str, help="Profile JSON for --init file")
    common.add_argument("--count", type=positive_int, help="Number of batch instances")
    common.add_argument("--out", "-o", type=str, help="Output file path")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable debug logging")

    parser = argparse.ArgumentParser(
        prog="macgame",
        description="Equilibria, structure and replicator dynamics of parallel multiple-access power games",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("generate", parents=[common], help="Write a random game document")
    solve_parser = sub.add_parser("solve", parents=[common], help="Compute an equilibrium")
    solve_parser.add_argument("--graph", type=str, help="Also write the equilibrium graph as GraphML")
    sub.add_parser("check", parents=[common], help="Evaluate the uniqueness conditions")
    sim_parser = sub.add_parser("simulate", parents=[common], help="Integrate the replicator dynamics")
    sim_parser.add_argument("--no-sidecar", action="store_true", help="Skip the JSON metadata file")
    verify_parser = sub.add_parser("verify", parents=[common], help="Run the invariant suite")
    verify_parser.add_argument("--profile", type=str, help="Audit this profile instead of the computed equilibrium")
    sub.add_parser("batch", parents=[common], help="Run a batch of random instances")
    return parser


def _init_override(args: argparse.Namespace) -> dict[str, Any]:
    """--init and its --vertex / --init-file companions as dynamics overrides."""
    override: dict[str, Any] = {"vertex": args.vertex, "init_path": args.init_file}
    raw = args.init
    if raw is None:
        if args.vertex is not None:
            override["init"] = "vertex"
        elif args.init_file is not None:
            override["init"] = "file"
    elif raw in ("uniform", "random", "vertex", "file"):
        override["init"] = raw
    elif raw.startswith("vertex:"):
        override.update(init="vertex", vertex=vertex_assignment(raw[len("vertex:"):]))
    else:
        override.update(init="file", init_path=raw)
    return override


def load_config(args: argparse.Namespace) -> ScenarioConfig:
    """Scenario file (or defaults) with the command-line flags applied on top."""
    config = ScenarioConfig.from_file(args.config) if args.config else ScenarioConfig()

    game: dict[str, Any] = {}
    if args.game:
        game = {"path": args.game}
    else:
        random_flags = {
            "users": args.users,
            "nodes": args.nodes,
            "seed": args.seed,
            "collinear_factor": args.collinear,
        }
        random_flags = {k: v for k, v in random_flags.items() if v is not None}
        if random_flags and (config.game.random is not None or set(random_flags) - {"seed"}):
            game = {"random": random_flags}

    overrides: dict[str, Any] = {
        "game": game,
        "solver": {
            "solver": args.solver,
            "tol": args.tol,
            "max_iters": args.max_iters,
            "starts": args.starts,
        },
        "dynamics": {
            "step": args.step,
            "horizon": args.horizon,
            "stride": args.stride,
            "init_seed": args.seed,
            "max_step": args.max_step,
            **_init_override(args),
        },
        "output": {
            "out": args.out,
            "sidecar": False if getattr(args, "no_sidecar", False) else None,
        },
        "count": args.count,
    }
    return config.with_overrides(overrides)


def _out_path(config: ScenarioConfig, default: str) -> Path:
    return Path(config.output.out) if config.output.out is not None else Path(default)


def cmd_generate(config: ScenarioConfig, args: argparse.Namespace) -> int:
    game = config.load_game()
    path = ReportExporter().write_game(game, _out_path(config, "game.json"))
    print(f"Game (K={game.num_users}, A={game.num_nodes}, seed={game.seed}) written to: {path}")
    return EXIT_OK


def cmd_solve(config: ScenarioConfig, args: argparse.Namespace) -> int:
    game = config.load_game()
    explicit_init = args.init or args.vertex or args.init_file
    init = config.dynamics.build_init(game) if explicit_init else None
    settings = config.solver
    report = solve(
        game,
        settings.solver,
        init=init,
        tol=settings.tol,
        max_iters=settings.max_iters,
        support_tol=settings.support_tol,
    )
    print(report.summary())
    exporter = ReportExporter()
    if config.output.out is not None:
        exporter.to_json(report, config.output.out)
        print(f"Report written to: {config.output.out}")
    if args.graph:
        exporter.to_graphml(profile_graph(report.profile, settings.support_tol), args.graph)
        print(f"Equilibrium graph written to: {args.graph}")
    return EXIT_OK if report.converged else EXIT_NOT_CONVERGED


def cmd_check(config: ScenarioConfig, args: argparse.Namespace) -> int:
    game = config.load_game()
    report = check_conditions(game)
    print(report.summary())
    if not report.bound_applicable:
        print("Trace bound not applicable (rank-deficient S_max)")
    if config.output.out is not None:
        ReportExporter().to_json(report, config.output.out)
        print(f"Condition report written to: {config.output.out}")
    return EXIT_OK


def cmd_simulate(config: ScenarioConfig, args: argparse.Namespace) -> int:
    game = config.load_game()
    dynamics = config.dynamics
    trajectory = simulate(
        game,
        dynamics.build_init(game),
        step=dynamics.step,
        horizon=dynamics.horizon,
        residual_tol=dynamics.residual_tol,
        stride=dynamics.stride,
        max_step=dynamics.max_step,
        solver_tol=config.solver.tol,
    )
    exporter = ReportExporter()
    path = exporter.write_trajectory(trajectory, _out_path(config, "trajectory.csv"))
    if config.output.sidecar:
        exporter.write_sidecar(trajectory, path.with_suffix(".json"), game, init=dynamics.init)
    print(
        f"{len(trajectory)} samples to t={trajectory.final_time:.6g} "
        f"({trajectory.terminated_reason.value}), residual {trajectory.final_residual:.3e}"
    )
    print(f"Trajectory written to: {path}")
    return EXIT_OK if trajectory.converged else EXIT_NOT_CONVERGED


def cmd_verify(config: ScenarioConfig, args: argparse.Namespace) -> int:
    game = config.load_game()
    profile = None
    if args.profile:
        # reuse the file-init reader so reports and bare matrices both work
        profile = config.dynamics.model_copy(
            update={"init": "file", "init_path": Path(args.profile)}
        ).build_init(game)
    name = Path(config.game.path).stem if config.game.path is not None else "game"
    validator = GameValidator(
        game,
        name=name,
        profile=profile,
        seed=args.seed or 0,
        tol=config.solver.tol,
        support_tol=config.solver.support_tol,
    )
    report = validator.validate_all()
    print(report.render(), end="")
    if config.output.out is not None:
        out = Path(config.output.out)
        if out.suffix == ".json":
            write_text(out, json.dumps(report.to_dict(), indent=2) + "\n")
        else:
            write_text(out, report.render(markdown=True))
        print(f"Invariant report written to: {out}")
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_batch(config: ScenarioConfig, args: argparse.Namespace) -> int:
    # flags were merged into the random spec by load_config; unset sizes are drawn per instance
    random_spec = config.game.random or RandomGameSpec()
    spec = BatchSpec(
        count=config.count,
        seed=next((s for s in (args.seed, random_spec.seed) if s is not None), 0),
        users=random_spec.users,
        nodes=random_spec.nodes,
        gain_distribution=random_spec.distribution,
        starts=config.solver.starts,
        tol=config.solver.tol,
        max_iters=config.solver.max_iters,
        support_tol=config.solver.support_tol,
    )
    summary = run_batch(spec)
    path = write_batch(summary, _out_path(config, "batch.csv"))
    rates = summary.to_dict()
    write_text(
        path.with_suffix(".json"),
        json.dumps({"spec": spec_dict(spec), "summary": rates}, indent=2) + "\n",
    )
    for key, value in rates.items():
        print(f"{key}: {value}")
    print(f"Batch table written to: {path}")
    return EXIT_OK


HANDLERS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "check": cmd_check,
    "simulate": cmd_simulate,
    "verify": cmd_verify,
    "batch": cmd_batch,
}


def main(argv: list[str] | None = None) -> int:
    """Main CLI entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )

    try:
        config = load_config(args)
        return HANDLERS[args.command](config, args)
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO
    except json.JSONDecodeError as e:
        print(f"Error: could not parse JSON: {e}", file=sys.stderr)
        return EXIT_IO
    except (ValidationError, GameError, argparse.ArgumentTypeError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        if args.verbose:
            import traceback
            traceback.print_exc()
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
