"""Invariant suite - automated correctness verification for a game and its equilibrium."""

from __future__ import annotations
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from src.dynamics.lyapunov import growth_estimate_gap
from src.dynamics.replicator import stationary_residual
from src.equilibrium.graph import equilibrium_face_dim, is_forest, profile_graph
from src.equilibrium.models import DEFAULT_SUPPORT_TOL, EquilibriumReport
from src.equilibrium.solvers import solve_potential_min, solve_sequential_waterfilling
from src.equilibrium.waterfilling import kkt_residual, waterfilling_ratio_gap
from src.game.models import Game, PowerProfile
from src.game.payoffs import marginal_payoffs, potential, verify_exact_potential
from src.structure.conditions import check_conditions
from .exporter import read_game


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one named invariant."""
    name: str
    passed: bool
    message: str
    details: Sequence[str] = ()

    @property
    def mark(self) -> str:
        return "✓" if self.passed else "✗"

    def __str__(self) -> str:
        return f"{self.mark} {self.name}: {self.message}"

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "message": self.message, "details": list(self.details)}


@dataclass
class InvariantReport:
    """Check results of one game, grouped by section in the order they ran."""
    game_name: str
    game_hash: str | None = None
    sections: dict[str, list[CheckResult]] = field(default_factory=dict)

    def add(self, section: str, result: CheckResult) -> None:
        self.sections.setdefault(section, []).append(result)

    @property
    def results(self) -> list[CheckResult]:
        return [result for checks in self.sections.values() for result in checks]

    def get(self, name: str) -> CheckResult | None:
        return next((r for r in self.results if r.name == name), None)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    @property
    def tally(self) -> str:
        total = len(self.results)
        return f"{total - len(self.failures)}/{total} checks passed"

    def to_dict(self) -> dict[str, Any]:
        return {
            "game_name": self.game_name,
            "game_hash": self.game_hash,
            "passed": self.passed,
            "failed": [r.name for r in self.failures],
            "sections": {name: [r.to_dict() for r in checks] for name, checks in self.sections.items()},
        }

    def render(self, markdown: bool = False) -> str:
        """Console text, or markdown with one heading per section."""
        verdict = "PASSED" if self.passed else "FAILED"
        if markdown:
            lines = [f"# Invariant Report: {self.game_name}", ""]
            if self.game_hash:
                lines.append(f"Game hash `{self.game_hash}`")
            lines += [f"**{verdict}**, {self.tally}", ""]
        else:
            lines = [f"{self.game_name}: {verdict} ({self.tally})"]
        for section, checks in self.sections.items():
            lines += [f"## {section}", ""] if markdown else [f"[{section}]"]
            for r in checks:
                lines.append(f"- {r.mark} **{r.name}**: {r.message}" if markdown else f"  {r}")
                lines += [f"  - {d}" if markdown else f"      {d}" for d in r.details]
            if markdown:
                lines.append("")
        return "\n".join(lines).rstrip() + "\n"


class GameValidator:
    """Runs the numerical invariants of a game and one of its profiles."""

    def __init__(
        self,
        game: Game,
        name: str = "game",
        profile: PowerProfile | None = None,
        seed: int = 0,
        samples: int = 50,
        tol: float = 1e-12,
        support_tol: float = DEFAULT_SUPPORT_TOL,
    ):
        """Initialize validator.

        Args:
            game: Game under test.
            name: Name for the report.
            profile: Profile to audit; defaults to the computed equilibrium.
            seed: Seed for sampled profiles.
            samples: Number of random samples per sampled check.
            tol: Solver tolerance used for the reference equilibrium.
            support_tol: Relative support threshold.
        """
        self._game = game
        self._name = name
        self._seed = seed
        self._samples = samples
        self._tol = tol
        self._support_tol = support_tol
        self._equilibrium: EquilibriumReport | None = None
        self._profile = profile

    @classmethod
    def from_json_file(cls, path: str | Path, **kwargs: Any) -> GameValidator:
        """Load a game file and create a validator."""
        path = Path(path)
        return cls(read_game(path), name=path.stem, **kwargs)

    @property
    def equilibrium(self) -> EquilibriumReport:
        if self._equilibrium is None:
            self._equilibrium = solve_potential_min(self._game, tol=self._tol, support_tol=self._support_tol)
        return self._equilibrium

    @property
    def profile(self) -> PowerProfile:
        return self._profile if self._profile is not None else self.equilibrium.profile

    def _samples_iter(self, offset: int):
        rng = np.random.default_rng(self._seed + offset)
        for _ in range(self._samples):
            yield PowerProfile.random_interior(self._game, seed=int(rng.integers(2**32)))

    def sections(self) -> dict[str, tuple[Callable[[], CheckResult], ...]]:
        return {
            "Potential": (self._check_exact_potential, self._check_gradient, self._check_convexity),
            "Equilibrium": (
                self._check_kkt,
                self._check_cross_solver,
                self._check_forest,
                self._check_face_dimension,
                self._check_waterfilling,
            ),
            "Conditions and dynamics": (
                self._check_condition_consistency,
                self._check_growth_estimate,
                self._check_stationarity,
            ),
        }

    def validate_all(self) -> InvariantReport:
        """Run every check, section by section."""
        report = InvariantReport(self._name, self._game.content_hash())
        for section, checks in self.sections().items():
            for check in checks:
                report.add(section, check())
        return report

    def _check_exact_potential(self) -> CheckResult:
        holds, deviation = verify_exact_potential(self._game, self._samples, self._seed, tol=1e-8)
        return CheckResult(
            name="Exact Potential",
            passed=holds,
            message=f"max |du_k + dPhi| = {deviation:.3e}",
        )

    def _check_gradient(self) -> CheckResult:
        """Marginal payoffs against central differences of -Phi."""
        eps = 1e-6
        worst = 0.0
        details = []
        for p in self._samples_iter(1):
            v = marginal_payoffs(self._game, p)
            base = np.array(p.allocation)
            for k, alpha in zip(*np.nonzero(self._game.access)):
                up, down = np.array(base), np.array(base)
                up[k, alpha] += eps
                down[k, alpha] -= eps
                fd = -(potential(self._game, up) - potential(self._game, down)) / (2 * eps)
                rel = abs(fd - v[k, alpha]) / abs(v[k, alpha])
                if rel > worst:
                    worst = rel
        if worst > 1e-5:
            details.append(f"worst relative error {worst:.3e}")
        return CheckResult(
            name="Gradient",
            passed=worst <= 1e-5,
            message=f"max relative error {worst:.3e}",
            details=details,
        )

    def _check_convexity(self) -> CheckResult:
        rng = np.random.default_rng(self._seed + 2)
        violations = []
        profiles = list(self._samples_iter(2))
        for first, second in zip(profiles[::2], profiles[1::2]):
            lam = float(rng.uniform())
            mix = lam * first.allocation + (1 - lam) * second.allocation
            lhs = potential(self._game, mix)
            rhs = lam * potential(self._game, first) + (1 - lam) * potential(self._game, second)
            if lhs > rhs + 1e-12:
                violations.append(f"lambda={lam:.3f}: {lhs:.15g} > {rhs:.15g}")
        return CheckResult(
            name="Convexity",
            passed=not violations,
            message="potential convex along sampled segments" if not violations else f"{len(violations)} violations",
            details=violations,
        )

    def _check_kkt(self) -> CheckResult:
        residual = kkt_residual(self._game, self.profile)
        passed = residual <= max(self._tol, 1e-10)
        return CheckResult(
            name="KKT Residual",
            passed=passed,
            message=f"residual {residual:.3e}",
            details=[] if passed else ["profile is not an equilibrium"],
        )

    def _check_cross_solver(self) -> CheckResult:
        swf = solve_sequential_waterfilling(self._game, tol=self._tol, support_tol=self._support_tol)
        distance = float(np.max(np.abs(swf.allocation - self.equilibrium.allocation)))
        phi_gap = abs(swf.potential_value - self.equilibrium.potential_value)
        passed = distance <= 1e-6 or phi_gap <= 1e-8
        return CheckResult(
            name="Cross Solver",
            passed=passed,
            message=f"max-norm distance {distance:.3e}, potential gap {phi_gap:.3e}",
        )

    def _check_forest(self) -> CheckResult:
        graph = profile_graph(self.profile, self._support_tol)
        forest = is_forest(graph)
        return CheckResult(
            name="Forest",
            passed=forest,
            message=f"{graph.num_edges} edges on {graph.num_nodes} nodes",
            details=[] if forest else [f"edges: {[e.to_tuple() for e in graph.edges]}"],
        )

    def _check_face_dimension(self) -> CheckResult:
        dim = equilibrium_face_dim(self.profile, self._support_tol)
        bound = self._game.num_nodes - 1
        return CheckResult(
            name="Face Dimension",
            passed=dim <= bound,
            message=f"face dimension {dim} (bound {bound})",
        )

    def _check_waterfilling(self) -> CheckResult:
        gap = waterfilling_ratio_gap(self._game, self.profile, self._support_tol)
        return CheckResult(
            name="Waterfilling Ratios",
            passed=gap <= 1e-6,
            message=f"max ratio gap {gap:.3e}",
        )

    def _check_condition_consistency(self) -> CheckResult:
        """The trace bound never exceeds the spectral radius; K >= 2 games fail every condition."""
        conditions = check_conditions(self._game)
        details = []
        if conditions.spectral_lower_bound > conditions.rho_smax + 1e-9:
            details.append(
                f"bound {conditions.spectral_lower_bound:.6g} exceeds rho {conditions.rho_smax:.6g}"
            )
        if self._game.num_users >= 2 and self._game.has_full_access and conditions.any_condition_holds:
            details.append("a sufficient condition holds for a multi-user game")
        return CheckResult(
            name="Conditions",
            passed=not details,
            message=conditions.summary(),
            details=details,
        )

    def _check_growth_estimate(self) -> CheckResult:
        q = self.equilibrium.profile
        worst = min(growth_estimate_gap(self._game, q, p) for p in self._samples_iter(3))
        return CheckResult(
            name="Growth Estimate",
            passed=worst >= -1e-10,
            message=f"min L_q(p) - (Phi(p) - Phi(q)) = {worst:.3e}",
        )

    def _check_stationarity(self) -> CheckResult:
        residual = stationary_residual(self._game, self.equilibrium.profile)
        return CheckResult(
            name="Replicator Rest Point",
            passed=residual <= 1e-8,
            message=f"max |field| at equilibrium {residual:.3e}",
        )


def validate_game(game: Game, name: str = "game", **kwargs: Any) -> InvariantReport:
    """Convenience function to run the invariant suite on a game."""
    return GameValidator(game, name=name, **kwargs).validate_all()
