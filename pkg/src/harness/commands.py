"""
CLI commands
Each command turns a RunConfig into a report body, an exit code and an optional CSV projection
"""

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..config import ENTANGLEMENT_VISIBILITY, settings
from ..correlations import (
    BinaryCorrelation,
    PresetLibrary,
    SettingsPreset,
    deterministic_correlation,
    fully_random_correlation,
    load_correlation,
    pr_box_correlation,
    werner_correlation,
)
from ..errors import InvalidArgumentError
from ..geometry import fibonacci_grid, random_unit_vectors
from ..leggett import build_werner_model, necessary_condition_slack, threshold_scan
from ..solvers import (
    FeasibilityStatus,
    FeasibilityVerdict,
    GridMode,
    HiddenVariableGrid,
    build_grid,
    classify,
    extremal_marginal_shortcut,
    leggett_feasibility,
    require_valid,
)
from .config import RunConfig

logger = structlog.get_logger(__name__)


class ExitCode(IntEnum):
    OK = 0
    INFEASIBLE = 1
    UNDETERMINED = 2
    USAGE = 3
    IO_ERROR = 4
    INVALID_CORRELATION = 5
    INVALID_ARGUMENT = 6
    OUT_OF_REGIME = 7


@dataclass
class CommandResult:
    body: Dict[str, Any]
    exit_code: ExitCode
    csv_header: Optional[Sequence[str]] = None
    csv_rows: List[Sequence[Any]] = field(default_factory=list)


def exit_code_for(verdict: FeasibilityVerdict) -> ExitCode:
    if verdict.status == FeasibilityStatus.FEASIBLE:
        return ExitCode.OK
    if verdict.status.infeasible:
        return ExitCode.INFEASIBLE
    return ExitCode.UNDETERMINED


def _hidden_grid(
    config: RunConfig, default_mode: GridMode, default_n: int, preset: Optional[SettingsPreset] = None
) -> HiddenVariableGrid:
    extras = tuple(zip(preset.hidden_u, preset.hidden_v)) if preset else ()
    return build_grid(config.grid_mode or default_mode, config.grid_n or default_n, extras)


def cmd_verify_werner(config: RunConfig) -> CommandResult:
    """Quadrature reproduction of -V a.b by the explicit model on seeded random settings"""
    if config.V is None:
        raise InvalidArgumentError("verify-werner needs --V")
    if config.n < 1000:
        raise InvalidArgumentError(f"verify-werner needs n >= 1000, got {config.n}")

    scheme = fibonacci_grid(config.n)
    model = build_werner_model(config.V, scheme)
    vectors = random_unit_vectors(2 * config.trials, config.seed)
    alice, bob = vectors[:config.trials], vectors[config.trials:]
    tol = settings.tolerances

    rows = []
    max_marginal = max_correlator = 0.0
    violations = 0
    for trial, (a, b) in enumerate(zip(alice, bob)):
        ma, mb, c = model.component_values(a, b)
        lower = -1.0 + np.abs(ma + mb)
        upper = 1.0 - np.abs(ma - mb)
        violations += int(np.count_nonzero(np.maximum(lower - c, c - upper) > tol.positivity))

        weights = model.weights
        marginal_a = math.fsum((weights * ma).tolist())
        marginal_b = math.fsum((weights * mb).tolist())
        correlator = math.fsum((weights * c).tolist())
        overlap = float(np.clip(a @ b, -1.0, 1.0))
        target = -config.V * overlap
        max_marginal = max(max_marginal, abs(marginal_a), abs(marginal_b))
        max_correlator = max(max_correlator, abs(correlator - target))
        rows.append((trial, overlap, marginal_a, marginal_b, correlator, target, abs(correlator - target)))

    passed = violations == 0 and max(max_marginal, max_correlator) <= scheme.accuracy
    logger.info("Werner model verified", V=config.V, n=config.n, passed=passed,
                max_marginal=max_marginal, max_correlator=max_correlator, violations=violations)
    body = {
        "V": config.V,
        "n": config.n,
        "trials": config.trials,
        "scheme": scheme.name,
        "declared_accuracy": scheme.accuracy,
        "max_marginal_deviation": max_marginal,
        "max_correlator_deviation": max_correlator,
        "component_violations": violations,
        "passed": passed,
    }
    return CommandResult(
        body=body,
        exit_code=ExitCode.OK if passed else ExitCode.INFEASIBLE,
        csv_header=("trial", "a_dot_b", "marginal_a", "marginal_b", "correlator", "target", "deviation"),
        csv_rows=rows,
    )


def cmd_threshold_scan(config: RunConfig) -> CommandResult:
    """Largest V satisfying the necessary condition, against (1 + 1/sqrt(2)) / 2"""
    scan = threshold_scan(config.resolution)
    matches = abs(scan.deviation) <= 1e-6
    body = {
        **scan.to_dict(),
        "matches_closed_form": matches,
        "entanglement_window": {
            "lower": ENTANGLEMENT_VISIBILITY,
            "upper": scan.visibility,
            "non_empty": scan.visibility > ENTANGLEMENT_VISIBILITY,
        },
    }
    t = np.linspace(-1.0, 1.0, 1001)
    lower, upper = necessary_condition_slack(t, scan.visibility)
    return CommandResult(
        body=body,
        exit_code=ExitCode.OK if matches else ExitCode.INFEASIBLE,
        csv_header=("t", "lower_slack", "upper_slack"),
        csv_rows=list(zip(t.tolist(), lower.tolist(), upper.tolist())),
    )


@dataclass
class Example:
    name: str
    description: str
    preset: str
    build: Callable[[SettingsPreset], BinaryCorrelation]
    expected: Tuple[FeasibilityStatus, FeasibilityStatus]
    grid_mode: GridMode = GridMode.ANTIPODAL
    grid_n: Optional[int] = None


def classification_examples(config: RunConfig) -> List[Example]:
    feasible, infeasible = FeasibilityStatus.FEASIBLE, FeasibilityStatus.INFEASIBLE
    examples = [
        Example(
            name="fully_random",
            description="Uniformly random outcomes",
            preset="generic",
            build=lambda p: fully_random_correlation(p.grid),
            expected=(feasible, feasible),
            grid_mode=GridMode.PRODUCT,
            grid_n=8,
        ),
        Example(
            name="singlet_restricted",
            description="Singlet correlations on CHSH-violating settings in one plane",
            preset=config.preset or "equatorial",
            build=lambda p: werner_correlation(1.0, p.grid),
            expected=(feasible, infeasible),
        ),
        Example(
            name="pr_box",
            description="PR-box on settings spanning the xy-plane",
            preset="pr_box",
            build=lambda p: pr_box_correlation(*p.alice, *p.bob),
            expected=(feasible, infeasible),
        ),
        Example(
            name="deterministic",
            description="Both parties always output +1; two distinct Alice settings",
            preset="deterministic",
            build=lambda p: deterministic_correlation(p.grid),
            expected=(FeasibilityStatus.INFEASIBLE_EXACT, feasible),
        ),
    ]
    if config.include_spread:
        examples.append(Example(
            name="werner_spread",
            description="Werner state V = 0.99 on ten well-spread settings per side",
            preset="spread",
            build=lambda p: werner_correlation(0.99, p.grid),
            expected=(FeasibilityStatus.INFEASIBLE_ON_GRID, infeasible),
        ))
    return examples


def _table_cell(verdict: FeasibilityVerdict, positive: str, negative: str) -> str:
    if verdict.status == FeasibilityStatus.FEASIBLE:
        return positive
    if verdict.status.infeasible:
        return negative
    return "undetermined"


def _example_grid(config: RunConfig, example: Example, preset: SettingsPreset) -> HiddenVariableGrid:
    """Hidden-variable grid of one example; --grid-n only resizes rows in the --grid-mode mode"""
    mode = GridMode(config.grid_mode or example.grid_mode)
    if mode == example.grid_mode and example.grid_n:
        n = example.grid_n
    else:
        n = settings.product_grid_n if mode == GridMode.PRODUCT else settings.antipodal_grid_n
    if config.grid_n and mode == GridMode(config.grid_mode or GridMode.ANTIPODAL):
        n = config.grid_n
    extras = tuple(zip(preset.hidden_u, preset.hidden_v))
    return build_grid(mode, n, extras)


def cmd_classify_examples(config: RunConfig) -> CommandResult:
    """Classify the reference examples and compare with the expected sign patterns"""
    library = PresetLibrary()
    rows = []
    table: Dict[str, Dict[str, List[str]]] = {}
    any_undetermined = any_mismatch = False

    for example in classification_examples(config):
        preset = library.get(example.preset)
        corr = example.build(preset)
        grid = _example_grid(config, example, preset)
        leggett, bell = classify(corr, grid)

        undetermined = FeasibilityStatus.UNDETERMINED in (leggett.status, bell.status)
        matches = (leggett.status, bell.status) == example.expected
        any_undetermined |= undetermined
        any_mismatch |= not matches

        leggett_cell = _table_cell(leggett, "leggett_compatible", "leggett_incompatible")
        bell_cell = _table_cell(bell, "bell_local", "bell_nonlocal")
        table.setdefault(leggett_cell, {}).setdefault(bell_cell, []).append(example.name)

        rows.append({
            "name": example.name,
            "description": example.description,
            "preset": preset.name,
            "duplicate_settings": corr.grid.duplicate_settings(),
            "expected": {"leggett": example.expected[0].value, "bell": example.expected[1].value},
            "leggett": leggett.to_dict(),
            "bell": bell.to_dict(),
            "matches": matches,
            "undetermined": undetermined,
        })
        logger.info("Example classified", example=example.name, leggett=leggett.status.value,
                    bell=bell.status.value, matches=matches)

    if any_undetermined:
        code = ExitCode.UNDETERMINED
    elif any_mismatch:
        code = ExitCode.INFEASIBLE
    else:
        code = ExitCode.OK
    return CommandResult(
        body={"examples": rows, "table": table, "all_match": not (any_mismatch or any_undetermined)},
        exit_code=code,
        csv_header=("example", "leggett", "bell", "matches"),
        csv_rows=[(r["name"], r["leggett"]["status"], r["bell"]["status"], r["matches"]) for r in rows],
    )


def cmd_feasibility(config: RunConfig) -> CommandResult:
    """Leggett membership of a correlation file: extremal shortcut first, then the LP"""
    if not config.input:
        raise InvalidArgumentError("feasibility needs --input")
    corr = load_correlation(config.input)
    require_valid(corr)

    verdict = extremal_marginal_shortcut(corr)
    if verdict is None:
        preset = PresetLibrary().get(config.preset) if config.preset else None
        grid = _hidden_grid(config, GridMode.ANTIPODAL, settings.antipodal_grid_n, preset)
        verdict = leggett_feasibility(corr, grid)

    body = {
        "input": config.input,
        "settings": {"alice": corr.shape[0], "bob": corr.shape[1]},
        "duplicate_settings": corr.grid.duplicate_settings(),
        "verdict": verdict.to_dict(),
    }
    return CommandResult(
        body=body,
        exit_code=exit_code_for(verdict),
        csv_header=("status", "margin", "iterations"),
        csv_rows=[(verdict.status.value, verdict.margin, verdict.iterations)],
    )


COMMANDS: Dict[str, Callable[[RunConfig], CommandResult]] = {
    "verify-werner": cmd_verify_werner,
    "threshold-scan": cmd_threshold_scan,
    "classify-examples": cmd_classify_examples,
    "feasibility": cmd_feasibility,
}


def run_command(config: RunConfig) -> CommandResult:
    return COMMANDS[config.command](config)
