"""
Correlation Models
Bipartite binary-outcome correlations in the (M^A, M^B, C) parametrization
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np
import structlog

from ..config import settings
from ..errors import InvalidArgumentError, PositivityViolationError
from ..geometry import UnitVector3, angle_between, as_matrix

logger = structlog.get_logger(__name__)

OUTCOMES: Tuple[int, int] = (1, -1)


@dataclass(frozen=True)
class SettingsGrid:
    """Ordered measurement settings for Alice and Bob"""
    alice_settings: Tuple[UnitVector3, ...]
    bob_settings: Tuple[UnitVector3, ...]

    def __post_init__(self):
        object.__setattr__(self, "alice_settings", tuple(self.alice_settings))
        object.__setattr__(self, "bob_settings", tuple(self.bob_settings))
        if not self.alice_settings or not self.bob_settings:
            raise InvalidArgumentError("Both parties need at least one setting")
        for setting in self.alice_settings + self.bob_settings:
            if not isinstance(setting, UnitVector3):
                raise InvalidArgumentError(f"Settings must be UnitVector3, got {type(setting).__name__}")
        duplicates = self.duplicate_settings()
        if duplicates:
            logger.warning("Duplicate measurement settings", duplicates=duplicates)

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.alice_settings), len(self.bob_settings)

    @property
    def alice_matrix(self) -> np.ndarray:
        return as_matrix(self.alice_settings)

    @property
    def bob_matrix(self) -> np.ndarray:
        return as_matrix(self.bob_settings)

    def duplicate_settings(self) -> List[Dict[str, object]]:
        """Pairs of settings of one party closer than the distinct-angle tolerance"""
        found = []
        tol = settings.tolerances.distinct_angle
        for party, vectors in (("alice", self.alice_settings), ("bob", self.bob_settings)):
            for i in range(len(vectors)):
                for j in range(i + 1, len(vectors)):
                    if angle_between(vectors[i], vectors[j]) <= tol:
                        found.append({"party": party, "settings": [i, j]})
        return found

    def distinct_alice_count(self) -> int:
        tol = settings.tolerances.distinct_angle
        distinct: List[UnitVector3] = []
        for vector in self.alice_settings:
            if all(angle_between(vector, seen) > tol for seen in distinct):
                distinct.append(vector)
        return len(distinct)

    def restrict(self, alice: Sequence[int], bob: Sequence[int]) -> "SettingsGrid":
        return SettingsGrid(
            tuple(self.alice_settings[i] for i in alice),
            tuple(self.bob_settings[j] for j in bob),
        )


@dataclass(frozen=True)
class OutcomeDistribution:
    """P(alpha, beta) for one setting pair"""
    probabilities: Dict[Tuple[int, int], float]

    def __post_init__(self):
        if set(self.probabilities) != {(a, b) for a in OUTCOMES for b in OUTCOMES}:
            raise InvalidArgumentError("An outcome distribution needs all four (alpha, beta) entries")
        tol = settings.tolerances
        for outcome, p in self.probabilities.items():
            if p < -tol.normalization:
                raise PositivityViolationError(f"p{outcome} = {p} is negative", outcome, p)
        total = math.fsum(self.probabilities.values())
        if abs(total - 1.0) > tol.normalization:
            raise InvalidArgumentError(f"Probabilities sum to {total}, not 1")

    def __getitem__(self, outcome: Tuple[int, int]) -> float:
        return self.probabilities[outcome]

    @property
    def marginal_a(self) -> float:
        return math.fsum(a * p for (a, _), p in self.probabilities.items())

    @property
    def marginal_b(self) -> float:
        return math.fsum(b * p for (_, b), p in self.probabilities.items())

    @property
    def correlator(self) -> float:
        return math.fsum(a * b * p for (a, b), p in self.probabilities.items())


@dataclass(frozen=True)
class PositivityViolation:
    """One setting pair whose (MA, MB, C) leave the positivity interval"""
    i: int
    j: int
    slack: float  # distance outside the admissible interval

    def to_dict(self) -> Dict[str, float]:
        return {"i": self.i, "j": self.j, "slack": self.slack}


@dataclass(frozen=True)
class BinaryCorrelation:
    """Marginals MA (per Alice setting), MB (per Bob setting) and correlators C (Alice-indexed rows)"""
    grid: SettingsGrid
    MA: np.ndarray
    MB: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        n_a, n_b = self.grid.shape
        ma = np.array(self.MA, dtype=float).reshape(-1)
        mb = np.array(self.MB, dtype=float).reshape(-1)
        c = np.array(self.C, dtype=float)
        if ma.shape != (n_a,) or mb.shape != (n_b,) or c.shape != (n_a, n_b):
            raise InvalidArgumentError(
                f"Table shapes MA{ma.shape} MB{mb.shape} C{c.shape} do not match grid {n_a}x{n_b}"
            )
        for name, values in (("MA", ma), ("MB", mb), ("C", c)):
            if not np.all(np.isfinite(values)):
                raise InvalidArgumentError(f"{name} contains non-finite entries")
            if np.any(np.abs(values) > 1.0 + settings.tolerances.positivity):
                raise InvalidArgumentError(f"{name} entries must lie in [-1, 1]")
        for values in (ma, mb, c):
            values.setflags(write=False)
        object.__setattr__(self, "MA", ma)
        object.__setattr__(self, "MB", mb)
        object.__setattr__(self, "C", c)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.grid.shape

    def distribution(self, i: int, j: int) -> OutcomeDistribution:
        return reconstruct_distribution(float(self.MA[i]), float(self.MB[j]), float(self.C[i, j]))

    def restrict(self, alice: Sequence[int], bob: Sequence[int]) -> "BinaryCorrelation":
        """The same correlation seen on a subset of the settings"""
        return BinaryCorrelation(
            self.grid.restrict(alice, bob),
            self.MA[list(alice)],
            self.MB[list(bob)],
            self.C[np.ix_(list(alice), list(bob))],
        )

    def max_deviation(self, other: "BinaryCorrelation") -> float:
        """Largest entrywise difference of the three tables"""
        return float(max(
            np.max(np.abs(self.MA - other.MA)),
            np.max(np.abs(self.MB - other.MB)),
            np.max(np.abs(self.C - other.C)),
        ))


def positivity_bounds(MA: float, MB: float) -> Tuple[float, float]:
    """Exact admissible interval of C"""
    return -1.0 + abs(MA + MB), 1.0 - abs(MA - MB)


def reconstruct_distribution(MA: float, MB: float, C: float) -> OutcomeDistribution:
    """p(alpha, beta) = (1 + alpha MA + beta MB + alpha beta C) / 4"""
    tol = settings.tolerances.positivity
    probabilities = {}
    clipped = False
    for alpha in OUTCOMES:
        for beta in OUTCOMES:
            p = 0.25 * (1.0 + alpha * MA + beta * MB + alpha * beta * C)
            if p < -tol:
                raise PositivityViolationError(
                    f"p({alpha:+d},{beta:+d}) = {p:.3e} violates positivity for MA={MA}, MB={MB}, C={C}",
                    outcome=(alpha, beta),
                    slack=-4.0 * p,
                )
            clipped = clipped or p < 0.0
            probabilities[(alpha, beta)] = max(p, 0.0)
    if clipped:
        total = math.fsum(probabilities.values())
        probabilities = {outcome: p / total for outcome, p in probabilities.items()}
    return OutcomeDistribution(probabilities)


def validate(corr: BinaryCorrelation) -> List[PositivityViolation]:
    """Every (i, j) whose correlator leaves the positivity interval by more than the tolerance"""
    ma = corr.MA[:, None]
    mb = corr.MB[None, :]
    lower = -1.0 + np.abs(ma + mb)
    upper = 1.0 - np.abs(ma - mb)
    excess = np.maximum(lower - corr.C, corr.C - upper)
    violations = [
        PositivityViolation(int(i), int(j), float(excess[i, j]))
        for i, j in zip(*np.nonzero(excess > settings.tolerances.positivity))
    ]
    if violations:
        logger.debug("Positivity violations", count=len(violations))
    return violations


def fully_random_correlation(grid: SettingsGrid) -> BinaryCorrelation:
    """P = 1/4 for every outcome and setting pair"""
    n_a, n_b = grid.shape
    return BinaryCorrelation(grid, np.zeros(n_a), np.zeros(n_b), np.zeros((n_a, n_b)))


def werner_correlation(V: float, grid: SettingsGrid) -> BinaryCorrelation:
    """Two-qubit Werner state: flat marginals, C_ij = -V a_i.b_j"""
    if not 0.0 <= V <= 1.0:
        raise InvalidArgumentError(f"Visibility must lie in [0, 1], got {V}")
    n_a, n_b = grid.shape
    overlaps = np.clip(grid.alice_matrix @ grid.bob_matrix.T, -1.0, 1.0)
    return BinaryCorrelation(grid, np.zeros(n_a), np.zeros(n_b), -V * overlaps)


def pr_box_correlation(
    a0: UnitVector3, a1: UnitVector3, b0: UnitVector3, b1: UnitVector3
) -> BinaryCorrelation:
    """C(i, j) = (-1)^(ij) with flat marginals"""
    grid = SettingsGrid((a0, a1), (b0, b1))
    C = np.array([[1.0, 1.0], [1.0, -1.0]])
    return BinaryCorrelation(grid, np.zeros(2), np.zeros(2), C)


def deterministic_correlation(grid: SettingsGrid) -> BinaryCorrelation:
    """Both parties always output +1"""
    if grid.distinct_alice_count() < 2:
        logger.warning("Deterministic correlation with fewer than two distinct Alice settings")
    n_a, n_b = grid.shape
    return BinaryCorrelation(grid, np.ones(n_a), np.ones(n_b), np.ones((n_a, n_b)))


def product_state_correlation(u: UnitVector3, v: UnitVector3, grid: SettingsGrid) -> BinaryCorrelation:
    """Pure product state |u>|v>: MA = u.a, MB = v.b, C = (u.a)(v.b)"""
    ma = np.clip(grid.alice_matrix @ u.as_array(), -1.0, 1.0)
    mb = np.clip(grid.bob_matrix @ v.as_array(), -1.0, 1.0)
    return BinaryCorrelation(grid, ma, mb, np.outer(ma, mb))


def mix(correlations: Sequence[BinaryCorrelation], weights: Sequence[float]) -> BinaryCorrelation:
    """Convex mixture of correlations defined on the same grid"""
    if not correlations or len(correlations) != len(weights):
        raise InvalidArgumentError("Need one weight per correlation")
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or abs(math.fsum(w) - 1.0) > settings.tolerances.normalization:
        raise InvalidArgumentError("Mixture weights must be non-negative and sum to 1")
    grid = correlations[0].grid
    if any(c.grid != grid for c in correlations[1:]):
        raise InvalidArgumentError("All mixed correlations must share one settings grid")
    return BinaryCorrelation(
        grid,
        sum(wk * c.MA for wk, c in zip(w, correlations)),
        sum(wk * c.MB for wk, c in zip(w, correlations)),
        sum(wk * c.C for wk, c in zip(w, correlations)),
    )
