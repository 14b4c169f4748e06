"""
Leggett membership
Decides whether a finite-setting correlation is a mixture of Leggett components
supported on a hidden-variable grid
"""

from typing import Optional

import numpy as np
import structlog

from ..config import settings
from ..correlations import BinaryCorrelation, SettingsGrid, validate
from ..correlations.models import OUTCOMES
from ..errors import InvalidArgumentError, PositivityViolationError
from ..geometry import UnitVector3, angle_between
from ..leggett import witness_model
from .grids import HiddenVariableGrid
from .lp import LPBackend, LPBackendFactory
from .verdicts import Certificate, FeasibilityStatus, FeasibilityVerdict

logger = structlog.get_logger(__name__)

# Pairs added per column-generation round
_CANDIDATES_PER_ROUND = 32


def extremal_marginal_shortcut(corr: BinaryCorrelation) -> Optional[FeasibilityVerdict]:
    """
    Exact infeasibility from two extremal marginals of one party

    |M_i| = |M_j| = 1 forces u = s_i a_i = s_j a_j (s = sign of the marginal)
    in every component, impossible when those two vectors differ. The
    functional s_i M_i + s_j M_j equals 2 on the target and at most
    |s_i a_i + s_j a_j| = 2 cos(angle / 2) on any Leggett component.
    """
    tol = settings.tolerances
    parties = (
        ("alice", corr.MA, corr.grid.alice_settings),
        ("bob", corr.MB, corr.grid.bob_settings),
    )
    for party, marginals, vectors in parties:
        extremal = [i for i, m in enumerate(marginals) if abs(abs(m) - 1.0) <= tol.extremal]
        for position, i in enumerate(extremal):
            for j in extremal[position + 1:]:
                s_i, s_j = np.sign(marginals[i]), np.sign(marginals[j])
                forced_i = vectors[i] if s_i > 0 else -vectors[i]
                forced_j = vectors[j] if s_j > 0 else -vectors[j]
                angle = angle_between(forced_i, forced_j)
                if angle <= tol.distinct_angle:
                    continue

                n_a, n_b = corr.shape
                coefficients = np.zeros(len(marginals))
                coefficients[[i, j]] = [s_i, s_j]
                zeros_other = np.zeros(n_b if party == "alice" else n_a)
                certificate = Certificate(
                    kind="extremal-marginals",
                    alpha=coefficients if party == "alice" else zeros_other,
                    beta=zeros_other if party == "alice" else coefficients,
                    gamma=np.zeros((n_a, n_b)),
                    value=float(abs(marginals[i]) + abs(marginals[j])),
                    bound=2.0 * float(np.cos(angle / 2.0)),
                    details={"party": party, "settings": [i, j]},
                )
                logger.info("Extremal marginal shortcut", party=party, settings=[i, j], angle=angle)
                return FeasibilityVerdict(
                    status=FeasibilityStatus.INFEASIBLE_EXACT,
                    certificate=certificate,
                    margin=certificate.margin,
                    notes={"reason": f"{party} marginals at settings {i} and {j} are both extremal"},
                )
    return None


def _bounds(settings_grid: SettingsGrid, u: np.ndarray, v: np.ndarray):
    """Marginals and positivity endpoints of each pair: mA (K, I), mB (K, J), L and U (K, I, J)"""
    mA = np.clip(u @ settings_grid.alice_matrix.T, -1.0, 1.0)
    mB = np.clip(v @ settings_grid.bob_matrix.T, -1.0, 1.0)
    lower = -1.0 + np.abs(mA[:, :, None] + mB[:, None, :])
    upper = 1.0 - np.abs(mA[:, :, None] - mB[:, None, :])
    return mA, mB, lower, upper


def leggett_scores(
    certificate: Certificate, settings_grid: SettingsGrid, grid: HiddenVariableGrid
) -> np.ndarray:
    """Largest value of the functional on each grid pair, the correlator chosen freely in [L, U]"""
    scores = np.empty(len(grid))
    gamma = certificate.gamma
    start = 0
    for u, v in grid.chunks():
        mA, mB, lower, upper = _bounds(settings_grid, u, v)
        correlator_best = np.maximum(gamma * lower, gamma * upper).sum(axis=(1, 2))
        scores[start:start + len(u)] = mA @ certificate.alpha + mB @ certificate.beta + correlator_best
        start += len(u)
    return scores


def leggett_functional_bound(
    certificate: Certificate, settings_grid: SettingsGrid, grid: HiddenVariableGrid
) -> float:
    return float(leggett_scores(certificate, settings_grid, grid).max())


def _elastic_system(corr: BinaryCorrelation, grid: HiddenVariableGrid):
    """
    Columns: rho (K), s_low (P), s_up (P), e+ (E), e- (E) with P = I*J.
    Rows: normalization (hard), Alice marginals, Bob marginals,
    sum rho L + s_low = C, sum rho U - s_up = C; all but the first are elastic.
    """
    n_a, n_b = corr.shape
    K, P = len(grid), n_a * n_b
    mA, mB, lower, upper = _bounds(corr.grid, grid.u, grid.v)
    R = 1 + n_a + n_b + 2 * P
    E = R - 1

    A = np.zeros((R, K + 2 * P + 2 * E))
    low_rows = slice(1 + n_a + n_b, 1 + n_a + n_b + P)
    up_rows = slice(1 + n_a + n_b + P, R)
    A[0, :K] = 1.0
    A[1:1 + n_a, :K] = mA.T
    A[1 + n_a:1 + n_a + n_b, :K] = mB.T
    A[low_rows, :K] = lower.reshape(K, P).T
    A[low_rows, K:K + P] = np.eye(P)
    A[up_rows, :K] = upper.reshape(K, P).T
    A[up_rows, K + P:K + 2 * P] = -np.eye(P)
    A[1:, K + 2 * P:K + 2 * P + E] = np.eye(E)
    A[1:, K + 2 * P + E:] = -np.eye(E)

    target = corr.C.reshape(-1)
    b = np.concatenate([[1.0], corr.MA, corr.MB, target, target])
    c = np.zeros(A.shape[1])
    c[K + 2 * P:] = 1.0
    return c, A, b, (mA, mB, lower, upper), (low_rows, up_rows)


def _extract_witness(corr: BinaryCorrelation, grid: HiddenVariableGrid, rho: np.ndarray, blocks):
    mA, mB, lower, upper = blocks
    tol = settings.tolerances
    keep = rho > tol.weight_drop
    weights = rho[keep] / rho[keep].sum()
    lower, upper = lower[keep], upper[keep]

    lower_sum = np.tensordot(weights, lower, axes=1)
    upper_sum = np.tensordot(weights, upper, axes=1)
    width = upper_sum - lower_sum
    theta = np.where(
        width > tol.weight_drop,
        np.clip((corr.C - lower_sum) / np.where(width > tol.weight_drop, width, 1.0), 0.0, 1.0),
        0.5,
    )
    correlators = lower + theta[None, :, :] * (upper - lower)

    residual = max(
        float(np.max(np.abs(weights @ mA[keep] - corr.MA))),
        float(np.max(np.abs(weights @ mB[keep] - corr.MB))),
        float(np.max(np.abs(np.tensordot(weights, correlators, axes=1) - corr.C))),
    )
    model = witness_model(
        corr.grid, grid.u[keep], grid.v[keep], weights, correlators, grid_mode=grid.mode.value,
    )
    return model, residual


def _solve_on_grid(
    corr: BinaryCorrelation, grid: HiddenVariableGrid, backend: LPBackend
) -> FeasibilityVerdict:
    if len(grid) > settings.lp_grid_cap:
        raise InvalidArgumentError(
            f"Hidden-variable grid has {len(grid)} pairs, above the cap of {settings.lp_grid_cap}"
        )
    tol = settings.tolerances
    c, A, b, blocks, (low_rows, up_rows) = _elastic_system(corr, grid)
    logger.info("Leggett LP start", rows=A.shape[0], columns=A.shape[1], backend=backend.backend_type.value)
    result = backend.solve(c, A, b)
    logger.info("Leggett LP finished", status=result.status.value, iterations=result.iterations,
                objective=result.objective)

    base = dict(iterations=result.iterations, grid=grid.describe())
    if not result.optimal:
        return FeasibilityVerdict(
            status=FeasibilityStatus.UNDETERMINED, notes={"lp_status": result.status.value}, **base
        )

    elastic_rows = A.shape[0] - 1
    if result.objective <= tol.lp_slack * elastic_rows:
        K = len(grid)
        witness, residual = _extract_witness(corr, grid, result.x[:K], blocks)
        if residual > tol.witness:
            return FeasibilityVerdict(
                status=FeasibilityStatus.UNDETERMINED, max_residual=residual,
                notes={"reason": "witness does not reproduce the target"}, **base,
            )

        deviation = witness.expanded_correlation(corr.grid).max_deviation(corr)
        violations = witness.component_violations(corr.grid)
        if deviation > tol.soundness or violations:
            return FeasibilityVerdict(
                status=FeasibilityStatus.UNDETERMINED, max_residual=residual,
                notes={"reason": "witness failed the independent check",
                       "expanded_deviation": deviation, "component_violations": violations},
                **base,
            )
        return FeasibilityVerdict(
            status=FeasibilityStatus.FEASIBLE, witness=witness, max_residual=residual,
            notes={"expanded_deviation": deviation, "components": len(witness)}, **base,
        )

    n_a, n_b = corr.shape
    y = result.duals
    certificate = Certificate(
        kind="leggett-grid",
        alpha=y[1:1 + n_a].copy(),
        beta=y[1 + n_a:1 + n_a + n_b].copy(),
        gamma=(y[low_rows] + y[up_rows]).reshape(n_a, n_b),
        value=0.0,
        bound=0.0,
        details={"objective": result.objective},
    )
    certificate.value = certificate.evaluate(corr.MA, corr.MB, corr.C)
    scores = leggett_scores(certificate, corr.grid, grid)
    certificate.bound = float(scores.max())
    if certificate.margin <= 0.0:
        return FeasibilityVerdict(
            status=FeasibilityStatus.UNDETERMINED, certificate=certificate, margin=certificate.margin,
            notes={"reason": "dual functional does not separate on the grid"}, **base,
        )
    return FeasibilityVerdict(
        status=FeasibilityStatus.INFEASIBLE_ON_GRID, certificate=certificate, margin=certificate.margin, **base,
    )


def require_valid(corr: BinaryCorrelation) -> None:
    """Raise PositivityViolationError for the worst positivity violation, if any"""
    violations = validate(corr)
    if not violations:
        return
    worst = max(violations, key=lambda v: v.slack)
    ma, mb, c = corr.MA[worst.i], corr.MB[worst.j], corr.C[worst.i, worst.j]
    outcome = min(
        ((alpha, beta) for alpha in OUTCOMES for beta in OUTCOMES),
        key=lambda ab: 1.0 + ab[0] * ma + ab[1] * mb + ab[0] * ab[1] * c,
    )
    raise PositivityViolationError(
        f"Correlation violates positivity at settings ({worst.i}, {worst.j}) by {worst.slack:.3e}",
        outcome=outcome,
        slack=worst.slack,
    )


def leggett_feasibility(
    corr: BinaryCorrelation,
    grid: HiddenVariableGrid,
    backend: Optional[LPBackend] = None,
    verification_factor: Optional[int] = None,
) -> FeasibilityVerdict:
    """
    LP membership in the grid-restricted Leggett set

    A separating functional found on the grid is re-evaluated on a grid
    refined by `verification_factor`. When it fails there, the worst
    fine-grid pairs are added to the grid and the LP is solved again, for at
    most settings.certificate_rounds rounds; if it still fails the verdict is
    Undetermined.
    """
    require_valid(corr)
    backend = backend or LPBackendFactory.get_backend()
    factor = verification_factor or settings.verification_factor
    iterations = 0
    added = 0

    for round_index in range(settings.certificate_rounds + 1):
        verdict = _solve_on_grid(corr, grid, backend)
        iterations += verdict.iterations
        verdict.iterations = iterations
        verdict.notes["candidate_pairs_added"] = added
        if verdict.status != FeasibilityStatus.INFEASIBLE_ON_GRID:
            return verdict

        certificate = verdict.certificate
        fine = grid.refine(factor)
        fine_scores = leggett_scores(certificate, corr.grid, fine)
        grid_bound = certificate.bound
        certificate.bound = max(grid_bound, float(fine_scores.max()))
        certificate.details.update({"grid_bound": grid_bound, "verified_on": fine.describe()})
        verdict.margin = certificate.margin
        if certificate.margin > 0.0:
            logger.info("Certificate verified", margin=certificate.margin, fine_pairs=len(fine))
            return verdict

        logger.info("Certificate failed on the verification grid", margin=certificate.margin,
                    round=round_index)
        if round_index == settings.certificate_rounds:
            verdict.status = FeasibilityStatus.UNDETERMINED
            verdict.notes["reason"] = "certificate does not survive the verification grid"
            return verdict

        worst = np.argsort(-fine_scores)[:_CANDIDATES_PER_ROUND]
        pairs = [
            (UnitVector3(*fine.u[k].tolist()), UnitVector3(*fine.v[k].tolist()))
            for k in worst
        ]
        grid = grid.with_extras(pairs)
        added += len(pairs)

    return verdict
