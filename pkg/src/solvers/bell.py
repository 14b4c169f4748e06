"""
Bell local polytope membership
Mixtures of deterministic strategies over a finite set of settings
"""

import itertools
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
import structlog

from ..config import settings
from ..correlations import BinaryCorrelation
from ..errors import InvalidArgumentError
from .lp import LPBackend, LPBackendFactory
from .verdicts import Certificate, FeasibilityStatus, FeasibilityVerdict

logger = structlog.get_logger(__name__)


def enumerate_strategies(n_settings: int) -> np.ndarray:
    """All 2^n assignments of +-1 outputs to n settings, shape (2^n, n)"""
    return np.array(list(itertools.product((1.0, -1.0), repeat=n_settings))).reshape(-1, n_settings)


@dataclass
class LocalMixture:
    """Weights over deterministic strategies (alice outputs, bob outputs)"""
    alice: np.ndarray
    bob: np.ndarray
    weights: np.ndarray

    def reproduce(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (
            self.weights @ self.alice,
            self.weights @ self.bob,
            np.einsum("d,di,dj->ij", self.weights, self.alice, self.bob),
        )

    def to_witness_dict(self) -> Dict[str, Any]:
        return {
            "kind": "local-mixture",
            "strategies": [
                {"alice": a.astype(int).tolist(), "bob": b.astype(int).tolist(), "weight": float(w)}
                for a, b, w in zip(self.alice, self.bob, self.weights)
            ],
        }


def _best_responses(
    alpha: np.ndarray, beta: np.ndarray, gamma: np.ndarray, count: int = 1
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Highest values of alpha.A + beta.B + A.gamma.B over deterministic outputs

    Enumerates the party with fewer settings; the other party's best reply is
    exact (each output aligns with the sign of its coefficient). Returns the
    `count` best values with the matching Alice and Bob outputs.
    """
    alpha, beta, gamma = np.asarray(alpha, float), np.asarray(beta, float), np.asarray(gamma, float)
    swapped = len(alpha) > len(beta)
    if swapped:
        alpha, beta, gamma = beta, alpha, gamma.T

    strategies = enumerate_strategies(len(alpha))
    reply = beta[None, :] + strategies @ gamma
    values = strategies @ alpha + np.abs(reply).sum(axis=1)
    order = np.argsort(-values, kind="stable")[:count]
    chosen = strategies[order]
    replies = np.where(reply[order] >= 0.0, 1.0, -1.0)
    alice, bob = (replies, chosen) if swapped else (chosen, replies)
    return values[order], alice, bob


def bell_local_bound(alpha: np.ndarray, beta: np.ndarray, gamma: np.ndarray) -> Tuple[float, Dict[str, Any]]:
    """Maximum of alpha.A + beta.B + A.gamma.B over deterministic outputs A, B"""
    values, alice, bob = _best_responses(alpha, beta, gamma)
    return float(values[0]), {"alice": alice[0].astype(int).tolist(), "bob": bob[0].astype(int).tolist()}


def _local_system(corr: BinaryCorrelation, alice: np.ndarray, bob: np.ndarray):
    """Columns: q (D), e+ (E), e- (E); the normalization row is hard"""
    n_a, n_b = corr.shape
    D, P = len(alice), n_a * n_b
    R = 1 + n_a + n_b + P
    E = R - 1
    A = np.zeros((R, D + 2 * E))
    A[0, :D] = 1.0
    A[1:1 + n_a, :D] = alice.T
    A[1 + n_a:1 + n_a + n_b, :D] = bob.T
    A[1 + n_a + n_b:, :D] = np.einsum("di,dj->ijd", alice, bob).reshape(P, D)
    A[1:, D:D + E] = np.eye(E)
    A[1:, D + E:] = -np.eye(E)
    b = np.concatenate([[1.0], corr.MA, corr.MB, corr.C.reshape(-1)])
    c = np.zeros(A.shape[1])
    c[D:] = 1.0
    return c, A, b


def _mixture_verdict(
    corr: BinaryCorrelation, alice: np.ndarray, bob: np.ndarray, q: np.ndarray, iterations: int, notes: Dict[str, Any]
) -> FeasibilityVerdict:
    tol = settings.tolerances
    keep = q > tol.weight_drop
    mixture = LocalMixture(alice[keep], bob[keep], q[keep] / q[keep].sum())
    ma, mb, cc = mixture.reproduce()
    residual = float(max(
        np.max(np.abs(ma - corr.MA)), np.max(np.abs(mb - corr.MB)), np.max(np.abs(cc - corr.C))
    ))
    status = FeasibilityStatus.FEASIBLE if residual <= tol.witness else FeasibilityStatus.UNDETERMINED
    return FeasibilityVerdict(
        status=status, witness=mixture, iterations=iterations, max_residual=residual,
        notes={**notes, "strategies_used": int(keep.sum())},
    )


def _functional(corr: BinaryCorrelation, duals: np.ndarray, details: Dict[str, Any]) -> Certificate:
    """Bell functional read from the duals, scored by its exact local bound"""
    n_a, n_b = corr.shape
    alpha = duals[1:1 + n_a].copy()
    beta = duals[1 + n_a:1 + n_a + n_b].copy()
    gamma = duals[1 + n_a + n_b:].reshape(n_a, n_b).copy()
    bound, maximizer = bell_local_bound(alpha, beta, gamma)
    return Certificate(
        kind="bell-functional",
        alpha=alpha, beta=beta, gamma=gamma,
        value=float(alpha @ corr.MA + beta @ corr.MB + np.sum(gamma * corr.C)),
        bound=bound,
        details={**details, "maximizer": maximizer},
    )


def _certificate_verdict(certificate: Certificate, iterations: int, notes: Dict[str, Any]) -> FeasibilityVerdict:
    status = FeasibilityStatus.INFEASIBLE if certificate.margin > 0.0 else FeasibilityStatus.UNDETERMINED
    return FeasibilityVerdict(
        status=status, certificate=certificate, margin=certificate.margin,
        iterations=iterations, notes=notes,
    )


def _solve_dense(corr: BinaryCorrelation, backend: LPBackend) -> FeasibilityVerdict:
    n_a, n_b = corr.shape
    tol = settings.tolerances
    outputs = enumerate_strategies(n_a + n_b)
    alice, bob = outputs[:, :n_a], outputs[:, n_a:]
    c, A, b = _local_system(corr, alice, bob)

    logger.info("Bell LP start", rows=A.shape[0], columns=A.shape[1], strategies=len(outputs))
    result = backend.solve(c, A, b)
    logger.info("Bell LP finished", status=result.status.value, iterations=result.iterations,
                objective=result.objective)
    scenario = {"alice_settings": n_a, "bob_settings": n_b, "strategies": len(outputs)}
    if not result.optimal:
        return FeasibilityVerdict(
            status=FeasibilityStatus.UNDETERMINED, iterations=result.iterations,
            notes={"lp_status": result.status.value, "scenario": scenario},
        )

    if result.objective <= tol.lp_slack * (A.shape[0] - 1):
        return _mixture_verdict(corr, alice, bob, result.x[:len(outputs)], result.iterations,
                                {"scenario": scenario})
    certificate = _functional(corr, result.duals, {"objective": result.objective})
    return _certificate_verdict(certificate, result.iterations, {"scenario": scenario})


def _solve_by_generation(corr: BinaryCorrelation, backend: LPBackend) -> FeasibilityVerdict:
    """
    Column generation over deterministic strategies

    The restricted LP holds the strategies generated so far. Its duals price
    every strategy at once through the best-response enumeration; strategies
    with positive reduced cost join the next round. A functional that beats
    its exact local bound on the target ends the search as Infeasible.
    """
    n_a, n_b = corr.shape
    tol = settings.tolerances
    ones_a, ones_b = np.ones(n_a), np.ones(n_b)
    alice = np.array([ones_a, ones_a, -ones_a, -ones_a])
    bob = np.array([ones_b, -ones_b, ones_b, -ones_b])
    seen = {(tuple(a), tuple(b)) for a, b in zip(alice.tolist(), bob.tolist())}
    scenario = {"alice_settings": n_a, "bob_settings": n_b, "strategies": 2 ** (n_a + n_b)}
    iterations = 0
    certificate = None

    for round_index in range(settings.bell_column_rounds):
        c, A, b = _local_system(corr, alice, bob)
        result = backend.solve(c, A, b)
        iterations += result.iterations
        notes = {"scenario": scenario, "columns": len(alice), "rounds": round_index + 1}
        if not result.optimal:
            return FeasibilityVerdict(
                status=FeasibilityStatus.UNDETERMINED, iterations=iterations,
                notes={**notes, "lp_status": result.status.value},
            )
        if result.objective <= tol.lp_slack * (A.shape[0] - 1):
            logger.info("Bell column generation found a local mixture", columns=len(alice), rounds=round_index + 1)
            return _mixture_verdict(corr, alice, bob, result.x[:len(alice)], iterations, notes)

        y = result.duals
        certificate = _functional(corr, y, {"objective": result.objective})
        if certificate.margin > 0.0:
            logger.info("Bell column generation separated the target", margin=certificate.margin,
                        columns=len(alice), rounds=round_index + 1)
            return _certificate_verdict(certificate, iterations, notes)

        # A strategy column has reduced cost -(y0 + value of the dual functional on it)
        values, new_alice, new_bob = _best_responses(
            certificate.alpha, certificate.beta, certificate.gamma, settings.bell_columns_per_round
        )
        fresh = [
            k for k in range(len(values))
            if values[k] + y[0] > tol.lp_slack and (tuple(new_alice[k].tolist()), tuple(new_bob[k].tolist())) not in seen
        ]
        if not fresh:
            break
        for k in fresh:
            seen.add((tuple(new_alice[k].tolist()), tuple(new_bob[k].tolist())))
        alice = np.vstack([alice, new_alice[fresh]])
        bob = np.vstack([bob, new_bob[fresh]])

    logger.warning("Bell column generation stopped without a verdict", columns=len(alice))
    verdict = FeasibilityVerdict(
        status=FeasibilityStatus.UNDETERMINED, iterations=iterations,
        notes={"scenario": scenario, "columns": len(alice), "reason": "column generation stalled"},
    )
    if certificate is not None:
        verdict.certificate = certificate
        verdict.margin = certificate.margin
    return verdict


def bell_local_membership(
    corr: BinaryCorrelation, backend: Optional[LPBackend] = None
) -> FeasibilityVerdict:
    """
    Membership in the local polytope of the given settings

    Up to settings.bell_dense_limit settings every deterministic strategy is
    a column of one LP. Larger scenarios generate strategy columns from the
    duals; the verdict is exact either way.
    """
    n_a, n_b = corr.shape
    if n_a + n_b > settings.bell_strategy_cap:
        raise InvalidArgumentError(
            f"{n_a} + {n_b} settings exceed the Bell enumeration cap of {settings.bell_strategy_cap}"
        )
    backend = backend or LPBackendFactory.get_backend()
    if n_a + n_b <= settings.bell_dense_limit:
        return _solve_dense(corr, backend)
    logger.info("Bell scenario above the dense limit; generating columns", alice=n_a, bob=n_b)
    return _solve_by_generation(corr, backend)
