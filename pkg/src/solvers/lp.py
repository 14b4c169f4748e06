"""
LP Backends
Standard-form linear programs (min c.x, A x = b, x >= 0) behind one interface
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional

import numpy as np
import structlog
from scipy.optimize import linprog

from ..config import settings
from ..errors import InvalidArgumentError

logger = structlog.get_logger(__name__)


class BackendType(str, Enum):
    SIMPLEX = "simplex"
    HIGHS = "highs"


class LPStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"
    NUMERICAL = "numerical"


@dataclass
class LPResult:
    """Solution of a standard-form LP; duals y satisfy A^T y <= c at optimality"""
    status: LPStatus
    backend: BackendType
    x: Optional[np.ndarray] = None
    objective: Optional[float] = None
    duals: Optional[np.ndarray] = None
    iterations: int = 0
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def optimal(self) -> bool:
        return self.status == LPStatus.OPTIMAL

    def to_dict(self) -> Dict[str, Any]:
        return {
            "status": self.status.value,
            "backend": self.backend.value,
            "objective": self.objective,
            "iterations": self.iterations,
            "metadata": self.metadata,
        }


class LPBackend(ABC):
    """Abstract base class for LP engines"""

    def __init__(self, max_iterations: int, pivot_tolerance: float):
        self.max_iterations = max_iterations
        self.pivot_tolerance = pivot_tolerance

    @property
    @abstractmethod
    def backend_type(self) -> BackendType:
        pass

    @abstractmethod
    def solve(self, c: np.ndarray, A: np.ndarray, b: np.ndarray) -> LPResult:
        """Minimize c.x subject to A x = b, x >= 0"""
        pass

    @staticmethod
    def _check_shapes(c: np.ndarray, A: np.ndarray, b: np.ndarray):
        if A.ndim != 2 or c.shape != (A.shape[1],) or b.shape != (A.shape[0],):
            raise InvalidArgumentError(f"Inconsistent LP shapes c{c.shape} A{A.shape} b{b.shape}")


class DenseSimplexBackend(LPBackend):
    """
    Two-phase tableau simplex

    Dantzig pricing, with Bland's rule taking over after a run of degenerate
    pivots until the objective moves again. The ratio test takes the minimum
    ratio and breaks ties on the largest pivot element (lowest basic index
    under Bland). Basic values are clamped at zero after each pivot and the
    tableau is rebuilt from the original rows every `refactor_every` pivots.
    Rows are sign-normalized so b >= 0 before phase I; artificial variables
    left basic at zero after phase I are pivoted out, and rows where that is
    impossible are dropped as redundant.
    """

    degenerate_run = 50
    refactor_every = 100

    @property
    def backend_type(self) -> BackendType:
        return BackendType.SIMPLEX

    def solve(self, c: np.ndarray, A: np.ndarray, b: np.ndarray) -> LPResult:
        c = np.asarray(c, dtype=float)
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        self._check_shapes(c, A, b)
        m, n = A.shape
        tol = self.pivot_tolerance

        signs = np.where(b < 0, -1.0, 1.0)
        A_std = A * signs[:, None]
        b_std = b * signs

        # Tableau: m constraint rows plus a reduced-cost row; last column is the rhs
        T = np.zeros((m + 1, n + m + 1))
        T[:m, :n] = A_std
        T[:m, n:n + m] = np.eye(m)
        T[:m, -1] = b_std
        T[m, :n] = -A_std.sum(axis=0)
        T[m, -1] = -b_std.sum()
        basis: List[int] = list(range(n, n + m))
        rows = list(range(m))
        iterations = 0

        phase_one = np.hstack([A_std, np.eye(m)])
        phase_one_cost = np.concatenate([np.zeros(n), np.ones(m)])
        status, iterations = self._iterate(T, basis, phase_one, b_std, phase_one_cost, iterations)
        if status != LPStatus.OPTIMAL:
            return LPResult(status=status, backend=self.backend_type, iterations=iterations)

        scale = max(1.0, float(np.max(np.abs(b_std))) if m else 1.0)
        if -T[m, -1] > 1e3 * tol * scale:
            logger.debug("Phase I ended infeasible", residual=-T[m, -1], iterations=iterations)
            return LPResult(status=LPStatus.INFEASIBLE, backend=self.backend_type, iterations=iterations)

        # Drive zero-valued artificials out of the basis
        for i in range(m - 1, -1, -1):
            if basis[i] < n:
                continue
            candidates = np.nonzero(np.abs(T[i, :n]) > tol)[0]
            if len(candidates):
                self._pivot(T, basis, i, int(candidates[np.argmax(np.abs(T[i, candidates]))]))
                iterations += 1
            else:
                T = np.delete(T, i, axis=0)
                del basis[i]
                del rows[i]

        # Phase II on the original columns
        m_kept = len(basis)
        T = np.hstack([T[:, :n], T[:, -1:]])
        if not self._refactor(T, basis, A_std[rows], b_std[rows], c):
            T[m_kept, :n] = c
            T[m_kept, -1] = 0.0
            for i, k in enumerate(basis):
                T[m_kept] -= c[k] * T[i]

        status, iterations = self._iterate(T, basis, A_std[rows], b_std[rows], c, iterations)
        if status != LPStatus.OPTIMAL:
            return LPResult(status=status, backend=self.backend_type, iterations=iterations)

        # Recompute the basic solution and the duals from the original data
        B = A_std[np.ix_(rows, basis)]
        x = np.zeros(n)
        try:
            x[basis] = np.linalg.solve(B, b_std[rows])
            pi = np.linalg.solve(B.T, c[basis])
        except np.linalg.LinAlgError:
            x[basis] = np.linalg.lstsq(B, b_std[rows], rcond=None)[0]
            pi = np.linalg.lstsq(B.T, c[basis], rcond=None)[0]
        x = np.maximum(x, 0.0)
        duals = np.zeros(m)
        duals[rows] = pi
        duals *= signs

        objective = float(c @ x)
        logger.debug("Simplex finished", rows=m, columns=n, iterations=iterations, objective=objective)
        return LPResult(
            status=LPStatus.OPTIMAL,
            backend=self.backend_type,
            x=x,
            objective=objective,
            duals=duals,
            iterations=iterations,
            metadata={"redundant_rows": m - m_kept},
        )

    def _iterate(
        self,
        T: np.ndarray,
        basis: List[int],
        M: np.ndarray,
        rhs: np.ndarray,
        cost: np.ndarray,
        iterations: int,
    ):
        """Pivot until optimal; M, rhs and cost are the phase's original data"""
        tol = self.pivot_tolerance
        m = len(basis)
        n_columns = M.shape[1]
        degenerate = 0
        since_refactor = 0
        while True:
            reduced = T[m, :n_columns]
            entering = np.nonzero(reduced < -tol)[0]
            if not len(entering):
                # Confirm optimality on a freshly rebuilt tableau
                if since_refactor and self._refactor(T, basis, M, rhs, cost):
                    since_refactor = 0
                    continue
                return LPStatus.OPTIMAL, iterations
            if iterations >= self.max_iterations:
                logger.warning("Simplex iteration cap reached", iterations=iterations)
                return LPStatus.ITERATION_LIMIT, iterations

            bland = degenerate >= self.degenerate_run
            j = int(entering[0]) if bland else int(entering[np.argmin(reduced[entering])])

            column = T[:m, j]
            eligible = np.nonzero(column > tol)[0]
            if not len(eligible):
                return LPStatus.UNBOUNDED, iterations
            ratios = T[eligible, -1] / column[eligible]
            ties = eligible[ratios <= ratios.min() + tol]
            if bland:
                i = int(min(ties, key=lambda r: basis[r]))
            else:
                i = int(ties[np.argmax(column[ties])])

            degenerate = degenerate + 1 if T[i, -1] <= tol else 0
            self._pivot(T, basis, i, j)
            T[:m, -1] = np.maximum(T[:m, -1], 0.0)
            iterations += 1
            since_refactor += 1
            if since_refactor >= self.refactor_every and self._refactor(T, basis, M, rhs, cost):
                since_refactor = 0

    @staticmethod
    def _refactor(T: np.ndarray, basis: List[int], M: np.ndarray, rhs: np.ndarray, cost: np.ndarray) -> bool:
        """Rebuild the tableau for the current basis from the original rows"""
        m = len(basis)
        try:
            body = np.linalg.solve(M[:, basis], np.hstack([M, rhs[:, None]]))
        except np.linalg.LinAlgError:
            return False
        if not np.all(np.isfinite(body)):
            return False
        body[:, -1] = np.maximum(body[:, -1], 0.0)
        T[:m] = body
        T[m, :-1] = cost - cost[basis] @ body[:, :-1]
        T[m, -1] = -float(cost[basis] @ body[:, -1])
        return True

    @staticmethod
    def _pivot(T: np.ndarray, basis: List[int], i: int, j: int):
        T[i] /= T[i, j]
        factors = T[:, j].copy()
        factors[i] = 0.0
        T -= np.outer(factors, T[i])
        basis[i] = j


class HighsBackend(LPBackend):
    """scipy's HiGHS solver; duals are the equality marginals"""

    @property
    def backend_type(self) -> BackendType:
        return BackendType.HIGHS

    def solve(self, c: np.ndarray, A: np.ndarray, b: np.ndarray) -> LPResult:
        c = np.asarray(c, dtype=float)
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        self._check_shapes(c, A, b)

        res = linprog(
            c, A_eq=A, b_eq=b, bounds=(0, None), method="highs",
            options={"maxiter": self.max_iterations},
        )
        status = {
            0: LPStatus.OPTIMAL,
            1: LPStatus.ITERATION_LIMIT,
            2: LPStatus.INFEASIBLE,
            3: LPStatus.UNBOUNDED,
        }.get(res.status, LPStatus.NUMERICAL)
        iterations = int(getattr(res, "nit", 0) or 0)
        logger.debug("HiGHS finished", rows=A.shape[0], columns=A.shape[1], status=status.value, iterations=iterations)
        if status != LPStatus.OPTIMAL:
            return LPResult(status=status, backend=self.backend_type, iterations=iterations,
                            metadata={"message": res.message})
        return LPResult(
            status=status,
            backend=self.backend_type,
            x=np.maximum(res.x, 0.0),
            objective=float(res.fun),
            duals=np.asarray(res.eqlin.marginals, dtype=float),
            iterations=iterations,
        )


class LPBackendFactory:
    """Factory for creating LP backend instances"""

    _instances: Dict[BackendType, LPBackend] = {}

    @classmethod
    def get_backend(cls, backend_type: Optional[str] = None) -> LPBackend:
        """Get or create a backend; defaults to settings.lp_backend"""
        try:
            kind = BackendType(backend_type or settings.lp_backend)
        except ValueError:
            raise InvalidArgumentError(f"Unknown LP backend: {backend_type}") from None
        backend = cls._instances.get(kind)
        if (
            backend is None
            or backend.max_iterations != settings.lp_max_iterations
            or backend.pivot_tolerance != settings.tolerances.pivot
        ):
            backend = cls._create_backend(kind)
            cls._instances[kind] = backend
        return backend

    @classmethod
    def _create_backend(cls, backend_type: BackendType) -> LPBackend:
        if backend_type == BackendType.SIMPLEX:
            return DenseSimplexBackend(settings.lp_max_iterations, settings.tolerances.pivot)
        elif backend_type == BackendType.HIGHS:
            return HighsBackend(settings.lp_max_iterations, settings.tolerances.pivot)
        else:
            raise InvalidArgumentError(f"Unknown LP backend: {backend_type}")

    @classmethod
    def reset(cls):
        """Reset all backend instances (useful for testing)"""
        cls._instances = {}
