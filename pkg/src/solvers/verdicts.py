"""
Verdict types shared by the Leggett and Bell solvers
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np


class FeasibilityStatus(str, Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE_ON_GRID = "InfeasibleOnGrid"
    INFEASIBLE_EXACT = "InfeasibleExact"
    INFEASIBLE = "Infeasible"
    UNDETERMINED = "Undetermined"

    @property
    def infeasible(self) -> bool:
        return self in (
            FeasibilityStatus.INFEASIBLE_ON_GRID,
            FeasibilityStatus.INFEASIBLE_EXACT,
            FeasibilityStatus.INFEASIBLE,
        )


@dataclass
class Certificate:
    """
    Separating functional F(MA, MB, C) = alpha.MA + beta.MB + sum gamma_ij C_ij

    `bound` is the largest value F takes on the model class (over the grid, or
    over all deterministic strategies for Bell) and `value` its value on the
    target; the certificate separates when value > bound.
    """
    kind: str
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    value: float
    bound: float
    details: Dict[str, Any] = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.value - self.bound

    def evaluate(self, MA: np.ndarray, MB: np.ndarray, C: np.ndarray) -> float:
        return float(self.alpha @ MA + self.beta @ MB + np.sum(self.gamma * C))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "alpha": self.alpha.tolist(),
            "beta": self.beta.tolist(),
            "gamma": self.gamma.tolist(),
            "value": self.value,
            "bound": self.bound,
            "margin": self.margin,
            **self.details,
        }


@dataclass
class FeasibilityVerdict:
    """Outcome of one membership question"""
    status: FeasibilityStatus
    witness: Optional[Any] = None
    certificate: Optional[Certificate] = None
    margin: Optional[float] = None
    iterations: int = 0
    max_residual: Optional[float] = None
    grid: Optional[Dict[str, Any]] = None
    notes: Dict[str, Any] = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status == FeasibilityStatus.FEASIBLE

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {
            "status": self.status.value,
            "diagnostics": {
                "iterations": self.iterations,
                "max_residual": self.max_residual,
                "grid": self.grid,
                **self.notes,
            },
        }
        if self.witness is not None:
            to_dict = getattr(self.witness, "to_witness_dict", None)
            data["witness"] = to_dict() if to_dict else self.witness
        if self.certificate is not None:
            data["certificate"] = self.certificate.to_dict()
        if self.margin is not None:
            data["margin"] = self.margin
        return data
