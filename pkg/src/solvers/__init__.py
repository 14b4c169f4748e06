"""
Membership solvers exports
"""

from .bell import LocalMixture, bell_local_bound, bell_local_membership, enumerate_strategies
from .classify import classify
from .grids import GridMode, HiddenVariableGrid, antipodal_grid, build_grid, product_grid
from .leggett import (
    extremal_marginal_shortcut,
    leggett_feasibility,
    leggett_functional_bound,
    leggett_scores,
    require_valid,
)
from .lp import (
    BackendType,
    DenseSimplexBackend,
    HighsBackend,
    LPBackend,
    LPBackendFactory,
    LPResult,
    LPStatus,
)
from .verdicts import Certificate, FeasibilityStatus, FeasibilityVerdict

__all__ = [
    "BackendType",
    "Certificate",
    "DenseSimplexBackend",
    "FeasibilityStatus",
    "FeasibilityVerdict",
    "GridMode",
    "HiddenVariableGrid",
    "HighsBackend",
    "LPBackend",
    "LPBackendFactory",
    "LPResult",
    "LPStatus",
    "LocalMixture",
    "antipodal_grid",
    "bell_local_bound",
    "bell_local_membership",
    "build_grid",
    "classify",
    "enumerate_strategies",
    "extremal_marginal_shortcut",
    "leggett_feasibility",
    "leggett_functional_bound",
    "leggett_scores",
    "product_grid",
    "require_valid",
]
