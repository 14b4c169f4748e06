"""
Joint classification against the Leggett set and the Bell local polytope
"""

from typing import Optional, Tuple

import structlog

from ..correlations import BinaryCorrelation
from .bell import bell_local_membership
from .grids import HiddenVariableGrid
from .leggett import extremal_marginal_shortcut, leggett_feasibility
from .lp import LPBackend
from .verdicts import FeasibilityVerdict

logger = structlog.get_logger(__name__)


def classify(
    corr: BinaryCorrelation,
    grid: HiddenVariableGrid,
    backend: Optional[LPBackend] = None,
) -> Tuple[FeasibilityVerdict, FeasibilityVerdict]:
    """(leggett, bell) verdicts; the extremal-marginal shortcut pre-empts the Leggett LP"""
    leggett = extremal_marginal_shortcut(corr)
    if leggett is None:
        leggett = leggett_feasibility(corr, grid, backend=backend)
    bell = bell_local_membership(corr, backend=backend)
    logger.info("Classified", leggett=leggett.status.value, bell=bell.status.value)
    return leggett, bell
