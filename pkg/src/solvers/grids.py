"""
Hidden-variable grids
Finite sets of (u, v) pairs over which a Leggett mixture is sought
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, Optional, Sequence, Tuple

import numpy as np
import structlog

from ..config import settings
from ..errors import InvalidArgumentError
from ..geometry import UnitVector3, as_matrix, fibonacci_grid

logger = structlog.get_logger(__name__)


class GridMode(str, Enum):
    ANTIPODAL = "antipodal"  # v = -u over Fibonacci nodes
    PRODUCT = "product"      # independent Fibonacci nodes for u and v


Pair = Tuple[UnitVector3, UnitVector3]


@dataclass(frozen=True)
class HiddenVariableGrid:
    """Candidate (u, v) pairs; `extras` are explicit pairs appended to the lattice"""
    mode: GridMode
    n: int
    u: np.ndarray
    v: np.ndarray
    extras: Tuple[Pair, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if len(self.u) == 0 or self.u.shape != self.v.shape:
            raise InvalidArgumentError("A hidden-variable grid needs matching, non-empty u and v arrays")
        self.u.setflags(write=False)
        self.v.setflags(write=False)

    def __len__(self) -> int:
        return len(self.u)

    def refine(self, factor: int) -> "HiddenVariableGrid":
        """Same mode and extras with `factor` times the lattice resolution"""
        if factor < 1:
            raise InvalidArgumentError(f"Refinement factor must be >= 1, got {factor}")
        return build_grid(self.mode, self.n * factor, self.extras)

    def with_extras(self, pairs: Sequence[Pair]) -> "HiddenVariableGrid":
        """Superset grid holding every current pair plus the given ones"""
        return build_grid(self.mode, self.n, tuple(self.extras) + tuple(pairs))

    def chunks(self, size: int = 4096) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        for start in range(0, len(self), size):
            yield self.u[start:start + size], self.v[start:start + size]

    def describe(self) -> Dict[str, Any]:
        return {"mode": self.mode.value, "n": self.n, "pairs": len(self), "extras": len(self.extras)}


def _extra_arrays(extras: Sequence[Pair]) -> Tuple[np.ndarray, np.ndarray]:
    if not extras:
        return np.empty((0, 3)), np.empty((0, 3))
    return as_matrix([u for u, _ in extras]), as_matrix([v for _, v in extras])


def antipodal_grid(n: Optional[int] = None, extras: Sequence[Pair] = ()) -> HiddenVariableGrid:
    n = n or settings.antipodal_grid_n
    nodes = fibonacci_grid(n).nodes
    extra_u, extra_v = _extra_arrays(extras)
    return HiddenVariableGrid(
        mode=GridMode.ANTIPODAL,
        n=n,
        u=np.vstack([nodes, extra_u]),
        v=np.vstack([-nodes, extra_v]),
        extras=tuple(extras),
    )


def product_grid(n: Optional[int] = None, extras: Sequence[Pair] = ()) -> HiddenVariableGrid:
    n = n or settings.product_grid_n
    nodes = fibonacci_grid(n).nodes
    extra_u, extra_v = _extra_arrays(extras)
    return HiddenVariableGrid(
        mode=GridMode.PRODUCT,
        n=n,
        u=np.vstack([np.repeat(nodes, n, axis=0), extra_u]),
        v=np.vstack([np.tile(nodes, (n, 1)), extra_v]),
        extras=tuple(extras),
    )


def build_grid(mode: GridMode, n: Optional[int] = None, extras: Sequence[Pair] = ()) -> HiddenVariableGrid:
    mode = GridMode(mode)
    if mode == GridMode.ANTIPODAL:
        grid = antipodal_grid(n, extras)
    else:
        grid = product_grid(n, extras)
    logger.debug("Hidden-variable grid built", **grid.describe())
    return grid
