"""
Correlation file codec
JSON interchange format shared by the CLI and the solvers
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

import numpy as np

from ..config import settings
from ..errors import CorrelationFormatError, InvalidArgumentError, SignalingError
from ..geometry import UnitVector3
from .models import BinaryCorrelation, SettingsGrid

PathLike = Union[str, Path]


def _vectors(raw: Any, key: str) -> List[UnitVector3]:
    if not isinstance(raw, list) or not raw:
        raise CorrelationFormatError(f"'{key}' must be a non-empty array of [x, y, z]")
    try:
        return [UnitVector3.from_array([float(x) for x in item]) for item in raw]
    except (TypeError, ValueError, InvalidArgumentError) as e:
        raise CorrelationFormatError(f"'{key}' holds an invalid vector: {e}") from e


def correlation_to_dict(corr: BinaryCorrelation) -> Dict[str, Any]:
    return {
        "alice_settings": [v.as_list() for v in corr.grid.alice_settings],
        "bob_settings": [v.as_list() for v in corr.grid.bob_settings],
        "MA": corr.MA.tolist(),
        "MB": corr.MB.tolist(),
        "C": corr.C.tolist(),
    }


def correlation_from_probabilities(grid: SettingsGrid, table: Sequence) -> BinaryCorrelation:
    """
    Convert P(alpha, beta | a_i, b_j) to (MA, MB, C)

    table has shape (I, J, 2, 2); outcome index 0 is +1 and index 1 is -1.
    A marginal that differs across the remote party's settings by more than
    the signaling tolerance is rejected.
    """
    P = np.asarray(table, dtype=float)
    n_a, n_b = grid.shape
    if P.shape != (n_a, n_b, 2, 2):
        raise CorrelationFormatError(f"Probability table has shape {P.shape}, expected {(n_a, n_b, 2, 2)}")
    if not np.all(np.isfinite(P)):
        raise CorrelationFormatError("Probability table contains non-finite entries")
    tol = settings.tolerances
    if np.any(P < -tol.positivity):
        raise CorrelationFormatError("Probability table contains negative entries")
    sums = P.sum(axis=(2, 3))
    if np.max(np.abs(sums - 1.0)) > tol.signaling:
        raise CorrelationFormatError("Every context of the probability table must sum to 1")

    signs = np.array([1.0, -1.0])
    ma_ctx = np.einsum("ijab,a->ij", P, signs)
    mb_ctx = np.einsum("ijab,b->ij", P, signs)
    c = np.einsum("ijab,a,b->ij", P, signs, signs)

    for i in range(n_a):
        mismatch = float(np.ptp(ma_ctx[i, :]))
        if mismatch > tol.signaling:
            raise SignalingError(
                f"Alice's marginal at setting {i} changes with Bob's setting by {mismatch:.3e}",
                party="alice", setting=i, mismatch=mismatch,
            )
    for j in range(n_b):
        mismatch = float(np.ptp(mb_ctx[:, j]))
        if mismatch > tol.signaling:
            raise SignalingError(
                f"Bob's marginal at setting {j} changes with Alice's setting by {mismatch:.3e}",
                party="bob", setting=j, mismatch=mismatch,
            )

    return BinaryCorrelation(grid, ma_ctx.mean(axis=1), mb_ctx.mean(axis=0), c)


def correlation_from_dict(data: Dict[str, Any]) -> BinaryCorrelation:
    if not isinstance(data, dict):
        raise CorrelationFormatError("Correlation file must hold a JSON object")
    grid = SettingsGrid(
        tuple(_vectors(data.get("alice_settings"), "alice_settings")),
        tuple(_vectors(data.get("bob_settings"), "bob_settings")),
    )
    if "probabilities" in data:
        return correlation_from_probabilities(grid, data["probabilities"])

    missing = [key for key in ("MA", "MB", "C") if key not in data]
    if missing:
        raise CorrelationFormatError(f"Missing keys: {', '.join(missing)}")
    try:
        return BinaryCorrelation(grid, data["MA"], data["MB"], data["C"])
    except (TypeError, ValueError) as e:
        raise CorrelationFormatError(f"Invalid correlation tables: {e}") from e


def load_correlation(path: PathLike) -> BinaryCorrelation:
    """Read a correlation file; OSError propagates, bad content raises CorrelationFormatError"""
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise CorrelationFormatError(f"{path}: not valid JSON ({e})") from e
        except UnicodeDecodeError as e:
            raise CorrelationFormatError(f"{path}: not UTF-8 text ({e})") from e
    return correlation_from_dict(data)


def dump_correlation(corr: BinaryCorrelation, path: PathLike) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(correlation_to_dict(corr), f, indent=2)
        f.write("\n")
