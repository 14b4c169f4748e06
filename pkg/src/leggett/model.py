"""
Leggett Models
Mixtures of hidden-variable pairs (u, v) with Malus-law marginals, including the
explicit model for two-qubit Werner states
"""

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Tuple, Union

import numpy as np
import structlog

from ..config import CRITICAL_VISIBILITY, settings
from ..correlations import BinaryCorrelation, SettingsGrid, reconstruct_distribution
from ..correlations.models import OUTCOMES
from ..errors import InvalidArgumentError, OutOfRegimeError
from ..geometry import QuadratureScheme, UnitVector3, clamp, dot

logger = structlog.get_logger(__name__)

ArrayLike = Union[float, np.ndarray]

# (component indices, a, b) -> correlator of each listed component at (a, b)
ComponentCorrelator = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class LeggettComponent:
    """One hidden-variable pair; its marginals are fixed to u.a and v.b"""
    u: UnitVector3
    v: UnitVector3
    correlator: Callable[[UnitVector3, UnitVector3], float]

    def marginal_a(self, a: UnitVector3) -> float:
        return dot(self.u, a)

    def marginal_b(self, b: UnitVector3) -> float:
        return dot(self.v, b)

    def bounds(self, a: UnitVector3, b: UnitVector3) -> Tuple[float, float]:
        ma, mb = self.marginal_a(a), self.marginal_b(b)
        return -1.0 + abs(ma + mb), 1.0 - abs(ma - mb)

    def distribution(self, a: UnitVector3, b: UnitVector3):
        return reconstruct_distribution(self.marginal_a(a), self.marginal_b(b), self.correlator(a, b))


@dataclass(frozen=True)
class LeggettModel:
    """
    Weighted mixture of Leggett components

    Components are stored as arrays (u and v of shape (K, 3), weights of shape
    (K,)) with one vectorized correlator; per-component distributions are
    materialized on demand.
    """
    u: np.ndarray
    v: np.ndarray
    weights: np.ndarray
    correlator: ComponentCorrelator
    kind: str = "custom"
    parameters: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float).reshape(-1, 3)
        v = np.asarray(self.v, dtype=float).reshape(-1, 3)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if not (len(u) == len(v) == len(w)) or len(w) == 0:
            raise InvalidArgumentError("A Leggett model needs matching, non-empty u, v and weights")
        if np.any(w < 0):
            raise InvalidArgumentError("Mixture weights must be non-negative")
        if abs(math.fsum(w.tolist()) - 1.0) > settings.tolerances.normalization:
            raise InvalidArgumentError(f"Mixture weights sum to {math.fsum(w.tolist())}, not 1")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return len(self.weights)

    def component(self, k: int) -> LeggettComponent:
        index = np.array([k])
        return LeggettComponent(
            u=UnitVector3(*self.u[k].tolist()),
            v=UnitVector3(*self.v[k].tolist()),
            correlator=lambda a, b: float(self.correlator(index, a.as_array(), b.as_array())[0]),
        )

    def _all(self) -> np.ndarray:
        return np.arange(len(self))

    def component_values(self, a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Marginals and correlators of every component at one setting pair"""
        ma = np.clip(self.u @ a, -1.0, 1.0)
        mb = np.clip(self.v @ b, -1.0, 1.0)
        return ma, mb, self.correlator(self._all(), a, b)

    def correlation(self, grid: SettingsGrid) -> BinaryCorrelation:
        """Mixture (MA, MB, C) on a settings grid"""
        A, B = grid.alice_matrix, grid.bob_matrix
        ma = np.clip(self.u @ A.T, -1.0, 1.0).T @ self.weights
        mb = np.clip(self.v @ B.T, -1.0, 1.0).T @ self.weights
        C = np.empty(grid.shape)
        for i, a in enumerate(A):
            for j, b in enumerate(B):
                C[i, j] = math.fsum((self.weights * self.correlator(self._all(), a, b)).tolist())
        return BinaryCorrelation(grid, ma, mb, np.clip(C, -1.0, 1.0))

    def max_bound_excess(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Per-component distance outside the positivity interval at (a, b); <= 0 inside"""
        ma, mb, c = self.component_values(a, b)
        lower = -1.0 + np.abs(ma + mb)
        upper = 1.0 - np.abs(ma - mb)
        return np.maximum(lower - c, c - upper)

    def component_violations(self, grid: SettingsGrid, tol: Optional[float] = None) -> int:
        """Number of (component, i, j) leaving the positivity interval by more than tol"""
        tol = settings.tolerances.positivity if tol is None else tol
        count = 0
        for a in grid.alice_matrix:
            for b in grid.bob_matrix:
                count += int(np.count_nonzero(self.max_bound_excess(a, b) > tol))
        return count

    def expanded_correlation(self, grid: SettingsGrid) -> BinaryCorrelation:
        """
        Mixture rebuilt from per-component probability tables

        Independent of the array shortcuts in correlation(); intended for
        re-checking solver witnesses, which have few components.
        """
        n_a, n_b = grid.shape
        P = np.zeros((n_a, n_b, 2, 2))
        for k in range(len(self)):
            component = self.component(k)
            for i, a in enumerate(grid.alice_settings):
                for j, b in enumerate(grid.bob_settings):
                    dist = component.distribution(a, b)
                    for x, alpha in enumerate(OUTCOMES):
                        for y, beta in enumerate(OUTCOMES):
                            P[i, j, x, y] += self.weights[k] * dist[(alpha, beta)]
        signs = np.array([1.0, -1.0])
        ma = np.einsum("ijab,a->ij", P, signs)[:, 0]
        mb = np.einsum("ijab,b->ij", P, signs)[0, :]
        c = np.einsum("ijab,a,b->ij", P, signs, signs)
        return BinaryCorrelation(grid, ma, mb, c)

    def to_witness_dict(self) -> Dict[str, Any]:
        """Witness JSON; v and correlators are omitted when they follow from the model kind"""
        data: Dict[str, Any] = {"kind": self.kind, "components": len(self)}
        data.update({k: v for k, v in self.parameters.items() if not isinstance(v, np.ndarray)})
        if self.kind == "werner-antipodal":
            data["nodes"] = [
                {"u": u, "weight": w} for u, w in zip(self.u.tolist(), self.weights.tolist())
            ]
        else:
            data["nodes"] = [
                {"u": u, "v": v, "weight": w}
                for u, v, w in zip(self.u.tolist(), self.v.tolist(), self.weights.tolist())
            ]
            table = self.parameters.get("correlators")
            if isinstance(table, np.ndarray):
                data["correlators"] = table.tolist()
        return data


def _check_regime(V: float):
    if V < 0.0:
        raise InvalidArgumentError(f"Visibility must be non-negative, got {V}")
    if V > CRITICAL_VISIBILITY + settings.tolerances.regime:
        raise OutOfRegimeError(
            f"V = {V} exceeds (1 + 1/sqrt(2))/2 = {CRITICAL_VISIBILITY:.10f}; some p may be negative",
            visibility=V,
            bound=CRITICAL_VISIBILITY,
        )


def _check_overlap(t: ArrayLike) -> ArrayLike:
    tol = settings.tolerances.clamp
    values = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(values)) or np.any(np.abs(values) > 1.0 + tol):
        raise InvalidArgumentError(f"a.b must lie in [-1, 1], got {t}")
    clipped = np.clip(values, -1.0, 1.0)
    return float(clipped) if np.ndim(t) == 0 else clipped


def _p_plus_minus_unchecked(t: ArrayLike, V: float) -> Tuple[ArrayLike, ArrayLike]:
    root_plus = np.sqrt((1.0 + t) / 2.0)
    root_minus = np.sqrt((1.0 - t) / 2.0)
    denominator = 2.0 - root_plus - root_minus
    p_plus = (1.0 - root_minus - V * t) / denominator
    p_minus = (1.0 - root_plus + V * t) / denominator
    return p_plus, p_minus


def denominator(t: ArrayLike) -> ArrayLike:
    """2 - sqrt((1+t)/2) - sqrt((1-t)/2), bounded below by 2 - sqrt(2)"""
    t = _check_overlap(t)
    return 2.0 - np.sqrt((1.0 + t) / 2.0) - np.sqrt((1.0 - t) / 2.0)


def p_plus_minus(t: ArrayLike, V: float) -> Tuple[ArrayLike, ArrayLike]:
    """Mixing weights of the two extremal endpoints; t = a.b (scalar or array)"""
    t = _check_overlap(t)
    _check_regime(V)
    p_plus, p_minus = _p_plus_minus_unchecked(t, V)
    if np.ndim(p_plus) == 0:
        return float(p_plus), float(p_minus)
    return p_plus, p_minus


def _endpoint_correlators(nodes: np.ndarray, a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    lower = -1.0 + np.abs(nodes @ (a - b))
    upper = 1.0 - np.abs(nodes @ (a + b))
    return lower, upper


def component_correlator(u: UnitVector3, a: UnitVector3, b: UnitVector3, V: float) -> float:
    """C_{u,-u}(a, b) = p- [-1 + |u.(a-b)|] + p+ [1 - |u.(a+b)|]"""
    p_plus, p_minus = p_plus_minus(dot(a, b), V)
    lower, upper = _endpoint_correlators(u.as_array()[None, :], a.as_array(), b.as_array())
    return float(p_minus * lower[0] + p_plus * upper[0])


def necessary_condition_slack(t: ArrayLike, V: float) -> Tuple[ArrayLike, ArrayLike]:
    """Slacks of -1 + sqrt((1-t)/2) <= -V t <= 1 - sqrt((1+t)/2); the condition holds iff both >= 0"""
    t = _check_overlap(t)
    if V < 0.0:
        raise InvalidArgumentError(f"Visibility must be non-negative, got {V}")
    lower = -V * t - (-1.0 + np.sqrt((1.0 - t) / 2.0))
    upper = (1.0 - np.sqrt((1.0 + t) / 2.0)) + V * t
    if np.ndim(lower) == 0:
        return float(lower), float(upper)
    return lower, upper


def build_werner_model(V: float, scheme: QuadratureScheme) -> LeggettModel:
    """Explicit model: v = -u with u distributed by the scheme"""
    _check_regime(V)
    nodes = scheme.nodes

    def correlator(index: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        t = clamp(float(a @ b), -1.0, 1.0)
        p_plus, p_minus = _p_plus_minus_unchecked(t, V)
        lower, upper = _endpoint_correlators(nodes[index], a, b)
        return p_minus * lower + p_plus * upper

    logger.debug("Built Werner model", visibility=V, nodes=len(scheme), scheme=scheme.name)
    return LeggettModel(
        u=nodes,
        v=-nodes,
        weights=scheme.weights,
        correlator=correlator,
        kind="werner-antipodal",
        parameters={"V": V, "scheme": scheme.name},
    )


def build_uniform_product_model(scheme: QuadratureScheme) -> LeggettModel:
    """u and v independent, each distributed by the scheme; product correlator (u.a)(v.b)"""
    n = len(scheme)
    u = np.repeat(scheme.nodes, n, axis=0)
    v = np.tile(scheme.nodes, (n, 1))
    weights = np.outer(scheme.weights, scheme.weights).reshape(-1)
    weights = weights / math.fsum(weights.tolist())

    def correlator(index: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.clip(u[index] @ a, -1.0, 1.0) * np.clip(v[index] @ b, -1.0, 1.0)

    return LeggettModel(
        u=u, v=v, weights=weights, correlator=correlator,
        kind="product-uniform", parameters={"scheme": scheme.name},
    )


def _zoom_minimum(f: Callable[[np.ndarray], np.ndarray], resolution: int, rounds: int = 3) -> Tuple[float, float]:
    """Grid minimum of f on [-1, 1], refined by repeated 10x zooms around the argmin"""
    low, high = -1.0, 1.0
    best_t, best_value = 0.0, math.inf
    for _ in range(rounds + 1):
        t = np.linspace(low, high, resolution)
        values = f(t)
        k = int(np.argmin(values))
        if values[k] < best_value:
            best_t, best_value = float(t[k]), float(values[k])
        half_width = (high - low) / 20.0
        low, high = max(-1.0, best_t - half_width), min(1.0, best_t + half_width)
    return best_t, best_value


def binding_point(V: float, resolution: int = 10_000) -> Tuple[float, float]:
    """(t, slack) where the smaller of the two necessary-condition slacks is minimal"""
    def smallest_slack(t: np.ndarray) -> np.ndarray:
        lower, upper = necessary_condition_slack(t, V)
        return np.minimum(lower, upper)
    return _zoom_minimum(smallest_slack, resolution)


@dataclass
class ThresholdScan:
    """Result of locating the largest V satisfying the necessary condition"""
    visibility: float
    binding_t: float
    binding_t_stationary: float  # 1/(8V^2) - 1, where the upper slack is stationary
    resolution: int
    bisection_steps: int
    closed_form: float = CRITICAL_VISIBILITY

    @property
    def deviation(self) -> float:
        return self.visibility - self.closed_form

    def to_dict(self) -> Dict[str, Any]:
        return {
            "visibility": self.visibility,
            "closed_form": self.closed_form,
            "deviation": self.deviation,
            "binding_t": self.binding_t,
            "binding_t_stationary": self.binding_t_stationary,
            "resolution": self.resolution,
            "bisection_steps": self.bisection_steps,
        }


def threshold_scan(resolution: int, bracket: Tuple[float, float] = (0.5, 1.0), tol: float = 1e-9) -> ThresholdScan:
    """Bisection on V for the necessary condition over a zooming t-grid"""
    if resolution < 1000:
        raise InvalidArgumentError(f"resolution must be at least 1000, got {resolution}")
    low, high = bracket
    if binding_point(low, resolution)[1] < 0.0 or binding_point(high, resolution)[1] >= 0.0:
        raise InvalidArgumentError(f"Bracket {bracket} does not straddle the threshold")

    steps = 0
    while high - low > tol:
        middle = 0.5 * (low + high)
        if binding_point(middle, resolution)[1] >= 0.0:
            low = middle
        else:
            high = middle
        steps += 1

    t_star, _ = binding_point(low, resolution)
    logger.info("Threshold located", visibility=low, binding_t=t_star, steps=steps)
    return ThresholdScan(
        visibility=low,
        binding_t=t_star,
        binding_t_stationary=1.0 / (8.0 * low * low) - 1.0,
        resolution=resolution,
        bisection_steps=steps,
    )


def critical_visibility(resolution: int) -> float:
    """Largest V for which the necessary condition holds on the t-grid"""
    return threshold_scan(resolution).visibility


def p_minus_scan(V: float, resolution: int) -> Tuple[float, float]:
    """(t, p-) at the smallest p- on a plain t-grid; no regime guard, so V may exceed the threshold"""
    t = np.linspace(-1.0, 1.0, resolution)
    _, p_minus = _p_plus_minus_unchecked(t, V)
    k = int(np.argmin(p_minus))
    return float(t[k]), float(p_minus[k])


def witness_model(
    grid: SettingsGrid,
    u: np.ndarray,
    v: np.ndarray,
    weights: np.ndarray,
    correlators: np.ndarray,
    **parameters: Any,
) -> LeggettModel:
    """Finite-setting model whose correlators are a (K, I, J) table on the given grid"""
    A, B = grid.alice_matrix, grid.bob_matrix
    table = np.asarray(correlators, dtype=float)

    def lookup(vectors: np.ndarray, target: np.ndarray, party: str) -> int:
        distances = np.linalg.norm(vectors - target[None, :], axis=1)
        k = int(np.argmin(distances))
        if distances[k] > settings.tolerances.clamp:
            raise InvalidArgumentError(f"Setting {target.tolist()} is not one of {party}'s grid settings")
        return k

    def correlator(index: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return table[index, lookup(A, a, "Alice"), lookup(B, b, "Bob")]

    return LeggettModel(
        u=u, v=v, weights=weights, correlator=correlator,
        kind="lp-witness", parameters={"correlators": table, **parameters},
    )
