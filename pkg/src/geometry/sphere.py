"""
Sphere Geometry
Unit vectors on the Bloch sphere, deterministic grids and quadrature over S^2
"""

import math
from dataclasses import dataclass, field
from typing import Callable, List, Sequence, Union

import numpy as np
import structlog

from ..config import settings
from ..errors import InvalidArgumentError, NumericDomainError

logger = structlog.get_logger(__name__)

GOLDEN_RATIO = (1.0 + 5.0 ** 0.5) / 2.0


def clamp(value: float, lower: float, upper: float, tol: float | None = None) -> float:
    """Clamp rounding drift into [lower, upper]; drift beyond tol is an error"""
    tol = settings.tolerances.clamp if tol is None else tol
    if value < lower - tol or value > upper + tol:
        raise NumericDomainError(f"{value!r} lies outside [{lower}, {upper}] by more than {tol}")
    return min(max(value, lower), upper)


@dataclass(frozen=True)
class UnitVector3:
    """A point on S^2: measurement setting or hidden variable"""
    x: float
    y: float
    z: float

    def __post_init__(self):
        values = (self.x, self.y, self.z)
        if not all(math.isfinite(v) for v in values):
            raise NumericDomainError(f"Non-finite unit vector components: {values}")
        norm = math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)
        if abs(norm - 1.0) > settings.tolerances.clamp:
            raise InvalidArgumentError(
                f"Vector {values} has norm {norm}; use UnitVector3.from_components to normalize"
            )
        # Snap residual drift so the stored components are normalized
        if norm != 1.0:
            object.__setattr__(self, "x", self.x / norm)
            object.__setattr__(self, "y", self.y / norm)
            object.__setattr__(self, "z", self.z / norm)

    @classmethod
    def from_components(cls, x: float, y: float, z: float) -> "UnitVector3":
        norm = math.sqrt(x * x + y * y + z * z)
        if norm == 0.0 or not math.isfinite(norm):
            raise InvalidArgumentError(f"Cannot normalize ({x}, {y}, {z})")
        return cls(x / norm, y / norm, z / norm)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "UnitVector3":
        if len(values) != 3:
            raise InvalidArgumentError(f"Expected 3 components, got {len(values)}")
        return cls.from_components(float(values[0]), float(values[1]), float(values[2]))

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "UnitVector3":
        """Polar angle theta from +z, azimuth phi from +x (radians)"""
        return cls.from_components(
            math.sin(theta) * math.cos(phi),
            math.sin(theta) * math.sin(phi),
            math.cos(theta),
        )

    @classmethod
    def equatorial(cls, degrees: float) -> "UnitVector3":
        """Vector in the xy-plane at the given azimuth"""
        phi = math.radians(degrees)
        return cls.from_components(math.cos(phi), math.sin(phi), 0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def as_list(self) -> List[float]:
        return [self.x, self.y, self.z]

    def __neg__(self) -> "UnitVector3":
        return UnitVector3(-self.x, -self.y, -self.z)


E_X = UnitVector3(1.0, 0.0, 0.0)
E_Y = UnitVector3(0.0, 1.0, 0.0)
E_Z = UnitVector3(0.0, 0.0, 1.0)


def dot(p: UnitVector3, q: UnitVector3) -> float:
    """Inner product of two unit vectors, clamped to [-1, 1]"""
    return clamp(p.x * q.x + p.y * q.y + p.z * q.z, -1.0, 1.0)


def angle_between(p: UnitVector3, q: UnitVector3) -> float:
    """Angle in radians; stable for nearly parallel vectors"""
    cross = np.cross(p.as_array(), q.as_array())
    return math.atan2(float(np.linalg.norm(cross)), p.x * q.x + p.y * q.y + p.z * q.z)


def as_matrix(vectors: Sequence[UnitVector3]) -> np.ndarray:
    """Stack vectors into an (n, 3) array"""
    return np.array([v.as_list() for v in vectors], dtype=float).reshape(-1, 3)


@dataclass(frozen=True)
class QuadratureScheme:
    """Nodes and weights for the normalized measure du/4pi"""
    nodes: np.ndarray  # shape (n, 3)
    weights: np.ndarray  # shape (n,)
    name: str = "custom"
    accuracy: float = field(default=0.0, compare=False)  # declared error for |u.w|-type integrands

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 3:
            raise InvalidArgumentError(f"Nodes must have shape (n, 3), got {nodes.shape}")
        if len(nodes) < 2 or len(weights) != len(nodes):
            raise InvalidArgumentError("A scheme needs at least 2 nodes and one weight per node")
        if np.any(weights < 0):
            raise InvalidArgumentError("Quadrature weights must be non-negative")
        if abs(math.fsum(weights) - 1.0) > settings.tolerances.normalization:
            raise InvalidArgumentError(f"Weights sum to {math.fsum(weights)}, not 1")
        norms = np.linalg.norm(nodes, axis=1)
        if np.max(np.abs(norms - 1.0)) > settings.tolerances.normalization:
            raise InvalidArgumentError("Quadrature nodes must be unit vectors")
        nodes.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.nodes)

    def node_vectors(self) -> List[UnitVector3]:
        return [UnitVector3(*row) for row in self.nodes.tolist()]


def _declared_accuracy(n: int) -> float:
    # Configured tolerances at n=1e3 and n=1e5, interpolated as a power law in between
    tol = settings.tolerances
    if n <= 1000:
        return tol.quadrature * (1000.0 / n) ** 0.5
    slope = math.log(tol.quadrature_fine / tol.quadrature) / math.log(100.0)
    return tol.quadrature * (n / 1000.0) ** slope


def fibonacci_grid(n: int) -> QuadratureScheme:
    """Deterministic Fibonacci lattice with uniform weights 1/n"""
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise InvalidArgumentError(f"fibonacci_grid needs n >= 2, got {n!r}")
    indices = np.arange(n, dtype=float) + 0.5
    polar = np.arccos(1.0 - 2.0 * indices / n)
    azimuth = 2.0 * np.pi * indices / GOLDEN_RATIO
    nodes = np.column_stack((
        np.cos(azimuth) * np.sin(polar),
        np.sin(azimuth) * np.sin(polar),
        np.cos(polar),
    ))
    nodes /= np.linalg.norm(nodes, axis=1)[:, None]
    return QuadratureScheme(
        nodes=nodes,
        weights=np.full(n, 1.0 / n),
        name=f"fibonacci-{n}",
        accuracy=_declared_accuracy(n),
    )


def random_unit_vectors(count: int, seed: int) -> np.ndarray:
    """Seeded isotropic sample, shape (count, 3)"""
    if count < 1:
        raise InvalidArgumentError(f"count must be positive, got {count}")
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal((count, 3))
    norms = np.linalg.norm(samples, axis=1)
    # Gaussian vectors of zero norm have probability zero; redraw just in case
    while np.any(norms == 0.0):
        bad = norms == 0.0
        samples[bad] = rng.standard_normal((int(bad.sum()), 3))
        norms = np.linalg.norm(samples, axis=1)
    return samples / norms[:, None]


def monte_carlo_grid(n: int, seed: int) -> QuadratureScheme:
    """Seeded Monte Carlo scheme, for statistical cross-checks of the lattice"""
    if n < 2:
        raise InvalidArgumentError(f"monte_carlo_grid needs n >= 2, got {n!r}")
    return QuadratureScheme(
        nodes=random_unit_vectors(n, seed),
        weights=np.full(n, 1.0 / n),
        name=f"monte-carlo-{n}-seed{seed}",
        accuracy=3.0 / math.sqrt(n),
    )


Integrand = Union[Callable[[UnitVector3], float], Callable[[np.ndarray], np.ndarray]]


def integrate_sphere(f: Integrand, scheme: QuadratureScheme, vectorized: bool = False) -> float:
    """
    Sum_k weight_k * f(node_k)

    With vectorized=True, f receives the whole (n, 3) node array and returns n values.
    """
    if vectorized:
        values = np.asarray(f(scheme.nodes), dtype=float).reshape(-1)
        if values.shape[0] != len(scheme):
            raise InvalidArgumentError(
                f"Vectorized integrand returned {values.shape[0]} values for {len(scheme)} nodes"
            )
    else:
        values = np.array([float(f(node)) for node in scheme.node_vectors()])

    if not np.all(np.isfinite(values)):
        bad = int(np.flatnonzero(~np.isfinite(values))[0])
        raise NumericDomainError(f"Integrand is not finite at node {bad}: {scheme.nodes[bad].tolist()}")

    # Compensated summation keeps the result independent of evaluation order
    return math.fsum((scheme.weights * values).tolist())


def half_norm_identity(a: UnitVector3, b: UnitVector3, sign: int) -> float:
    """Closed form of the integral of |u.(a + sign*b)| du/4pi: sqrt((1 + sign*a.b)/2)"""
    if sign not in (1, -1):
        raise InvalidArgumentError(f"sign must be +1 or -1, got {sign!r}")
    argument = clamp((1.0 + sign * dot(a, b)) / 2.0, 0.0, 1.0)
    return math.sqrt(argument)
