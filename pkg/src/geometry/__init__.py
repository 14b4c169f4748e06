"""
Geometry module exports
"""

from .sphere import (
    E_X,
    E_Y,
    E_Z,
    QuadratureScheme,
    UnitVector3,
    angle_between,
    as_matrix,
    clamp,
    dot,
    fibonacci_grid,
    half_norm_identity,
    integrate_sphere,
    monte_carlo_grid,
    random_unit_vectors,
)

__all__ = [
    "E_X",
    "E_Y",
    "E_Z",
    "QuadratureScheme",
    "UnitVector3",
    "angle_between",
    "as_matrix",
    "clamp",
    "dot",
    "fibonacci_grid",
    "half_norm_identity",
    "integrate_sphere",
    "monte_carlo_grid",
    "random_unit_vectors",
]
