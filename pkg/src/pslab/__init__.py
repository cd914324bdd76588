"""Numerical pseudosphere laboratory.

Evaluates the exact metrics, embeddings, tetrads and field-equation
identities of constant-curvature geometry: the Beltrami disk and its
fundamental quadrics, special-relativistic kinematics on the mass shell,
de Sitter cosmology, the Bertotti-Robinson Einstein-Maxwell universes with
their self-dual/Kahler structure, and the near-horizon and dilaton
constructions -- all checked to floating-point tolerance by a registered
verification suite (`pslab verify`).
"""

from .errors import (
    DimensionError,
    DomainError,
    ForbiddenQuadricError,
    IndefiniteMetricError,
    NotIsometryError,
    PslabError,
    ShapeError,
    ShootingError,
    SingularMetricError,
    SpeedLimitError,
    UnknownCheckError,
)
from .tensor import (
    LOWER,
    UPPER,
    Chart,
    TensorValue,
    Trajectory,
    christoffel,
    covariant_derivative,
    eval_metric,
    exterior_derivative,
    gaussian_curvature,
    geodesic_integrate,
    hodge_dual,
    ricci,
    riemann,
    scalar_curvature,
)

__version__ = "0.1.0"
