"""Exception types shared across the package."""


class PslabError(Exception):
    """Base class for all library errors."""


class DomainError(PslabError):
    """A coordinate tuple lies outside a chart's domain."""


class SingularMetricError(PslabError):
    """Metric determinant below the invertibility threshold (1e-12)."""


class DimensionError(PslabError):
    """Operation requires a chart of a different dimension."""


class ShapeError(PslabError):
    """Tensor argument has the wrong shape or symmetry."""


class ForbiddenQuadricError(PslabError):
    """Sign pattern (+++,-) or (---,+) defines an empty quadric."""


class NotIsometryError(PslabError):
    """Matrix does not preserve the ambient metric."""


class IndefiniteMetricError(PslabError):
    """Angle-based operation requested on an indefinite metric."""


class SpeedLimitError(PslabError):
    """Speed at or above the speed of light (c = 1)."""


class UnknownCheckError(PslabError):
    """Verification check name is not registered."""


class ShootingError(PslabError):
    """Geodesic boundary-value solve failed to converge."""
