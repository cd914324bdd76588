"""Fundamental quadrics, their intrinsic charts and embeddings.

A quadric is the level set  e_xi xi^2 + e_eta eta^2 + e_zeta zeta^2 = e R^2
inside flat 3-space with metric  e_xi dxi^2 + e_eta deta^2 + e_zeta dzeta^2.
Depending on the four signs this is a sphere, a single-sheet hyperboloid or
a two-sheet hyperboloid, always of constant Gaussian curvature e / R^2.
The module also provides the Beltrami disk (where geodesics are straight
chords), its single-sheet companion, conformally flat charts, ambient
isometries, geodesic triangles, and Minding's tractrix surface.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import ad
from .errors import (
    DomainError,
    ForbiddenQuadricError,
    IndefiniteMetricError,
    NotIsometryError,
    ShootingError,
)
from .tensor import (
    Chart,
    _integrate_batch,
    geodesic_integrate,
    metric_grid,
    require_domain,
)

POLAR_MARGIN = 1e-9   # excludes sinh(chi) = 0 and sin(theta) = 0 loci
CUSP_MARGIN = 1e-6    # excludes the tractrix cusp

__all__ = [
    "QuadricSpec", "QuadricClass", "Topology", "Triangle",
    "classify", "hyperbolic_chart", "embed_point", "unembed_point",
    "embedding_fn", "ambient_metric_signs", "antipodal_point",
    "beltrami_metric", "beltrami2_metric", "stereographic_to_beltrami",
    "beltrami_lift", "beltrami_project", "beltrami_distance",
    "conformally_flat_chart", "ambient_isometry_apply", "induced_chart_map",
    "excess_angle", "tractrix_point", "minding_chart",
    "pullback_metric",
]


class Topology(enum.Enum):
    SPHERE = "Sphere"
    ONE_SHEET = "OneSheet"
    TWO_SHEET = "TwoSheet"


@dataclass(frozen=True)
class QuadricSpec:
    """Signs (e_xi, e_eta, e_zeta, e) and radius of a fundamental quadric."""

    eps_xi: int
    eps_eta: int
    eps_zeta: int
    eps: int
    radius: float = 1.0

    def __post_init__(self):
        for s in (self.eps_xi, self.eps_eta, self.eps_zeta, self.eps):
            if s not in (-1, 1):
                raise ValueError("signs must be +1 or -1")
        ambient = (self.eps_xi, self.eps_eta, self.eps_zeta)
        if ambient == (1, 1, 1) and self.eps == -1:
            raise ForbiddenQuadricError("(+++,-) has no real points")
        if ambient == (-1, -1, -1) and self.eps == 1:
            raise ForbiddenQuadricError("(---,+) has no real points")
        if not self.radius > 0:
            raise ValueError("radius must be positive")

    @property
    def ambient_signs(self) -> tuple:
        return (self.eps_xi, self.eps_eta, self.eps_zeta)

    @property
    def pattern(self) -> str:
        s = {1: "+", -1: "-"}
        return "".join(s[e] for e in self.ambient_signs) + "," + s[self.eps]


@dataclass(frozen=True)
class QuadricClass:
    topology: Topology
    induced_signature: tuple
    K: float


@dataclass(frozen=True)
class Triangle:
    """Three pairwise distinct vertices in a 2D chart."""

    a: tuple
    b: tuple
    c: tuple

    def __post_init__(self):
        vs = [tuple(map(float, v)) for v in (self.a, self.b, self.c)]
        for i in range(3):
            if np.allclose(vs[i], vs[(i + 1) % 3]):
                raise ValueError("triangle vertices must be pairwise distinct")
        object.__setattr__(self, "a", vs[0])
        object.__setattr__(self, "b", vs[1])
        object.__setattr__(self, "c", vs[2])

    @property
    def vertices(self):
        return (self.a, self.b, self.c)


def _axis_index(q: QuadricSpec) -> int:
    """Coordinate singled out by the parametrization (pole / revolution axis)."""
    signs = q.ambient_signs
    if len(set(signs)) == 1:
        return 2
    plus = signs.count(1)
    minority = 1 if plus == 1 else -1
    return signs.index(minority)


def classify(q: QuadricSpec) -> QuadricClass:
    """Topology, induced signature and curvature K = e / R^2 of a quadric."""
    K = q.eps / q.radius ** 2
    signs = q.ambient_signs
    if len(set(signs)) == 1:
        return QuadricClass(Topology.SPHERE, (q.eps, q.eps), K)
    minority = 1 if signs.count(1) == 1 else -1
    if q.eps == minority:
        return QuadricClass(Topology.TWO_SHEET, (-q.eps, -q.eps), K)
    # signature in the chart's (chi, phi) coordinate order
    return QuadricClass(Topology.ONE_SHEET, (-q.eps, q.eps), K)


def hyperbolic_chart(q: QuadricSpec) -> Chart:
    """Intrinsic chart of a quadric in hyperbolic (or spherical) variables.

    Single sheet:  ds^2 = e R^2 (-dchi^2 + cosh^2 chi dphi^2)
    Two sheet:     ds^2 = e R^2 (-dchi^2 - sinh^2 chi dphi^2)
    Sphere:        ds^2 = e R^2 ( dtheta^2 + sin^2 theta dphi^2)
    """
    cls = classify(q)
    e, R2 = q.eps, q.radius ** 2

    if cls.topology is Topology.SPHERE:
        def metric(coords):
            th, ph = coords
            s = ad.sin(th)
            return [[e * R2, 0.0], [0.0, e * R2 * s * s]]

        def domain(coords):
            th, ph = coords
            th = np.asarray(th)
            return (np.abs(np.sin(th)) > POLAR_MARGIN) & (ph >= 0.0) & (ph < 2 * np.pi)

        return Chart(f"quadric:{q.pattern}", 2, metric, domain, (e, e))

    if cls.topology is Topology.ONE_SHEET:
        def metric(coords):
            chi, ph = coords
            c = ad.cosh(chi)
            return [[-e * R2, 0.0], [0.0, e * R2 * c * c]]

        def domain(coords):
            chi, ph = coords
            return (np.isfinite(np.asarray(chi, float))) & (ph >= 0.0) & (ph < 2 * np.pi)

        return Chart(f"quadric:{q.pattern}", 2, metric, domain, (-e, e))

    def metric(coords):
        chi, ph = coords
        s = ad.sinh(chi)
        return [[-e * R2, 0.0], [0.0, -e * R2 * s * s]]

    def domain(coords):
        chi, ph = coords
        chi = np.asarray(chi)
        return (np.abs(np.sinh(chi)) > POLAR_MARGIN) & (ph >= 0.0) & (ph < 2 * np.pi)

    return Chart(f"quadric:{q.pattern}", 2, metric, domain, (-e, -e))


def ambient_metric_signs(q: QuadricSpec) -> np.ndarray:
    return np.array(q.ambient_signs, dtype=float)


def embedding_fn(q: QuadricSpec):
    """Map (chart coords) -> (xi, eta, zeta); works on jets and arrays."""
    cls = classify(q)
    axis = _axis_index(q)
    pair = [i for i in range(3) if i != axis]
    R = q.radius

    if cls.topology is Topology.SPHERE:
        def fn(coords):
            th, ph = coords
            out = [None, None, None]
            out[axis] = R * ad.cos(th)
            out[pair[0]] = R * ad.sin(th) * ad.cos(ph)
            out[pair[1]] = R * ad.sin(th) * ad.sin(ph)
            return out
    elif cls.topology is Topology.TWO_SHEET:
        def fn(coords):
            chi, ph = coords
            out = [None, None, None]
            out[axis] = R * ad.cosh(chi)          # zeta > 0 sheet by convention
            out[pair[0]] = R * ad.sinh(chi) * ad.cos(ph)
            out[pair[1]] = R * ad.sinh(chi) * ad.sin(ph)
            return out
    else:
        def fn(coords):
            chi, ph = coords
            out = [None, None, None]
            out[axis] = R * ad.sinh(chi)
            out[pair[0]] = R * ad.cosh(chi) * ad.cos(ph)
            out[pair[1]] = R * ad.cosh(chi) * ad.sin(ph)
            return out
    return fn


def embed_point(q: QuadricSpec, chart_coords) -> tuple:
    """Ambient (xi, eta, zeta) of a chart point; lands on the quadric."""
    chart = hyperbolic_chart(q)
    require_domain(chart, chart_coords)
    vals = embedding_fn(q)([np.asarray(c, float) for c in chart_coords])
    return tuple(float(np.real(v)) for v in vals)


def unembed_point(q: QuadricSpec, xyz):
    """Chart coordinates of an ambient point on the quadric."""
    cls = classify(q)
    axis = _axis_index(q)
    pair = [i for i in range(3) if i != axis]
    R = q.radius
    x = list(xyz)
    if cls.topology is Topology.SPHERE:
        th = ad.arccos(x[axis] / R)
        ph = ad.arctan2(x[pair[1]], x[pair[0]])
        return th, ph
    if cls.topology is Topology.TWO_SHEET:
        chi = ad.arccosh(x[axis] / R)
        ph = ad.arctan2(x[pair[1]], x[pair[0]])
        return chi, ph
    chi = ad.arcsinh(x[axis] / R)
    ph = ad.arctan2(x[pair[1]], x[pair[0]])
    return chi, ph


def quadric_residual(q: QuadricSpec, xyz) -> float:
    s = ambient_metric_signs(q)
    x = np.asarray([np.real(v) for v in xyz], dtype=float)
    return float(abs(np.dot(s, x * x) - q.eps * q.radius ** 2))


def antipodal_point(xyz) -> tuple:
    """Ambient antipodal map identifying (xi,eta,zeta) with its negative."""
    return tuple(-np.asarray(xyz, dtype=float))


# ---------------------------------------------------------------------------
# Beltrami disk and companions
# ---------------------------------------------------------------------------

def beltrami_metric(R: float = 1.0) -> Chart:
    """Beltrami's disk metric on u^2 + v^2 < R^2 (curvature -1/R^2)."""
    R2 = R * R

    def metric(coords):
        u, v = coords
        D = R2 - u * u - v * v
        W = 1.0 / (D * D)
        return [[R2 * (R2 - v * v) * W, R2 * u * v * W],
                [R2 * u * v * W, R2 * (R2 - u * u) * W]]

    def domain(coords):
        u, v = coords
        return u * u + v * v < R2

    return Chart("beltrami", 2, metric, domain, (1, 1))


def beltrami2_metric(R: float = 1.0) -> Chart:
    """Second Beltrami metric, on the region v^2 - u^2 < R^2."""
    R2 = R * R

    def metric(coords):
        u, v = coords
        D = R2 + u * u - v * v
        W = 1.0 / (D * D)
        return [[R2 * (v * v - R2) * W, -R2 * u * v * W],
                [-R2 * u * v * W, R2 * (u * u + R2) * W]]

    def domain(coords):
        u, v = coords
        return v * v - u * u < R2

    return Chart("beltrami2", 2, metric, domain, (-1, 1))


def stereographic_to_beltrami(chi, phi, R: float = 1.0):
    """Projection of the two-sheet chart into the disk: u = R tanh(chi) cos(phi)."""
    t = ad.tanh(chi)
    return R * t * ad.cos(phi), R * t * ad.sin(phi)


def beltrami_lift(u, v, R: float = 1.0):
    """Disk point -> quadric point with zeta = R^2 / sqrt(R^2 - u^2 - v^2)."""
    w = ad.sqrt(R * R - u * u - v * v)
    return R * u / w, R * v / w, R * R / w


def beltrami_project(xi, eta, zeta, R: float = 1.0):
    """Central projection of the zeta > 0 sheet onto the disk."""
    return R * xi / zeta, R * eta / zeta


def beltrami_distance(R: float, u: float) -> float:
    """Geodesic distance from the center to (u, 0): R artanh(u/R)."""
    return R * float(np.arctanh(u / R))


def conformally_flat_chart(q: QuadricSpec) -> Chart:
    """Chart with ds^2 = (e1 du^2 + e2 dv^2) / (1 + (e/4R^2)(e1 u^2 + e2 v^2))^2."""
    cls = classify(q)
    e = q.eps
    if cls.topology is Topology.SPHERE:
        e1 = e2 = e
    elif cls.topology is Topology.TWO_SHEET:
        e1 = e2 = -e
    else:
        e1, e2 = e, -e
    R2 = q.radius ** 2

    def metric(coords):
        u, v = coords
        den = 1.0 + (e / (4.0 * R2)) * (e1 * u * u + e2 * v * v)
        W = 1.0 / (den * den)
        return [[e1 * W, 0.0], [0.0, e2 * W]]

    def domain(coords):
        u, v = coords
        den = 1.0 + (e / (4.0 * R2)) * (e1 * np.asarray(u) ** 2 + e2 * np.asarray(v) ** 2)
        return np.abs(den) > 1e-9

    return Chart(f"conformal:{q.pattern}", 2, metric, domain, (e1, e2))


# ---------------------------------------------------------------------------
# ambient isometries
# ---------------------------------------------------------------------------

def ambient_isometry_apply(q: QuadricSpec, L, point) -> tuple:
    """Apply a pseudo-orthogonal 3x3 matrix to an ambient quadric point."""
    L = np.asarray(L, dtype=float)
    G = np.diag(ambient_metric_signs(q))
    if np.max(np.abs(L.T @ G @ L - G)) > 1e-10:
        raise NotIsometryError("L^T G L != G for the ambient metric")
    if quadric_residual(q, point) > 1e-8:
        raise DomainError("point does not lie on the quadric")
    return tuple(L @ np.asarray(point, dtype=float))


def induced_chart_map(q: QuadricSpec, L):
    """Chart-level map unembed . L . embed, usable on jets."""
    emb = embedding_fn(q)
    L = np.asarray(L, dtype=float)

    def mapped(coords):
        x = emb(coords)
        y = [L[i, 0] * x[0] + L[i, 1] * x[1] + L[i, 2] * x[2] for i in range(3)]
        return unembed_point(q, y)

    return mapped


def pullback_metric(target_chart: Chart, chart_map, point) -> np.ndarray:
    """Components of (chart_map)^* g_target at `point` via exact jets."""
    pts = np.atleast_2d(np.asarray(point, dtype=float))
    coords = ad.Jet.variables(pts, order=1)
    image = chart_map(coords)
    vals = np.array([[np.real(c.val[0]) for c in image]], dtype=float)
    J = np.array([c.grad[0] for c in image])  # (m_out, n_in)
    g = metric_grid(target_chart, np.atleast_2d(vals))[0]
    return J.T @ g @ J


def pullback_ambient(embedding, signs, point) -> np.ndarray:
    """Pullback of a diagonal ambient metric through an embedding map."""
    pts = np.atleast_2d(np.asarray(point, dtype=float))
    coords = ad.Jet.variables(pts, order=1)
    image = embedding(coords)
    J = np.array([c.grad[0] for c in image])  # (m_out, n_in)
    G = np.diag(np.asarray(signs, dtype=float))
    return J.T @ G @ J


# ---------------------------------------------------------------------------
# geodesic triangles: angles and areas
# ---------------------------------------------------------------------------

def _definite_sign(chart: Chart, point) -> float:
    g = metric_grid(chart, np.atleast_2d(np.asarray(point, float)))[0].real
    ev = np.linalg.eigvalsh(0.5 * (g + g.T))
    if np.all(ev > 0):
        return 1.0
    if np.all(ev < 0):
        return -1.0
    raise IndefiniteMetricError(
        f"chart '{chart.name}' is indefinite; angles are not defined")


def _orthonormal_frame(chart: Chart, point, sign: float) -> np.ndarray:
    g = sign * metric_grid(chart, np.atleast_2d(np.asarray(point, float)))[0].real
    Lc = np.linalg.cholesky(0.5 * (g + g.T))
    return np.linalg.inv(Lc).T  # columns e_i with g(e_i, e_j) = delta_ij


def _shoot(chart: Chart, A, B, sign: float, steps: int = 160, tol: float = 1e-11,
           max_iter: int = 40):
    """Initial angle and arc length of the geodesic from A to B."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    frame = _orthonormal_frame(chart, A, sign)
    gA = metric_grid(chart, np.atleast_2d(A))[0].real

    chord = B - A
    nrm = float(np.sqrt(abs(chord @ (sign * gA) @ chord)))
    coef = np.linalg.solve(frame, chord / nrm)
    theta = float(np.arctan2(coef[1], coef[0]))
    s = nrm
    scale = max(nrm, 1e-6)

    for _ in range(max_iter):
        h = 1e-7 * scale
        params = np.array([[theta, s], [theta + 1e-7, s], [theta, s + h]])
        th = params[:, 0]
        ss = params[:, 1]
        V = (frame @ np.stack([np.cos(th), np.sin(th)])).T * ss[:, None]
        X0 = np.repeat(A[None, :], 3, axis=0)
        _, X, _, nv = _integrate_batch(chart, X0, V, 1.0, steps)
        if np.any(nv < steps + 1):
            raise ShootingError("geodesic left the chart domain while shooting")
        F = X[-1] - B[None, :]
        if np.max(np.abs(F[0])) < tol * scale:
            return theta, s
        Jac = np.column_stack([(F[1] - F[0]) / 1e-7, (F[2] - F[0]) / h])
        try:
            delta = np.linalg.solve(Jac, -F[0])
        except np.linalg.LinAlgError as exc:
            raise ShootingError("singular shooting Jacobian") from exc
        step_limit = 0.9
        delta = np.clip(delta, [-step_limit, -step_limit * scale],
                        [step_limit, step_limit * scale])
        theta += float(delta[0])
        s += float(delta[1])
        if s <= 0:
            s = 0.1 * scale
    raise ShootingError(f"no convergence from {tuple(A)} to {tuple(B)}")


_TRI_POINTS = np.array([
    [1 / 3, 1 / 3],
    [(6 + np.sqrt(15)) / 21, (6 + np.sqrt(15)) / 21],
    [(6 + np.sqrt(15)) / 21, (9 - 2 * np.sqrt(15)) / 21],
    [(9 - 2 * np.sqrt(15)) / 21, (6 + np.sqrt(15)) / 21],
    [(6 - np.sqrt(15)) / 21, (6 - np.sqrt(15)) / 21],
    [(6 - np.sqrt(15)) / 21, (9 + 2 * np.sqrt(15)) / 21],
    [(9 + 2 * np.sqrt(15)) / 21, (6 - np.sqrt(15)) / 21],
])
_TRI_WEIGHTS = np.array(
    [9 / 40]
    + [(155 + np.sqrt(15)) / 1200] * 3
    + [(155 - np.sqrt(15)) / 1200] * 3)


def _polygon_area(chart: Chart, polygon: np.ndarray, sign: float) -> float:
    """Integral of sqrt|det g| over the region bounded by `polygon`.

    Fan triangulation from the centroid with a degree-5 quadrature per
    sub-triangle; signed sub-areas make slight edge concavity harmless.
    """
    centroid = polygon.mean(axis=0)
    total = 0.0
    m = len(polygon)
    p1s = polygon
    p2s = np.roll(polygon, -1, axis=0)
    e1 = p1s - centroid
    e2 = p2s - centroid
    signed = 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
    for lam, w in zip(_TRI_POINTS, _TRI_WEIGHTS):
        pts = centroid + lam[0] * e1 + lam[1] * e2
        g = metric_grid(chart, pts).real
        dets = np.sqrt(np.abs(np.linalg.det(g)))
        total += 2.0 * w * float(np.sum(signed * dets))
    return abs(total)


def excess_angle(chart: Chart, tri: Triangle) -> tuple:
    """Angle excess alpha + beta + gamma - pi and area of a geodesic triangle.

    Sides are shot numerically; angles come from metric inner products of
    the side tangents at each vertex; the area integrates sqrt|det g| over
    the region enclosed by the sides.  Only definite 2D charts qualify.
    """
    if chart.dim != 2:
        raise IndefiniteMetricError("geodesic triangles need a 2D chart")
    for v in tri.vertices:
        require_domain(chart, v)
    sign = _definite_sign(chart, tri.a)

    verts = [np.asarray(v, float) for v in tri.vertices]
    sides = {}
    tangents = {}
    curves = []
    steps = 220
    for i in range(3):
        j = (i + 1) % 3
        A, B = verts[i], verts[j]
        theta, s = _shoot(chart, A, B, sign)
        frame = _orthonormal_frame(chart, A, sign)
        V = frame @ np.array([np.cos(theta), np.sin(theta)]) * s
        traj = geodesic_integrate(chart, A, V, 1.0, steps)
        X = traj.points()
        Vl = traj.velocities()
        tangents[(i, j)] = Vl[0]
        tangents[(j, i)] = -Vl[-1]
        curves.append(X)

    def angle(i, j, k):
        g = sign * metric_grid(chart, np.atleast_2d(verts[i]))[0].real
        t1, t2 = tangents[(i, j)], tangents[(i, k)]
        c = (t1 @ g @ t2) / np.sqrt((t1 @ g @ t1) * (t2 @ g @ t2))
        return float(np.arccos(np.clip(c, -1.0, 1.0)))

    alpha = angle(0, 1, 2)
    beta = angle(1, 2, 0)
    gamma = angle(2, 0, 1)
    excess = alpha + beta + gamma - np.pi

    polygon = np.vstack([c[:-1] for c in curves])
    area = _polygon_area(chart, polygon, sign)
    return float(excess), float(area)


# ---------------------------------------------------------------------------
# tractrix / Minding surface
# ---------------------------------------------------------------------------

def tractrix_point(chi, R: float = 1.0):
    """Profile curve xi = R / cosh(chi), zeta = R (chi - tanh(chi))."""
    return R / ad.cosh(chi), R * (chi - ad.tanh(chi))


def minding_chart(R: float = 1.0) -> Chart:
    """Surface of revolution of the tractrix; K = -1/R^2 away from the cusp.

    Metric ds^2 = R^2 (tanh^2 chi dchi^2 + cosh^-2 chi dphi^2).
    """
    R2 = R * R

    def metric(coords):
        chi, ph = coords
        t = ad.tanh(chi)
        c = ad.cosh(chi)
        return [[R2 * t * t, 0.0], [0.0, R2 / (c * c)]]

    def domain(coords):
        chi, ph = coords
        return (np.abs(np.asarray(chi)) >= CUSP_MARGIN) & (ph >= 0.0) & (ph < 2 * np.pi)

    return Chart("minding", 2, metric, domain, (1, 1))
