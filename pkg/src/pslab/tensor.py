"""Metric charts and the numerical curvature kernel.

Every geometric object here is derived from a chart's metric component
function by second-order forward jets (:mod:`pslab.ad`), so all derivatives
entering Christoffel symbols and curvature tensors are exact to rounding.

Sign conventions, fixed once and asserted by the constant-curvature test
suite:

* Riemann:  R^r_{smn} = d_m Gamma^r_{ns} - d_n Gamma^r_{ms}
  + Gamma^r_{ml} Gamma^l_{ns} - Gamma^r_{nl} Gamma^l_{ms};
  all-lower version lowers the first index.  With this choice a space of
  constant curvature K satisfies R_ijkl = K (g_ik g_jl - g_il g_jk) and
  R_ij = K g_ij, and the Gaussian curvature is half the scalar curvature.
* Orientation: the Levi-Civita symbol has eps_0123 = +1 in the chart's
  coordinate order.
* 4D spacetimes carry signature (+---).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .ad import Jet
from .errors import (
    DimensionError,
    DomainError,
    ShapeError,
    SingularMetricError,
)

UPPER = "upper"
LOWER = "lower"

DET_FLOOR = 1e-12

__all__ = [
    "UPPER", "LOWER", "Chart", "TensorValue", "Trajectory",
    "eval_metric", "christoffel", "riemann", "ricci",
    "scalar_curvature", "gaussian_curvature",
    "geodesic_integrate", "covariant_derivative",
    "hodge_dual", "exterior_derivative",
    "metric_grid", "ricci_grid", "scalar_curvature_grid",
    "levi_civita_symbol", "scale_chart",
]


@dataclass(frozen=True)
class Chart:
    """A named coordinate patch with a metric and a domain predicate.

    ``metric_fn`` maps a sequence of coordinate values (plain arrays or
    :class:`~pslab.ad.Jet` objects, one entry per coordinate) to the nested
    ``dim x dim`` matrix of metric components.  ``domain_fn`` takes the same
    sequence of real coordinate arrays and returns a boolean (array).
    """

    name: str
    dim: int
    metric_fn: Callable
    domain_fn: Callable
    signature: tuple


@dataclass(frozen=True)
class TensorValue:
    """Dense complex components with per-index variance at a point."""

    components: np.ndarray
    variances: tuple
    point: tuple

    def __post_init__(self):
        comps = np.asarray(self.components)
        if comps.ndim != len(self.variances):
            raise ShapeError(
                f"rank {comps.ndim} does not match {len(self.variances)} variances")
        if comps.ndim and len(set(comps.shape)) > 1:
            raise ShapeError(f"mixed index extents {comps.shape}")
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "variances", tuple(self.variances))
        object.__setattr__(self, "point", tuple(self.point))

    @property
    def rank(self) -> int:
        return len(self.variances)


@dataclass(frozen=True)
class Trajectory:
    """Ordered geodesic samples ``(lambda, coordinates, velocity)``."""

    samples: tuple
    hit_boundary: bool = False

    def lambdas(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    def points(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])

    def velocities(self) -> np.ndarray:
        return np.array([s[2] for s in self.samples])


# ---------------------------------------------------------------------------
# domain and metric evaluation
# ---------------------------------------------------------------------------

def _as_batch(point) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(point, dtype=float))
    return pts


def in_domain(chart: Chart, pts: np.ndarray) -> np.ndarray:
    cols = [pts[:, i] for i in range(chart.dim)]
    ok = chart.domain_fn(cols)
    return np.broadcast_to(np.asarray(ok, dtype=bool), (pts.shape[0],))


def require_domain(chart: Chart, point) -> np.ndarray:
    pts = _as_batch(point)
    if pts.shape[1] != chart.dim:
        raise DimensionError(
            f"chart '{chart.name}' has dimension {chart.dim}, got point of length {pts.shape[1]}")
    ok = in_domain(chart, pts)
    if not np.all(ok):
        bad = pts[~ok][0]
        raise DomainError(f"point {tuple(bad)} outside domain of chart '{chart.name}'")
    return pts


def _metric_entries(chart: Chart, coords):
    rows = chart.metric_fn(coords)
    return rows


def metric_grid(chart: Chart, pts: np.ndarray) -> np.ndarray:
    """Metric components g (B, n, n) on a batch of in-domain points."""
    pts = require_domain(chart, pts)
    B, n = pts.shape
    cols = [np.asarray(pts[:, i], dtype=complex) for i in range(n)]
    rows = _metric_entries(chart, cols)
    g = np.zeros((B, n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            g[:, i, j] = rows[i][j]
    return g


def _metric_jets(chart: Chart, pts: np.ndarray, order: int = 2):
    """g, dg, d2g arrays from one jet evaluation of the metric.

    dg[b, m, i, j] = d_m g_ij ; d2g[b, m, p, i, j] = d_m d_p g_ij.
    """
    B, n = pts.shape
    coords = Jet.variables(pts, order=order)
    rows = _metric_entries(chart, coords)
    g = np.zeros((B, n, n), dtype=complex)
    dg = np.zeros((B, n, n, n), dtype=complex)
    d2g = np.zeros((B, n, n, n, n), dtype=complex) if order == 2 else None
    for i in range(n):
        for j in range(n):
            e = rows[i][j]
            if isinstance(e, Jet):
                g[:, i, j] = e.val
                dg[:, :, i, j] = e.grad
                if order == 2:
                    d2g[:, :, :, i, j] = e.hess
            else:
                g[:, i, j] = e
    return g, dg, d2g


def _inverse(g: np.ndarray, chart_name: str) -> np.ndarray:
    det = np.linalg.det(g)
    if np.any(np.abs(det) < DET_FLOOR):
        raise SingularMetricError(
            f"|det g| < {DET_FLOOR:g} on chart '{chart_name}'")
    return np.linalg.inv(g)


def _christoffel_arrays(g, dg, chart_name):
    ginv = _inverse(g, chart_name)
    T = (np.einsum("bijl->blij", dg) + np.einsum("bjil->blij", dg) - dg)
    gamma = 0.5 * np.einsum("bkl,blij->bkij", ginv, T)
    return ginv, T, gamma


def _riemann_arrays(chart: Chart, pts: np.ndarray):
    g, dg, d2g = _metric_jets(chart, pts, order=2)
    ginv, T, gamma = _christoffel_arrays(g, dg, chart.name)
    dginv = -np.einsum("bka,bmac,bcl->bmkl", ginv, dg, ginv)
    dT = (np.einsum("bmijl->bmlij", d2g) + np.einsum("bmjil->bmlij", d2g) - d2g)
    dgamma = 0.5 * (np.einsum("bmkl,blij->bmkij", dginv, T)
                    + np.einsum("bkl,bmlij->bmkij", ginv, dT))
    riem = (np.einsum("bmrns->brsmn", dgamma)
            - np.einsum("bnrms->brsmn", dgamma)
            + np.einsum("brml,blns->brsmn", gamma, gamma)
            - np.einsum("brnl,blms->brsmn", gamma, gamma))
    return g, ginv, gamma, riem


def ricci_grid(chart: Chart, pts: np.ndarray):
    """(g, Ricci) arrays over a batch of points."""
    pts = require_domain(chart, pts)
    g, ginv, _, riem = _riemann_arrays(chart, pts)
    ric = np.einsum("baiaj->bij", riem)
    return g, ric


def scalar_curvature_grid(chart: Chart, pts: np.ndarray) -> np.ndarray:
    pts = require_domain(chart, pts)
    g, ginv, _, riem = _riemann_arrays(chart, pts)
    ric = np.einsum("baiaj->bij", riem)
    return np.einsum("bij,bij->b", ginv, ric)


# ---------------------------------------------------------------------------
# point operations
# ---------------------------------------------------------------------------

def eval_metric(chart: Chart, point) -> TensorValue:
    """Metric components at a point (rank 2, lower-lower)."""
    pts = require_domain(chart, point)
    g = metric_grid(chart, pts)[0]
    return TensorValue(g, (LOWER, LOWER), tuple(np.asarray(point, float)))


def christoffel(chart: Chart, point) -> TensorValue:
    """Levi-Civita connection coefficients Gamma^k_ij at a point."""
    pts = require_domain(chart, point)
    g, dg, _ = _metric_jets(chart, pts, order=1)
    _, _, gamma = _christoffel_arrays(g, dg, chart.name)
    return TensorValue(gamma[0], (UPPER, LOWER, LOWER), tuple(np.asarray(point, float)))


def riemann(chart: Chart, point) -> TensorValue:
    """All-lower Riemann tensor R_ijkl at a point."""
    pts = require_domain(chart, point)
    g, _, _, riem = _riemann_arrays(chart, pts)
    low = np.einsum("bia,bajkl->bijkl", g, riem)
    return TensorValue(low[0], (LOWER,) * 4, tuple(np.asarray(point, float)))


def ricci(chart: Chart, point) -> TensorValue:
    pts = require_domain(chart, point)
    _, ric = ricci_grid(chart, pts)
    return TensorValue(ric[0], (LOWER, LOWER), tuple(np.asarray(point, float)))


def scalar_curvature(chart: Chart, point) -> complex:
    pts = require_domain(chart, point)
    return complex(scalar_curvature_grid(chart, pts)[0])


def gaussian_curvature(chart: Chart, point) -> complex:
    """Half the scalar curvature, for any dimension and signature."""
    return scalar_curvature(chart, point) / 2.0


def scale_chart(chart: Chart, alpha: float, name: Optional[str] = None) -> Chart:
    """Chart with metric multiplied by a nonzero constant."""
    if alpha == 0:
        raise ValueError("scale factor must be nonzero")

    def scaled(coords):
        rows = chart.metric_fn(coords)
        return [[rows[i][j] * alpha for j in range(chart.dim)] for i in range(chart.dim)]

    sig = tuple(int(np.sign(alpha)) * s for s in chart.signature)
    return Chart(name or f"{chart.name}*{alpha:g}", chart.dim, scaled,
                 chart.domain_fn, sig)


# ---------------------------------------------------------------------------
# geodesics
# ---------------------------------------------------------------------------

def _geodesic_accel(chart: Chart, X: np.ndarray, V: np.ndarray) -> np.ndarray:
    g, dg, _ = _metric_jets(chart, X, order=1)
    _, _, gamma = _christoffel_arrays(g, dg, chart.name)
    return -np.einsum("bkij,bi,bj->bk", gamma, V, V).real


def _integrate_batch(chart: Chart, X0: np.ndarray, V0: np.ndarray,
                     lam_max: float, steps: int):
    """Fixed-step RK4 for a batch of geodesics.

    Returns (lams, X, V, n_valid) where X, V have shape
    (steps + 1, B, n) and n_valid[b] is the number of valid samples for
    trajectory b (== steps + 1 when the domain was never left).
    """
    B, n = X0.shape
    h = lam_max / steps
    X = np.empty((steps + 1, B, n))
    V = np.empty((steps + 1, B, n))
    X[0], V[0] = X0, V0
    active = np.ones(B, dtype=bool)
    n_valid = np.full(B, steps + 1, dtype=int)

    def rhs(x, v):
        # clamp out-of-domain stage points so the batched solve stays finite
        ok = in_domain(chart, x)
        if not np.all(ok):
            x = np.where(ok[:, None], x, X0)
            v = np.where(ok[:, None], v, V0)
        a = _geodesic_accel(chart, x, v)
        return v, a, ok

    for k in range(steps):
        x, v = X[k], V[k]
        k1x, k1v, ok1 = rhs(x, v)
        k2x, k2v, ok2 = rhs(x + 0.5 * h * k1x, v + 0.5 * h * k1v)
        k3x, k3v, ok3 = rhs(x + 0.5 * h * k2x, v + 0.5 * h * k2v)
        k4x, k4v, ok4 = rhs(x + h * k3x, v + h * k3v)
        xn = x + (h / 6.0) * (k1x + 2 * k2x + 2 * k3x + k4x)
        vn = v + (h / 6.0) * (k1v + 2 * k2v + 2 * k3v + k4v)
        ok = ok1 & ok2 & ok3 & ok4 & in_domain(chart, xn)
        stopping = active & ~ok
        n_valid[stopping] = k + 1
        active &= ok
        X[k + 1] = np.where(active[:, None], xn, x)
        V[k + 1] = np.where(active[:, None], vn, v)
        if not np.any(active):
            break
    return np.linspace(0.0, lam_max, steps + 1), X, V, n_valid


def geodesic_integrate(chart: Chart, start, velocity, lam_max: float,
                       steps: int) -> Trajectory:
    """Integrate x'' + Gamma(x') (x') = 0 by classical RK4 with fixed step.

    Stops early (with ``hit_boundary=True``) if the trajectory leaves the
    chart domain; the returned samples are all in-domain.
    """
    if steps < 2:
        raise ValueError("steps must be >= 2")
    pts = require_domain(chart, start)
    X0 = pts
    V0 = np.atleast_2d(np.asarray(velocity, dtype=float))
    lams, X, V, n_valid = _integrate_batch(chart, X0, V0, lam_max, steps)
    m = int(n_valid[0])
    samples = tuple(
        (float(lams[k]), tuple(X[k, 0]), tuple(V[k, 0])) for k in range(m))
    return Trajectory(samples, hit_boundary=(m < steps + 1))


def geodesic_norm(chart: Chart, point, velocity) -> float:
    """g(v, v) at a point; conserved along geodesics."""
    g = metric_grid(chart, _as_batch(point))[0]
    v = np.asarray(velocity, dtype=float)
    return float(np.real(v @ g @ v))


# ---------------------------------------------------------------------------
# covariant and exterior derivatives, Hodge dual
# ---------------------------------------------------------------------------

def _field_jets(field, pts: np.ndarray, order: int = 1):
    """Evaluate a TensorValue-producing field on jets.

    Returns (vals, grads, variances) with vals (B,)+shape and
    grads (B, n)+shape, derivative index first.
    """
    B, n = pts.shape
    coords = Jet.variables(pts, order=order)
    tv = field(coords)
    comps = np.asarray(tv.components, dtype=object) if tv.rank else tv.components
    shape = np.shape(comps) if tv.rank else ()
    vals = np.zeros((B,) + shape, dtype=complex)
    grads = np.zeros((B, n) + shape, dtype=complex)
    if tv.rank == 0:
        entry = comps if not isinstance(comps, np.ndarray) else comps[()]
        e = entry
        if isinstance(e, Jet):
            vals[:] = e.val
            grads[:] = e.grad
        else:
            vals[:] = e
        return vals, grads, tv.variances
    for idx in np.ndindex(*shape):
        e = comps[idx]
        if isinstance(e, Jet):
            vals[(slice(None),) + idx] = e.val
            grads[(slice(None), slice(None)) + idx] = e.grad
        else:
            vals[(slice(None),) + idx] = e
    return vals, grads, tv.variances


def covariant_derivative(chart: Chart, tensor_field, point) -> TensorValue:
    """Covariant derivative; the new (derivative) index comes first.

    ``tensor_field`` maps a coordinate jet sequence to a
    :class:`TensorValue` whose components may hold jets.
    """
    pts = require_domain(chart, point)
    B, n = pts.shape
    vals, grads, variances = _field_jets(tensor_field, pts, order=1)
    g, dg, _ = _metric_jets(chart, pts, order=1)
    _, _, gamma = _christoffel_arrays(g, dg, chart.name)

    rank = len(variances)
    out = grads.copy()  # (B, m) + shape
    for a, var in enumerate(variances):
        # contract slot a of the tensor with Gamma over the dummy index l
        src = np.moveaxis(vals, 1 + a, -1)           # (B, ..., l)
        if var == UPPER:
            corr = np.einsum("bkml,b...l->bm...k", gamma, src)
            # reorder so the corrected index k returns to slot a
            corr = np.moveaxis(corr, -1, 2 + a)
            out = out + corr
        else:
            corr = np.einsum("blmk,b...l->bm...k", gamma, src)
            corr = np.moveaxis(corr, -1, 2 + a)
            out = out - corr
    return TensorValue(out[0], (LOWER,) + tuple(variances),
                       tuple(np.asarray(point, float)))


def exterior_derivative(form_field, point, chart: Optional[Chart] = None) -> TensorValue:
    """Exterior derivative of a k-form field, k in {0, 1, 2}.

    Components follow (dw)_ij = d_i w_j - d_j w_i for one-forms and the
    cyclic sum (dw)_ijk = d_i w_jk + d_j w_ki + d_k w_ij for two-forms.
    """
    pts = _as_batch(point)
    if chart is not None:
        require_domain(chart, point)
    vals, grads, variances = _field_jets(form_field, pts, order=1)
    k = len(variances)
    if k not in (0, 1, 2):
        raise ShapeError(f"exterior derivative implemented for k <= 2, got rank {k}")
    d = grads[0]  # (m,) + shape
    if k == 0:
        comps = d
    elif k == 1:
        comps = d - d.T
    else:
        a = np.asarray(vals[0])
        if np.max(np.abs(a + a.T)) > 1e-12 * max(1.0, np.max(np.abs(a))):
            raise ShapeError("two-form components are not antisymmetric")
        comps = (d
                 + np.transpose(d, (1, 2, 0))
                 + np.transpose(d, (2, 0, 1)))
    return TensorValue(comps, (LOWER,) * (k + 1), tuple(np.asarray(point, float)))


def levi_civita_symbol(n: int) -> np.ndarray:
    """Permutation symbol with eps_{01...} = +1."""
    eps = np.zeros((n,) * n)
    for perm in itertools.permutations(range(n)):
        sign = 1
        p = list(perm)
        for i in range(n):
            for j in range(i + 1, n):
                if p[i] > p[j]:
                    sign = -sign
        eps[perm] = sign
    return eps


_EPS4 = levi_civita_symbol(4)


def hodge_dual(chart: Chart, F: TensorValue, point=None) -> TensorValue:
    """Dual two-form  *F_mn = sqrt(-det g) eps_mnrs F^rs / 2.

    Requires a 4-dimensional chart; satisfies ** F = -F.
    """
    if chart.dim != 4:
        raise DimensionError("Hodge dual of a two-form needs a 4D chart")
    if F.rank != 2 or F.variances != (LOWER, LOWER):
        raise ShapeError("expected an all-lower rank-2 form")
    a = np.asarray(F.components, dtype=complex)
    if np.max(np.abs(a + a.T)) > 1e-12 * max(1.0, np.max(np.abs(a))):
        raise ShapeError("two-form components are not antisymmetric")
    pt = F.point if point is None else point
    pts = require_domain(chart, pt)
    g = metric_grid(chart, pts)[0]
    ginv = _inverse(g[None, ...], chart.name)[0]
    fup = ginv @ a @ ginv.T
    root = np.sqrt(-np.linalg.det(g).astype(complex))
    comps = 0.5 * root * np.einsum("mnrs,rs->mn", _EPS4, fup)
    return TensorValue(comps, (LOWER, LOWER), tuple(np.asarray(pt, float)))


def dual_grid(chart: Chart, pts: np.ndarray, F: np.ndarray) -> np.ndarray:
    """Batched Hodge dual of two-form components F (B, 4, 4)."""
    g = metric_grid(chart, pts)
    ginv = np.linalg.inv(g)
    fup = np.einsum("bma,bnc,bac->bmn", ginv, ginv, F)
    root = np.sqrt(-np.linalg.det(g).astype(complex))
    return 0.5 * root[:, None, None] * np.einsum("mnrs,brs->bmn", _EPS4, fup)
