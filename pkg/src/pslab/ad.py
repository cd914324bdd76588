"""Second-order forward-mode automatic differentiation.

A :class:`Jet` carries the truncated Taylor data (value, gradient, Hessian)
of an expression with respect to a fixed set of coordinate variables.
Curvature tensors need exact second derivatives of metric components, and
jets deliver them without any finite-difference step-size tuning.

Values are complex throughout (real charts simply carry zero imaginary
parts) and may be batched: ``val`` has shape ``(B,)``, ``grad`` has shape
``(B, n)`` and ``hess`` has shape ``(B, n, n)``.  A first-order evaluation
sets ``hess`` to ``None`` and every operation then skips the Hessian work;
this is what the geodesic integrator uses, since the connection only needs
first derivatives.

The math functions in this module (``sin``, ``cosh``, ``arctanh``, ...)
accept jets, numpy arrays and plain scalars alike, so the same metric
component function can be evaluated for derivatives, on dense grids, or at
a single point.
"""

from __future__ import annotations

from typing import Callable, Sequence, Union

import numpy as np

Number = Union[int, float, complex, np.ndarray]

__all__ = [
    "Jet",
    "value_of",
    "sqrt", "exp", "log",
    "sin", "cos", "tan",
    "sinh", "cosh", "tanh",
    "arcsin", "arccos", "arctan", "arctan2",
    "arcsinh", "arccosh", "arctanh",
    "gradient", "hessian",
]


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., :, None] * b[..., None, :]


def _hadd(a, b):
    if a is None and b is None:
        return None
    if a is None:
        return b
    if b is None:
        return a
    return a + b


class Jet:
    """Value, gradient and (optional) Hessian of one scalar expression."""

    __slots__ = ("val", "grad", "hess")

    def __init__(self, val, grad, hess=None):
        self.val = np.asarray(val, dtype=complex)
        self.grad = np.asarray(grad, dtype=complex)
        self.hess = None if hess is None else np.asarray(hess, dtype=complex)

    @staticmethod
    def variable(value, index: int, nvars: int, order: int = 2) -> "Jet":
        """Seed coordinate number `index` of `nvars` at `value`."""
        val = np.atleast_1d(np.asarray(value, dtype=complex))
        grad = np.zeros(val.shape + (nvars,), dtype=complex)
        grad[..., index] = 1.0
        hess = None
        if order == 2:
            hess = np.zeros(val.shape + (nvars, nvars), dtype=complex)
        return Jet(val, grad, hess)

    @staticmethod
    def variables(values, order: int = 2) -> list["Jet"]:
        """Seed a full coordinate tuple; `values` is (B, n) or (n,)."""
        pts = np.atleast_2d(np.asarray(values))
        n = pts.shape[1]
        return [Jet.variable(pts[:, i], i, n, order) for i in range(n)]

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val + other.val, self.grad + other.grad,
                       _hadd(self.hess, other.hess))
        return Jet(self.val + other, self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, -self.grad,
                   None if self.hess is None else -self.hess)

    def __sub__(self, other):
        return self.__add__(-other if isinstance(other, Jet) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b = self, other
            val = a.val * b.val
            grad = a.grad * b.val[..., None] + b.grad * a.val[..., None]
            hess = None
            if a.hess is not None or b.hess is not None:
                hess = _outer(a.grad, b.grad) + _outer(b.grad, a.grad)
                if a.hess is not None:
                    hess = hess + a.hess * b.val[..., None, None]
                if b.hess is not None:
                    hess = hess + b.hess * a.val[..., None, None]
            return Jet(val, grad, hess)
        c = np.asarray(other)
        return Jet(self.val * c, self.grad * c[..., None] if c.ndim else self.grad * c,
                   None if self.hess is None else
                   (self.hess * c[..., None, None] if c.ndim else self.hess * c))

    __rmul__ = __mul__

    def _reciprocal(self) -> "Jet":
        inv = 1.0 / self.val
        inv2 = inv * inv
        grad = -self.grad * inv2[..., None]
        hess = None
        if self.hess is not None:
            hess = (-self.hess * inv2[..., None, None]
                    + 2.0 * _outer(self.grad, self.grad) * (inv2 * inv)[..., None, None])
        return Jet(inv, grad, hess)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other._reciprocal()
        return self * (1.0 / np.asarray(other))

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(log(self) * p)
        p = float(p)
        if p == 2.0:
            return self * self
        v = self.val
        return _unary(self, v ** p, p * v ** (p - 1.0),
                      p * (p - 1.0) * v ** (p - 2.0))

    def __repr__(self):  # pragma: no cover - debugging aid
        return f"Jet(val={self.val!r})"


def value_of(x) -> np.ndarray:
    """Plain value of a jet or passthrough for arrays/scalars."""
    return x.val if isinstance(x, Jet) else np.asarray(x, dtype=complex)


def gradient(x: Jet) -> np.ndarray:
    return x.grad


def hessian(x: Jet) -> np.ndarray:
    if x.hess is None:
        raise ValueError("jet was seeded first-order only")
    return x.hess


def _unary(x: Jet, u, du, d2u) -> Jet:
    grad = du[..., None] * x.grad
    hess = None
    if x.hess is not None:
        hess = du[..., None, None] * x.hess + d2u[..., None, None] * _outer(x.grad, x.grad)
    return Jet(u, grad, hess)


def _dispatch(fn_numpy: Callable, fn_jet: Callable):
    def wrapper(x):
        if isinstance(x, Jet):
            return fn_jet(x)
        return fn_numpy(x)
    return wrapper


def _jet_sqrt(x):
    u = np.sqrt(x.val)
    return _unary(x, u, 0.5 / u, -0.25 / (u * u * u))


def _jet_exp(x):
    u = np.exp(x.val)
    return _unary(x, u, u, u)


def _jet_log(x):
    v = x.val
    return _unary(x, np.log(v), 1.0 / v, -1.0 / (v * v))


def _jet_sin(x):
    s, c = np.sin(x.val), np.cos(x.val)
    return _unary(x, s, c, -s)


def _jet_cos(x):
    s, c = np.sin(x.val), np.cos(x.val)
    return _unary(x, c, -s, -c)


def _jet_tan(x):
    u = np.tan(x.val)
    du = 1.0 + u * u
    return _unary(x, u, du, 2.0 * u * du)


def _jet_sinh(x):
    s, c = np.sinh(x.val), np.cosh(x.val)
    return _unary(x, s, c, s)


def _jet_cosh(x):
    s, c = np.sinh(x.val), np.cosh(x.val)
    return _unary(x, c, s, c)


def _jet_tanh(x):
    u = np.tanh(x.val)
    du = 1.0 - u * u
    return _unary(x, u, du, -2.0 * u * du)


def _jet_arcsin(x):
    v = x.val
    w = 1.0 / np.sqrt(1.0 - v * v)
    return _unary(x, np.arcsin(v), w, v * w ** 3)


def _jet_arccos(x):
    v = x.val
    w = 1.0 / np.sqrt(1.0 - v * v)
    return _unary(x, np.arccos(v), -w, -v * w ** 3)


def _jet_arctan(x):
    v = x.val
    w = 1.0 / (1.0 + v * v)
    return _unary(x, np.arctan(v), w, -2.0 * v * w * w)


def _jet_arcsinh(x):
    v = x.val
    w = 1.0 / np.sqrt(1.0 + v * v)
    return _unary(x, np.arcsinh(v), w, -v * w ** 3)


def _jet_arccosh(x):
    v = x.val
    w = 1.0 / np.sqrt(v * v - 1.0)
    return _unary(x, np.arccosh(v), w, -v * w ** 3)


def _jet_arctanh(x):
    v = x.val
    w = 1.0 / (1.0 - v * v)
    return _unary(x, np.arctanh(v), w, 2.0 * v * w * w)


sqrt = _dispatch(np.sqrt, _jet_sqrt)
exp = _dispatch(np.exp, _jet_exp)
log = _dispatch(np.log, _jet_log)
sin = _dispatch(np.sin, _jet_sin)
cos = _dispatch(np.cos, _jet_cos)
tan = _dispatch(np.tan, _jet_tan)
sinh = _dispatch(np.sinh, _jet_sinh)
cosh = _dispatch(np.cosh, _jet_cosh)
tanh = _dispatch(np.tanh, _jet_tanh)
arcsin = _dispatch(np.arcsin, _jet_arcsin)
arccos = _dispatch(np.arccos, _jet_arccos)
arctan = _dispatch(np.arctan, _jet_arctan)
arcsinh = _dispatch(np.arcsinh, _jet_arcsinh)
arccosh = _dispatch(np.arccosh, _jet_arccosh)
arctanh = _dispatch(np.arctanh, _jet_arctanh)


def arctan2(y, x):
    """Two-argument arctangent; real parts only (angles are real)."""
    if not isinstance(y, Jet) and not isinstance(x, Jet):
        return np.arctan2(np.asarray(y).real, np.asarray(x).real)
    if not isinstance(y, Jet):
        n = x.grad.shape[-1]
        y = Jet(np.broadcast_to(np.asarray(y, complex), x.val.shape).copy(),
                np.zeros(x.val.shape + (n,), complex),
                None if x.hess is None else np.zeros(x.val.shape + (n, n), complex))
    if not isinstance(x, Jet):
        n = y.grad.shape[-1]
        x = Jet(np.broadcast_to(np.asarray(x, complex), y.val.shape).copy(),
                np.zeros(y.val.shape + (n,), complex),
                None if y.hess is None else np.zeros(y.val.shape + (n, n), complex))
    vx, vy = x.val, y.val
    r2 = vx * vx + vy * vy
    val = np.arctan2(vy.real, vx.real).astype(complex)
    fx = -vy / r2
    fy = vx / r2
    grad = fx[..., None] * x.grad + fy[..., None] * y.grad
    hess = None
    if x.hess is not None or y.hess is not None:
        r4 = r2 * r2
        fxx = 2.0 * vx * vy / r4
        fyy = -fxx
        fxy = (vy * vy - vx * vx) / r4
        hess = (fxx[..., None, None] * _outer(x.grad, x.grad)
                + fyy[..., None, None] * _outer(y.grad, y.grad)
                + fxy[..., None, None] * (_outer(x.grad, y.grad) + _outer(y.grad, x.grad)))
        if x.hess is not None:
            hess = hess + fx[..., None, None] * x.hess
        if y.hess is not None:
            hess = hess + fy[..., None, None] * y.hess
    return Jet(val, grad, hess)
