"""Truncated Taylor jets, Gauss-Legendre quadrature and matrix ODE integration.

A :class:`Jet` is a truncated multivariate Taylor expansion around a point.
Every map in this package (immersions, lifts, frames, curves) is written as
an ordinary Python function built from the helpers below, so the same code
evaluates on plain numbers, on bivariate jets (surfaces) and on univariate
jets (curves, holomorphic germs).

Coefficients are stored as Taylor coefficients ``f^(a) / a!`` in an array of
shape ``(n_terms, *carrier)``; the carrier is either a scalar shape or a
scalar shape followed by ``(2, 2)`` for matrix-valued jets.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from itertools import product as _iproduct
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NonConvergent, SingularSample

__all__ = [
    "Jet", "seed_vars", "seed", "constant_jet",
    "exp", "log", "sin", "cos", "sinh", "cosh", "sqrt", "power",
    "conj", "dagger", "mat", "det2", "inv2", "real", "imag",
    "QuadratureSpec", "integrate_segment", "integrate_polyline",
    "antiderivative", "integrate_ode", "integrate_ode_path",
]


class _Layout:
    """Monomial bookkeeping for jets in ``nvars`` variables truncated at ``order``."""

    def __init__(self, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        exps = [e for e in _iproduct(range(order + 1), repeat=nvars) if sum(e) <= order]
        exps.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
        self.exps = exps
        self.n = len(exps)
        self.index = {e: k for k, e in enumerate(exps)}
        self.degree = np.array([sum(e) for e in exps])
        self.factorial = np.array([math.prod(math.factorial(x) for x in e) for e in exps], dtype=float)
        I, J, K = [], [], []
        for i, ei in enumerate(exps):
            for j, ej in enumerate(exps):
                ek = tuple(a + b for a, b in zip(ei, ej))
                if sum(ek) <= order:
                    I.append(i)
                    J.append(j)
                    K.append(self.index[ek])
        self.I = np.array(I)
        self.J = np.array(J)
        S = np.zeros((self.n, len(K)))
        S[K, np.arange(len(K))] = 1.0
        self.S = S

    def count(self, order: int) -> int:
        return int(np.sum(self.degree <= order))


@functools.lru_cache(maxsize=None)
def _layout(nvars: int, order: int) -> _Layout:
    return _Layout(nvars, order)


def _pad(c: np.ndarray, ndim: int) -> np.ndarray:
    """Insert unit axes after the term axis so carrier axes broadcast from the right."""
    extra = ndim - c.ndim
    if extra <= 0:
        return c
    return c.reshape(c.shape[:1] + (1,) * extra + c.shape[1:])


class Jet:
    """Truncated Taylor expansion of a scalar- or 2x2-matrix-valued map.

    ``item_ndim`` is 0 for scalar jets and 2 for matrix jets; leading carrier
    axes (if any) are batch axes that broadcast like numpy arrays.
    """

    __array_ufunc__ = None
    __slots__ = ("coef", "layout", "item_ndim")

    def __init__(self, coef, layout: _Layout, item_ndim: int = 0):
        self.coef = np.asarray(coef)
        self.layout = layout
        self.item_ndim = item_ndim

    # -- construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, nvars: int, order: int, item_ndim: int | None = None) -> "Jet":
        value = np.asarray(value, dtype=complex)
        lay = _layout(nvars, order)
        coef = np.zeros((lay.n,) + value.shape, dtype=complex)
        coef[0] = value
        if item_ndim is None:
            item_ndim = 2 if value.shape[-2:] == (2, 2) else 0
        return cls(coef, lay, item_ndim)

    # -- basic accessors ----------------------------------------------------
    @property
    def nvars(self) -> int:
        return self.layout.nvars

    @property
    def order(self) -> int:
        return self.layout.order

    @property
    def value(self):
        return self.coef[0]

    def d(self, *alpha: int):
        """Partial derivative with multi-index ``alpha`` at the expansion point."""
        if len(alpha) != self.nvars:
            raise ValueError(f"expected {self.nvars} indices, got {len(alpha)}")
        k = self.layout.index[tuple(alpha)]
        return self.coef[k] * self.layout.factorial[k]

    d_u = property(lambda self: self.d(1, 0))
    d_v = property(lambda self: self.d(0, 1))
    d_uu = property(lambda self: self.d(2, 0))
    d_uv = property(lambda self: self.d(1, 1))
    d_vv = property(lambda self: self.d(0, 2))
    d_z = property(lambda self: self.d(1))
    d_zz = property(lambda self: self.d(2))

    def derivatives(self) -> list:
        """Univariate jets only: ``[f, f', f'', ...]`` at the expansion point."""
        if self.nvars != 1:
            raise ValueError("derivatives() is defined for univariate jets")
        return [self.coef[k] * math.factorial(k) for k in range(self.order + 1)]

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        lay = _layout(self.nvars, order)
        return Jet(self.coef[: lay.n], lay, self.item_ndim)

    def partial(self, var: int = 0) -> "Jet":
        """Jet of the partial derivative, one order lower."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        lay = _layout(self.nvars, self.order - 1)
        coef = np.empty((lay.n,) + self.coef.shape[1:], dtype=self.coef.dtype)
        for k, e in enumerate(lay.exps):
            up = list(e)
            up[var] += 1
            coef[k] = self.coef[self.layout.index[tuple(up)]] * up[var]
        return Jet(coef, lay, self.item_ndim)

    def __repr__(self) -> str:
        kind = "matrix" if self.item_ndim else "scalar"
        return f"Jet({kind}, nvars={self.nvars}, order={self.order}, value={self.value!r})"

    # -- coercion -------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.nvars != self.nvars:
                raise ValueError("jets in different numbers of variables")
            m = min(self.order, other.order)
            return self.truncate(m), other.truncate(m)
        other = np.asarray(other)
        nd = 2 if (other.ndim >= 2 and other.shape[-2:] == (2, 2)) else 0
        c = Jet.constant(other, self.nvars, self.order, nd)
        return self, c

    @staticmethod
    def _align(a: "Jet", b: "Jet"):
        """Coefficient arrays of a and b with a scalar side expanded against a matrix side."""
        ca, cb = a.coef, b.coef
        if a.item_ndim == 0 and b.item_ndim == 2:
            ca = ca[..., None, None]
        elif a.item_ndim == 2 and b.item_ndim == 0:
            cb = cb[..., None, None]
        n = max(ca.ndim, cb.ndim)
        return _pad(ca, n), _pad(cb, n), max(a.item_ndim, b.item_ndim)

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other):
        a, b = self._coerce(other)
        ca, cb, nd = self._align(a, b)
        return Jet(ca + cb, a.layout, nd)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.coef, self.layout, self.item_ndim)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other)
            if other.ndim == 0 or (other.shape[-2:] != (2, 2)):
                ca = self.coef
                if self.item_ndim == 2 and other.ndim:
                    other = other[..., None, None]
                return Jet(ca * other, self.layout, self.item_ndim)
        a, b = self._coerce(other)
        ca, cb, nd = self._align(a, b)
        lay = a.layout
        prod = ca[lay.I] * cb[lay.J]
        out = np.tensordot(lay.S, prod, axes=(1, 0))
        return Jet(out, lay, nd)

    __rmul__ = __mul__

    def __matmul__(self, other):
        a, b = self._coerce(other)
        if a.item_ndim != 2 or b.item_ndim != 2:
            raise ValueError("@ requires matrix jets")
        lay = a.layout
        ca, cb = a.coef, b.coef
        n = max(ca.ndim, cb.ndim)
        prod = np.matmul(_pad(ca, n)[lay.I], _pad(cb, n)[lay.J])
        return Jet(np.tensordot(lay.S, prod, axes=(1, 0)), lay, 2)

    def __rmatmul__(self, other):
        a, b = self._coerce(other)
        return b @ a

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / np.asarray(other, dtype=complex))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, (int, np.integer)) and p >= 0:
            out = Jet.constant(np.ones_like(self.value), self.nvars, self.order, self.item_ndim)
            for _ in range(int(p)):
                out = out * self
            return out
        return power(self, p)

    # -- composition ------------------------------------------------------------
    def compose(self, derivs: Sequence) -> "Jet":
        """Apply a scalar function given its derivatives ``[f(x0), f'(x0), ...]``.

        The derivatives may be matrices; the argument must be a scalar jet.
        """
        if self.item_ndim != 0:
            raise ValueError("compose needs a scalar jet argument")
        delta = Jet(self.coef.copy(), self.layout, 0)
        delta.coef[0] = 0
        n = min(self.order, len(derivs) - 1)
        out = Jet.constant(derivs[0], self.nvars, self.order)
        power_k = None
        for k in range(1, n + 1):
            power_k = delta if power_k is None else power_k * delta
            out = out + power_k * (np.asarray(derivs[k]) / math.factorial(k))
        return out

    def reciprocal(self) -> "Jet":
        if self.item_ndim == 2:
            return inv2(self)
        x0 = self.value
        if np.any(x0 == 0):
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        return self.compose([(-1) ** k * math.factorial(k) / x0 ** (k + 1) for k in range(self.order + 1)])

    def conj(self) -> "Jet":
        return Jet(np.conj(self.coef), self.layout, self.item_ndim)

    @property
    def H(self) -> "Jet":
        if self.item_ndim != 2:
            return self.conj()
        return Jet(np.conj(np.swapaxes(self.coef, -1, -2)), self.layout, 2)

    @property
    def T(self) -> "Jet":
        return Jet(np.swapaxes(self.coef, -1, -2), self.layout, 2)

    @property
    def real(self) -> "Jet":
        return Jet(self.coef.real, self.layout, self.item_ndim)

    @property
    def imag(self) -> "Jet":
        return Jet(self.coef.imag, self.layout, self.item_ndim)

    def __getitem__(self, key) -> "Jet":
        if self.item_ndim != 2:
            raise TypeError("only matrix jets are indexable")
        i, j = key
        return Jet(self.coef[..., i, j], self.layout, 0)


def constant_jet(value, like: Jet) -> Jet:
    return Jet.constant(value, like.nvars, like.order)


def seed_vars(u, v, order: int = 2) -> tuple[Jet, Jet]:
    """Coordinate jets for ``u`` and ``v`` at ``(u, v)``."""
    lay = _layout(2, order)
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    shape = np.broadcast(u, v).shape
    cu = np.zeros((lay.n,) + shape, dtype=complex)
    cv = np.zeros_like(cu)
    cu[0], cv[0] = u, v
    if order >= 1:
        cu[lay.index[(1, 0)]] = 1.0
        cv[lay.index[(0, 1)]] = 1.0
    return Jet(cu, lay), Jet(cv, lay)


def seed(x, order: int = 2) -> Jet:
    """Univariate coordinate jet at ``x`` (real or complex)."""
    lay = _layout(1, order)
    x = np.asarray(x, dtype=complex)
    c = np.zeros((lay.n,) + x.shape, dtype=complex)
    c[0] = x
    if order >= 1:
        c[1] = 1.0
    return Jet(c, lay)


# -- elementary functions --------------------------------------------------------

def _cycle(vals, order):
    return [vals[k % len(vals)] for k in range(order + 1)]


def exp(x):
    if isinstance(x, Jet):
        e = np.exp(x.value)
        return x.compose([e] * (x.order + 1))
    return np.exp(x)


def log(x):
    if isinstance(x, Jet):
        x0 = x.value
        d = [np.log(x0)] + [(-1) ** (k - 1) * math.factorial(k - 1) / x0 ** k for k in range(1, x.order + 1)]
        return x.compose(d)
    x = np.asarray(x)
    if np.iscomplexobj(x) or np.any(x <= 0):
        return np.log(x.astype(complex))
    return np.log(x)


def sin(x):
    if isinstance(x, Jet):
        s, c = np.sin(x.value), np.cos(x.value)
        return x.compose(_cycle([s, c, -s, -c], x.order))
    return np.sin(x)


def cos(x):
    if isinstance(x, Jet):
        s, c = np.sin(x.value), np.cos(x.value)
        return x.compose(_cycle([c, -s, -c, s], x.order))
    return np.cos(x)


def sinh(x):
    if isinstance(x, Jet):
        s, c = np.sinh(x.value), np.cosh(x.value)
        return x.compose(_cycle([s, c], x.order))
    return np.sinh(x)


def cosh(x):
    if isinstance(x, Jet):
        s, c = np.sinh(x.value), np.cosh(x.value)
        return x.compose(_cycle([c, s], x.order))
    return np.cosh(x)


def power(x, p):
    """Principal-branch power ``x**p`` for real or complex exponent ``p``."""
    if isinstance(x, Jet):
        x0 = x.value
        d, coef = [], 1.0
        for k in range(x.order + 1):
            d.append(coef * x0 ** (p - k))
            coef *= (p - k)
        return x.compose(d)
    return np.power(np.asarray(x, dtype=complex), p)


def sqrt(x):
    return power(x, 0.5) if isinstance(x, Jet) else np.sqrt(np.asarray(x, dtype=complex))


def conj(x):
    return x.conj() if isinstance(x, Jet) else np.conj(x)


def dagger(x):
    """Conjugate transpose; for jets this assumes real expansion variables."""
    if isinstance(x, Jet):
        return x.H
    return np.conj(np.swapaxes(np.asarray(x), -1, -2))


def real(x):
    return x.real if isinstance(x, Jet) else np.real(x)


def imag(x):
    return x.imag if isinstance(x, Jet) else np.imag(x)


def mat(rows) -> Jet | np.ndarray:
    """Assemble a 2x2 matrix from entries that may be numbers or scalar jets."""
    flat = [rows[0][0], rows[0][1], rows[1][0], rows[1][1]]
    jets = [e for e in flat if isinstance(e, Jet)]
    if not jets:
        arrs = np.broadcast_arrays(*[np.asarray(e, dtype=complex) for e in flat])
        return np.stack([np.stack(arrs[:2], -1), np.stack(arrs[2:], -1)], -2)
    order = min(j.order for j in jets)
    nv = jets[0].nvars
    ents = []
    for e in flat:
        if isinstance(e, Jet):
            ents.append(e.truncate(order).coef)
        else:
            ents.append(Jet.constant(e, nv, order, 0).coef)
    n = max(e.ndim for e in ents)
    ents = np.broadcast_arrays(*[_pad(e, n) for e in ents])
    coef = np.stack([np.stack(ents[:2], -1), np.stack(ents[2:], -1)], -2)
    return Jet(coef, _layout(nv, order), 2)


def det2(m):
    if isinstance(m, Jet):
        return m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    m = np.asarray(m)
    return m[..., 0, 0] * m[..., 1, 1] - m[..., 0, 1] * m[..., 1, 0]


def inv2(m):
    if isinstance(m, Jet):
        r = det2(m).reciprocal()
        return mat([[m[1, 1] * r, -m[0, 1] * r], [-m[1, 0] * r, m[0, 0] * r]])
    return np.linalg.inv(m)


# -- quadrature --------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    """Composite Gauss-Legendre rule: ``order`` nodes per panel, doubled panels until stable."""

    order: int = 16
    panels: int = 2
    tol: float = 1e-10
    max_doublings: int = 12


@functools.lru_cache(maxsize=None)
def _gl_nodes(order: int):
    return np.polynomial.legendre.leggauss(order)


def _composite(f, z0, z1, order, panels):
    x, w = _gl_nodes(order)
    edges = z0 + (z1 - z0) * np.arange(panels + 1) / panels
    half = (edges[1:] - edges[:-1]) / 2
    mid = (edges[1:] + edges[:-1]) / 2
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    vals = np.asarray(f(pts), dtype=complex)
    if vals.shape != pts.shape:
        vals = np.broadcast_to(vals, pts.shape)
    if not np.all(np.isfinite(vals)):
        bad = pts[~np.isfinite(vals)][0]
        raise SingularSample(f"integrand not finite at z={bad}")
    vals = vals.reshape(panels, order)
    return complex(np.sum(half * (vals @ w)))


def integrate_segment(f: Callable, z0: complex, z1: complex, spec: QuadratureSpec = QuadratureSpec()) -> complex:
    """Integrate ``f(z) dz`` along the straight segment from ``z0`` to ``z1``.

    ``f`` receives a 1-d array of complex nodes and must return values of the
    same shape.
    """
    z0, z1 = complex(z0), complex(z1)
    if z0 == z1:
        return 0j
    panels = spec.panels
    prev = _composite(f, z0, z1, spec.order, panels)
    for _ in range(spec.max_doublings):
        panels *= 2
        cur = _composite(f, z0, z1, spec.order, panels)
        if abs(cur - prev) <= spec.tol:
            return cur
        prev = cur
    raise NonConvergent(f"quadrature on [{z0}, {z1}] did not stabilise within {spec.max_doublings} doublings")


def integrate_polyline(f: Callable, points: Sequence[complex], spec: QuadratureSpec = QuadratureSpec()) -> complex:
    return sum((integrate_segment(f, a, b, spec) for a, b in zip(points[:-1], points[1:])), 0j)


def antiderivative(integrand: Callable[[Jet], Jet], base: complex, spec: QuadratureSpec = QuadratureSpec(),
                   via: Sequence[complex] = ()):
    """Jet-capable antiderivative ``E(z) = int_base^z q``.

    ``integrand(zeta)`` takes a univariate jet and returns a scalar jet of the
    same order (the order is set by the caller).  The returned callable
    accepts numbers or jets; for a jet argument the value comes from
    quadrature along ``base -> via... -> z`` and the higher Taylor
    coefficients from the integrand's own jet.
    """

    def values(pts):
        return integrand(seed(pts, 0)).value

    def at_point(z0: complex) -> complex:
        return integrate_polyline(values, [base, *via, z0], spec)

    def E(z):
        if not isinstance(z, Jet):
            zs = np.asarray(z, dtype=complex)
            if zs.ndim == 0:
                return at_point(complex(zs))
            return np.array([at_point(complex(w)) for w in zs.ravel()]).reshape(zs.shape)
        centers = np.asarray(z.value, dtype=complex)
        per_point = []
        for c in centers.ravel():
            q = integrand(seed(complex(c), z.order - 1)).derivatives() if z.order else []
            per_point.append([at_point(complex(c))] + [complex(x) for x in q])
        derivs = [np.array([p[k] for p in per_point]).reshape(centers.shape) for k in range(z.order + 1)]
        return z.compose(derivs)

    return E


# -- ODE ----------------------------------------------------------------------------

def integrate_ode(rhs: Callable[[float, np.ndarray], np.ndarray], y0, s0: float, s1: float,
                  tol: float = 1e-10, dense: bool = False):
    """Integrate the 2x2 complex matrix ODE ``Y' = rhs(s, Y)`` from ``s0`` to ``s1``.

    Uses the embedded Dormand-Prince 8(5,3) pair with absolute and relative
    tolerance ``tol``.  Returns the terminal value, or the scipy solution
    object (with a ``sol`` dense interpolant) if ``dense``.
    """
    y0 = np.asarray(y0, dtype=complex)
    shape = y0.shape
    if s0 == s1:
        return y0.copy()

    def f(s, y):
        return np.asarray(rhs(s, y.reshape(shape)), dtype=complex).ravel()

    sol = solve_ivp(f, (s0, s1), y0.ravel(), method="DOP853", rtol=tol, atol=tol, dense_output=dense)
    if sol.status != 0:
        raise NonConvergent(f"ODE integration failed: {sol.message}")
    if dense:
        return sol
    return sol.y[:, -1].reshape(shape)


def integrate_ode_path(rhs_z: Callable[[complex, np.ndarray], np.ndarray], y0, points: Sequence[complex],
                       tol: float = 1e-10) -> np.ndarray:
    """Integrate ``dY/dz = rhs_z(z, Y)`` along a polyline in the complex plane."""
    y = np.asarray(y0, dtype=complex)
    for za, zb in zip(points[:-1], points[1:]):
        za, zb = complex(za), complex(zb)
        dz = zb - za
        y = integrate_ode(lambda t, Y, za=za, dz=dz: rhs_z(za + t * dz, Y) * dz, y, 0.0, 1.0, tol)
    return y
