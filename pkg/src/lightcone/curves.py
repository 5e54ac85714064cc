"""Frenet theory of unit-speed curves in the future light cone, and geodesics.

A *curve* is a callable ``s -> 2x2 Hermitian matrix`` written with the
elementary functions of :mod:`lightcone.calculus`, so that it can be
evaluated on univariate jets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import calculus as C
from .cone import SIGNATURE, as_matrix, coords, herm, inner, minkowski_inner
from .errors import DegenerateFrame, InvalidGram, NonConvergent, NotUnitSpeed

Curve = Callable


def curve_derivatives(curve: Curve, s: float, order: int = 3) -> list[np.ndarray]:
    """``[gamma, gamma', ..., gamma^(order)]`` at ``s`` from a univariate jet."""
    out = curve(C.seed(s, order))
    if not isinstance(out, C.Jet):
        # constant curve
        val = np.asarray(out, dtype=complex)
        return [val] + [np.zeros_like(val)] * order
    return [np.asarray(d) for d in out.derivatives()]


@dataclass(frozen=True)
class FrenetData:
    s: float
    kappa: float
    tau: float
    gamma: np.ndarray
    T: np.ndarray
    N: np.ndarray
    B: np.ndarray

    @property
    def frame(self) -> list[np.ndarray]:
        return [self.gamma, self.T, self.N, self.B]

    def gram(self) -> np.ndarray:
        f = self.frame
        return np.array([[minkowski_inner(x, y) for y in f] for x in f])

    def orientation(self) -> float:
        return float(np.linalg.det(np.column_stack([coords(x) for x in self.frame])))

    def to_json(self) -> str:
        def enc(m):
            return [float(x) for x in coords(m)]
        return json.dumps({
            "s": float(self.s), "kappa": float(self.kappa), "tau": float(self.tau),
            "gamma": enc(self.gamma), "T": enc(self.T), "N": enc(self.N), "B": enc(self.B),
        }, sort_keys=True)


GRAM_TABLE = np.array([
    [0, 0, 1, 0],
    [0, 1, 0, 0],
    [1, 0, 0, 0],
    [0, 0, 0, 1],
], dtype=float)

FRENET_MATRIX_ROWS = "gamma' = T; T' = kappa gamma - N; N' = -kappa T - tau B; B' = tau gamma"


def _binormal(gamma, T, N, tol: float = 1e-10) -> np.ndarray:
    rows = np.array([coords(x) @ SIGNATURE for x in (gamma, T, N)])
    _, sv, vt = np.linalg.svd(rows)
    scale = sv[0] if sv[0] > 0 else 1.0
    if sv[-1] <= tol * scale:
        raise DegenerateFrame("gamma, T, N are linearly dependent")
    b = vt[-1]
    norm = b @ SIGNATURE @ b
    if norm <= tol:
        raise DegenerateFrame("orthogonal complement of the frame is not spacelike")
    b = b / np.sqrt(norm)
    if np.linalg.det(np.column_stack([coords(gamma), coords(T), coords(N), b])) > 0:
        b = -b
    return herm(*b)


def frenet(curve: Curve, s: float, unit_tol: float = 1e-9) -> FrenetData:
    """Cone curvature, cone torsion and the null frame at ``s``.

    ``kappa = -<g'', g''>/2``, ``N = kappa g - g''``; ``B`` completes the Gram
    table with ``det(g, T, N, B) < 0``, and ``tau = <g''', B>`` (which equals
    ``<B', N>`` because ``B' = tau g``).
    """
    g, g1, g2, g3 = curve_derivatives(curve, s, 3)
    speed = minkowski_inner(g1, g1)
    if abs(speed - 1) > unit_tol:
        raise NotUnitSpeed(f"<gamma', gamma'> = {speed!r} at s={s}")
    kappa = -0.5 * minkowski_inner(g2, g2)
    N = kappa * g - g2
    B = _binormal(g, g1, N)
    tau = minkowski_inner(g3, B)
    return FrenetData(float(s), float(kappa), float(tau), g, g1, N, B)


def torsion_fd(curve: Curve, s: float, h: float = 1e-5) -> float:
    """Cone torsion read off ``<B', N>`` with a central difference for ``B'``."""
    fp, fm = frenet(curve, s + h), frenet(curve, s - h)
    dB = (fp.B - fm.B) / (2 * h)
    return minkowski_inner(dB, frenet(curve, s).N)


def frenet_residual(curve: Curve, s: float, h: float = 1e-4) -> float:
    """Max deviation of the finite-difference frame derivative from the Frenet system.

    Measured relative to the largest frame coordinate (at least 1), since the
    difference quotient's error scales with the frame.
    """
    f0, fp, fm = frenet(curve, s), frenet(curve, s + h), frenet(curve, s - h)
    k, t = f0.kappa, f0.tau
    g, T, N, B = f0.frame
    expected = [T, k * g - N, -k * T - t * B, t * g]
    measured = [(p - m) / (2 * h) for p, m in zip(fp.frame, fm.frame)]
    scale = max(1.0, max(float(np.max(np.abs(coords(x)))) for x in f0.frame))
    return float(max(np.max(np.abs(coords(e) - coords(m))) for e, m in zip(expected, measured))) / scale


def arc_length_reparametrize(curve: Curve, t0: float = 0.0, tol: float = 1e-8,
                             spec: C.QuadratureSpec = C.QuadratureSpec()) -> Curve:
    """Unit-speed reparametrization ``sigma -> curve(t(sigma))`` with ``t(0) = t0``.

    The inverse of the arc-length function is found by Newton iteration; jets
    are propagated through ``t(sigma)`` using ``t' = 1/rho``,
    ``t'' = -rho'/rho^3`` and ``t''' = -rho''/rho^4 + 3 rho'^2/rho^5`` where
    ``rho^2 = <curve', curve'>``.
    """

    def speed(ts):
        ts = np.real(np.asarray(ts))
        d = curve(C.seed(ts, 1)).d(1)
        return np.sqrt(np.maximum(inner(d, d), 0.0))

    def length(t):
        return C.integrate_segment(speed, t0, t, spec).real

    def invert(sigma: float) -> float:
        t = t0 + sigma / float(speed(t0))
        for _ in range(60):
            step = (length(t) - sigma) / float(speed(t))
            t -= step
            if abs(step) <= tol * 1e-3 * (1 + abs(t)):
                return t
        raise NonConvergent(f"arc-length inversion did not converge at sigma={sigma}")

    def reparam(sigma):
        if not isinstance(sigma, C.Jet):
            sig = np.asarray(sigma, dtype=float)
            ts = np.vectorize(invert)(sig)
            return curve(ts)
        sig0 = float(np.real(sigma.value))
        t = invert(sig0)
        g = curve_derivatives(curve, t, 3)
        r2 = minkowski_inner(g[1], g[1])
        dr2 = 2 * minkowski_inner(g[1], g[2])
        ddr2 = 2 * minkowski_inner(g[2], g[2]) + 2 * minkowski_inner(g[1], g[3])
        rho = np.sqrt(r2)
        drho = dr2 / (2 * rho)
        ddrho = (ddr2 - 2 * drho ** 2) / (2 * rho)
        derivs = [t, 1 / rho, -drho / rho ** 3, -ddrho / rho ** 4 + 3 * drho ** 2 / rho ** 5]
        return curve(sigma.compose(derivs))

    return reparam


# -- geodesics -------------------------------------------------------------------

@dataclass(frozen=True)
class GeodesicSpec:
    """Coefficients of the quadratic geodesic ``s -> a s^2/2 + b s + c``."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def violations(self, tol: float = 1e-10) -> dict[str, float]:
        a, b, c = (as_matrix(x) for x in (self.a, self.b, self.c))
        want = {
            "a,a": (a, a, 0.0), "a,b": (a, b, 0.0), "b,c": (b, c, 0.0),
            "c,c": (c, c, 0.0), "a,c": (a, c, -1.0), "b,b": (b, b, 1.0),
        }
        out = {}
        for name, (x, y, target) in want.items():
            val = minkowski_inner(x, y)
            if abs(val - target) > tol:
                out[name] = val
        return out

    def validate(self, tol: float = 1e-10) -> "GeodesicSpec":
        bad = self.violations(tol)
        if bad:
            raise InvalidGram(bad)
        return self

    @classmethod
    def standard(cls) -> "GeodesicSpec":
        return cls(np.array([[2, 0], [0, 0]], dtype=complex),
                   np.array([[0, 1], [1, 0]], dtype=complex),
                   np.array([[0, 0], [0, 1]], dtype=complex))

    @classmethod
    def from_lemma(cls, w: complex = 0.0, theta: float = 0.0) -> "GeodesicSpec":
        """The general spec with ``c = diag(0, 1)``, parametrized by ``w`` and ``theta``."""
        e = np.exp(1j * theta)
        a = np.array([[2, w], [np.conj(w), abs(w) ** 2 / 2]], dtype=complex)
        b = np.array([[0, e], [np.conj(e), (w * np.conj(e) + np.conj(w) * e).real / 2]], dtype=complex)
        c = np.array([[0, 0], [0, 1]], dtype=complex)
        return cls(a, b, c)

    def transformed(self, F) -> "GeodesicSpec":
        F = np.asarray(F, dtype=complex)
        Fh = F.conj().T
        return GeodesicSpec(F @ self.a @ Fh, F @ self.b @ Fh, F @ self.c @ Fh)


def geodesic(spec: GeodesicSpec, tol: float = 1e-10) -> Curve:
    spec.validate(tol)
    a, b, c = (np.asarray(x, dtype=complex) for x in (spec.a, spec.b, spec.c))

    def gamma(s):
        if isinstance(s, C.Jet):
            return s * s * (a / 2) + s * b + C.Jet.constant(c, s.nvars, s.order)
        s = np.asarray(s, dtype=float)[..., None, None]
        return a / 2 * s ** 2 + b * s + c

    return gamma


def normalize_geodesic(spec: GeodesicSpec, tol: float = 1e-10) -> np.ndarray:
    """Unimodular ``F`` moving ``spec`` to the standard geodesic ``[[t^2, t], [t, 1]]``.

    First ``c = psi psi*`` is moved to ``diag(0, 1)``; the spec then has the
    form of :meth:`GeodesicSpec.from_lemma` for some ``(w, theta)``, which a
    lower-triangular matrix removes.
    """
    spec.validate(tol)
    c = np.asarray(spec.c, dtype=complex)
    if c[1, 1].real > c[0, 0].real:
        q = np.sqrt(c[1, 1].real)
        p = c[0, 1] / q
    else:
        p = np.sqrt(c[0, 0].real)
        q = c[1, 0] / p
    n = abs(p) ** 2 + abs(q) ** 2
    F1 = np.array([[q, -p], [np.conj(p) / n, np.conj(q) / n]], dtype=complex)
    mid = spec.transformed(F1)
    w = mid.a[0, 1]
    theta = np.angle(mid.b[0, 1])
    e = np.exp(0.5j * theta)
    F2 = np.array([[1 / e, 0], [-0.5 * np.conj(w) * e, e]], dtype=complex)
    return F2 @ F1


def is_geodesic(curve: Curve, samples, tol: float = 1e-8) -> bool:
    for s in np.asarray(samples, dtype=float).ravel():
        f = frenet(curve, float(s))
        if max(abs(f.kappa), abs(f.tau)) > tol:
            return False
    return True
