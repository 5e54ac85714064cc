"""Hermitian model of Lorentzian 4-space and the SL(2,C) isometry action.

A point ``(x0, x1, x2, x3)`` is the Hermitian matrix
``[[x0 + x3, x1 + i x2], [x1 - i x2, x0 - x3]]`` and ``<X, X> = -det X``.
Functions accept plain ``(..., 2, 2)`` arrays, :class:`HermMatrix` values,
and matrix jets wherever that makes sense.
"""

from __future__ import annotations

import cmath
import enum
import json
from dataclasses import dataclass

import numpy as np

from .calculus import Jet
from .errors import NonUnimodular, ZeroGenerator, ZeroParameter

SIGNATURE = np.diag([-1.0, 1.0, 1.0, 1.0])


@dataclass(frozen=True)
class HermMatrix:
    """A point of Lorentzian 4-space in coordinates."""

    x0: float
    x1: float
    x2: float
    x3: float

    @property
    def coords(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])

    @property
    def matrix(self) -> np.ndarray:
        return herm(*self.coords)

    @classmethod
    def from_matrix(cls, m) -> "HermMatrix":
        return cls(*map(float, coords(m)))

    def to_json(self) -> str:
        return json.dumps({"x0": self.x0, "x1": self.x1, "x2": self.x2, "x3": self.x3}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "HermMatrix":
        d = json.loads(text)
        return cls(d["x0"], d["x1"], d["x2"], d["x3"])


def as_matrix(X):
    if isinstance(X, HermMatrix):
        return X.matrix
    if isinstance(X, Jet):
        return X
    return np.asarray(X, dtype=complex)


def herm(x0, x1, x2, x3) -> np.ndarray:
    x0, x1, x2, x3 = np.broadcast_arrays(*(np.asarray(x, dtype=float) for x in (x0, x1, x2, x3)))
    m = np.empty(x0.shape + (2, 2), dtype=complex)
    m[..., 0, 0] = x0 + x3
    m[..., 0, 1] = x1 + 1j * x2
    m[..., 1, 0] = x1 - 1j * x2
    m[..., 1, 1] = x0 - x3
    return m


def coords(m) -> np.ndarray:
    """Coordinates ``(x0, x1, x2, x3)`` of a Hermitian matrix (last axis)."""
    m = as_matrix(m)
    return np.stack([
        (m[..., 0, 0].real + m[..., 1, 1].real) / 2,
        m[..., 0, 1].real,
        m[..., 0, 1].imag,
        (m[..., 0, 0].real - m[..., 1, 1].real) / 2,
    ], axis=-1)


def inner(X, Y):
    """Minkowski pairing, the polarization of ``<X, X> = -det X``.

    For jets the result is a real-part jet; for arrays it is a real array.
    """
    X, Y = as_matrix(X), as_matrix(Y)
    if isinstance(X, Jet) or isinstance(Y, Jet):
        if not isinstance(X, Jet):
            X, Y = Y, X
        val = X[0, 0] * Y[1, 1] + X[1, 1] * Y[0, 0] - X[0, 1] * Y[1, 0] - X[1, 0] * Y[0, 1]
        return (val * -0.5).real
    val = X[..., 0, 0] * Y[..., 1, 1] + X[..., 1, 1] * Y[..., 0, 0] - X[..., 0, 1] * Y[..., 1, 0] - X[..., 1, 0] * Y[..., 0, 1]
    return -0.5 * val.real


def minkowski_inner(X, Y) -> float:
    return float(inner(X, Y))


def act(F, X):
    """The isometry ``X -> F X F*``."""
    F = as_matrix(F)
    X = as_matrix(X)
    if isinstance(F, Jet) or isinstance(X, Jet):
        Fh = F.H if isinstance(F, Jet) else np.conj(np.swapaxes(F, -1, -2))
        return F @ X @ Fh
    return F @ X @ np.conj(np.swapaxes(F, -1, -2))


def check_unimodular(F, tol: float = 1e-10) -> np.ndarray:
    F = np.asarray(F, dtype=complex)
    det = F[..., 0, 0] * F[..., 1, 1] - F[..., 0, 1] * F[..., 1, 0]
    err = np.max(np.abs(det - 1))
    if err > tol:
        raise NonUnimodular(f"|det F - 1| = {err:.3e} exceeds {tol:.1e}")
    return F


@dataclass(frozen=True)
class Similarity:
    """Homothety ``r > 0`` composed with the isometry ``F``: ``X -> r F X F*``."""

    F: np.ndarray
    r: float = 1.0

    def __post_init__(self):
        check_unimodular(self.F)
        if not self.r > 0:
            raise ValueError("homothety factor must be positive")

    def __call__(self, X):
        return self.r * act(self.F, X)


def rotation_D1(mu: complex) -> np.ndarray:
    if mu == 0:
        raise ZeroParameter("D1 needs a nonzero parameter")
    return np.array([[mu, 0], [0, 1 / mu]], dtype=complex)


def rotation_D2(mu: complex) -> np.ndarray:
    if mu == 0:
        raise ZeroParameter("D2 needs a nonzero parameter")
    return np.array([[0, mu], [-1 / mu, 0]], dtype=complex)


def rotation_P(mu: complex) -> np.ndarray:
    return np.array([[1, mu], [0, 1]], dtype=complex)


class Region(enum.Enum):
    LightConePlus = "Q3+"
    LightConeMinus = "Q3-"
    Isotropic3 = "I3"
    Other = "other"


def classify_point(X, tol: float = 1e-9) -> Region:
    """Region membership; the null test uses the relative tolerance ``tol (1 + |X|^2)``."""
    m = as_matrix(X)
    c = coords(m)
    scale = tol * (1 + float(np.dot(c, c)))
    norm = minkowski_inner(m, m)
    trace = 2 * c[0]
    if abs(norm) <= scale:
        if trace > tol:
            return Region.LightConePlus
        if trace < -tol:
            return Region.LightConeMinus
    if abs(c[0] - c[3]) <= tol:
        return Region.Isotropic3
    return Region.Other


@dataclass(frozen=True)
class OneParamSubgroup:
    """``s -> D1(exp(lam s))`` (``kind='diagonal'``) or ``s -> P(r s)`` (``kind='parabolic'``)."""

    kind: str
    param: complex

    def __call__(self, s) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        if self.kind == "diagonal":
            e = np.exp(self.param * s)
            zero = np.zeros_like(e)
            return np.stack([np.stack([e, zero], -1), np.stack([zero, 1 / e], -1)], -2)
        one = np.ones_like(s, dtype=complex)
        return np.stack([np.stack([one, self.param * s * one], -1), np.stack([0 * one, one], -1)], -2)

    @property
    def motion(self) -> str:
        """elliptic / hyperbolic / screw for diagonal subgroups, parabolic otherwise.

        ``lam = i b`` (a helicoid generator with ``a = 0``) counts as elliptic.
        """
        if self.kind == "parabolic":
            return "parabolic"
        lam = complex(self.param)
        if abs(lam.real) <= 1e-12 * max(1.0, abs(lam)):
            return "elliptic"
        if abs(lam.imag) <= 1e-12 * max(1.0, abs(lam)):
            return "hyperbolic"
        return "screw"


def _unimodular_columns(v1, v2) -> np.ndarray:
    M = np.column_stack([v1, v2]).astype(complex)
    d = np.linalg.det(M)
    return M / cmath.sqrt(d)


def screw_normal_form(A, tol: float = 1e-12) -> tuple[OneParamSubgroup, np.ndarray]:
    """Conjugate ``s -> exp(s A)`` to a diagonal or parabolic normal form.

    Returns ``(N, M)`` with ``exp(s A) = M N(s) M^-1`` and ``det M = 1``.
    For ``det A != 0`` the normal form is ``D1(exp(lam s))`` with the principal
    root ``lam = sqrt(-det A)``; otherwise it is ``P(r s)`` with ``r > 0``.
    """
    A = np.asarray(A, dtype=complex)
    scale = np.max(np.abs(A))
    if scale == 0:
        raise ZeroGenerator("generator must be nonzero")
    a, b, c = A[0, 0], A[0, 1], A[1, 0]
    det = -(a * a + b * c)
    if abs(det) > tol * scale * scale:
        lam = cmath.sqrt(-det)

        def eigvec(mu):
            cand1 = np.array([b, mu - a])
            cand2 = np.array([mu + a, c])
            return cand1 if np.linalg.norm(cand1) >= np.linalg.norm(cand2) else cand2

        M = _unimodular_columns(eigvec(lam), eigvec(-lam))
        return OneParamSubgroup("diagonal", lam), M

    # nilpotent: A = [[ab, -a^2], [b^2, -ab]] written with alpha, beta
    alpha = cmath.sqrt(-b)
    beta = a / alpha if abs(alpha) > tol * np.sqrt(scale) else cmath.sqrt(c)
    if abs(alpha) > tol * np.sqrt(scale) and abs(beta) > tol * np.sqrt(scale):
        lam = cmath.sqrt(-1j * alpha / beta)
        h = 2j * alpha * beta
        B = np.array([[1, -1j], [-1j, 1]]) / np.sqrt(2)
        pre = np.linalg.inv(rotation_D2(lam)) @ B
    elif abs(alpha) > tol * np.sqrt(scale):
        h = b
        pre = np.eye(2, dtype=complex)
    else:
        # lower triangular; D2(1) moves it to upper triangular
        h = -c
        pre = np.linalg.inv(rotation_D2(1))
    r, theta = abs(h), cmath.phase(h)
    N = np.diag([cmath.exp(1j * theta / 2), cmath.exp(-1j * theta / 2)])
    return OneParamSubgroup("parabolic", r), pre @ N
