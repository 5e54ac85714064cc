"""Closed-form model surfaces and the relations among them.

Catenoids (elliptic, hyperbolic, parabolic), helicoids, the horosphere and
umbilic planes, together with the helicoid locus ``delta(a)`` in the plane
of catenoid data ``(w, delta dw / w^2)``, the Lawson-type map ``T`` and
the lightlike Gauss map duality.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import calculus as C
from .cone import inner
from .errors import BadParameter, DegeneratePoint, PoleAtMinusHalf
from .surfaces import (
    Immersion, PlaneSpec, curvatures, first_form, gauss_map_immersion, horosphere_matrix,
    lightlike_gauss_map, umbilic_surface,
)
from .weierstrass import HolLift, NullFrame

KINDS = ("EllipticCatenoid", "HyperbolicCatenoid", "ParabolicCatenoid", "Helicoid",
         "ConformalHelicoid", "Horosphere", "Plane")

DELTA_MAX = 1 / (2 * math.sqrt(3))
PARABOLIC_DELTA = -0.25


def _diag(a, b):
    return C.mat([[a, 0], [0, b]])


def _geodesic(t):
    return C.mat([[t * t, t], [t, 1]])


# -- lifts and frames ----------------------------------------------------------------

def elliptic_lift(a: float) -> HolLift:
    return HolLift(lambda z: C.exp(z * (1j * (a + 1))), lambda z: C.exp(z * (1j * (a - 1))), 1.0)


def hyperbolic_lift(b: float) -> HolLift:
    return HolLift(lambda z: C.exp(z * (1j * b + 1)), lambda z: C.exp(z * (1j * b - 1)), 1.0)


def parabolic_lift(c: float) -> HolLift:
    return HolLift(lambda z: C.exp(z * (1j * c)) * z, lambda z: C.exp(z * (1j * c)), 1.0)


def helicoid_lift(a: float) -> HolLift:
    """``e^{iaz} (e^z, 1)``, the lift of the conformal helicoid."""
    return exponential_lift(1j * a)


def exponential_lift(c: complex) -> HolLift:
    """``e^{cz} (e^z, 1)``."""
    return HolLift(lambda z: C.exp(z * (c + 1)), lambda z: C.exp(z * c), 0.0)


def elliptic_frame(a: float) -> NullFrame:
    if a == 0:
        raise BadParameter("elliptic catenoid frame needs a != 0")
    k1, k2 = -(a + 1) ** 2 / (4 * a), -(a - 1) ** 2 / (4 * a)

    def F(z):
        return C.mat([[C.exp(z * (1j * (a + 1))), C.exp(z * (-1j * (a - 1))) * k1],
                      [C.exp(z * (1j * (a - 1))), C.exp(z * (-1j * (a + 1))) * k2]])

    return NullFrame(F, f"F^E_{a}")


def hyperbolic_frame(b: float) -> NullFrame:
    if b == 0:
        raise BadParameter("hyperbolic catenoid frame needs b != 0")
    k1, k2 = -1j * (b - 1j) ** 2 / (4 * b), -1j * (b + 1j) ** 2 / (4 * b)

    def F(z):
        return C.mat([[C.exp(z * (1j * b + 1)), C.exp(z * (-(1j * b - 1))) * k1],
                      [C.exp(z * (1j * b - 1)), C.exp(z * (-(1j * b + 1))) * k2]])

    return NullFrame(F, f"F^H_{b}")


def parabolic_frame(c: float) -> NullFrame:
    def F(z):
        e, ei = C.exp(z * (1j * c)), C.exp(z * (-1j * c))
        return C.mat([[z * e, (z * (1j * c) + 2) * ei * -0.5], [e, ei * (-0.5j * c)]])

    return NullFrame(F, f"F^P_{c}")


def exponential_frame(c: complex) -> NullFrame:
    """Closed-form null frame of ``e^{cz} (e^z, 1)``; ``c = ia`` gives the helicoid frame."""
    if abs(2 * c + 1) == 0:
        raise PoleAtMinusHalf("c = -1/2")
    m = np.array([[1, -(c + 1) ** 2 / (2 * c + 1)], [1, -c ** 2 / (2 * c + 1)]], dtype=complex)

    def F(z):
        d = _diag(C.exp(z * 0.5), C.exp(z * -0.5))
        return d @ m @ _diag(C.exp(z * c), C.exp(z * -c)) @ d

    return NullFrame(F, f"F_{c}")


def helicoid_frame(a: float) -> NullFrame:
    return exponential_frame(1j * a)


# -- immersions -----------------------------------------------------------------------

def helicoid(a: float, b: float, domain=(0.1, 2.0, 0.0, 2 * math.pi)) -> Immersion:
    """``H^{a,b}(u, v) = D(v) [[u^2, u], [u, 1]] D(v)*`` with ``D(v) = diag(e^{(a+ib)v}, e^{-(a+ib)v})``."""
    lam = a + 1j * b

    def ev(u, v):
        D = _diag(C.exp(v * lam), C.exp(v * -lam))
        return D @ _geodesic(u) @ C.dagger(D)

    return Immersion(ev, domain, f"Helicoid({a},{b})")


def helix(a: float, b: float):
    """The curve ``v -> H^{a,b}(1 / (2 sqrt(a^2 + b^2)), v)``."""
    u = 1 / (2 * math.hypot(a, b))
    lam = a + 1j * b
    mid = np.array([[u * u, u], [u, 1]], dtype=complex)

    def gamma(v):
        D = _diag(C.exp(v * lam), C.exp(v * -lam))
        return D @ mid @ C.dagger(D)

    return gamma


def conformal_helicoid(a: float, domain=(-1.0, 1.0, -1.0, 1.0)) -> Immersion:
    """``e^{-2av} [[e^{2u}, e^{u+iv}], [e^{u-iv}, 1]]``."""

    def ev(u, v):
        return C.mat([[C.exp(u * 2), C.exp(u + 1j * v)], [C.exp(u - 1j * v), 1]]) * C.exp(v * (-2 * a))

    return Immersion(ev, domain, f"ConformalHelicoid({a})")


def conformal_helicoid_gauss(a: float, u, v) -> np.ndarray:
    """Closed form of the lightlike Gauss map of the conformal helicoid."""
    u, v = np.asarray(u, float), np.asarray(v, float)
    s = -2 * np.exp(2 * a * v)
    out = np.empty(np.broadcast(u, v).shape + (2, 2), dtype=complex)
    out[..., 0, 0] = s * (a * a + 1)
    out[..., 0, 1] = s * a * (a - 1j) * np.exp(-u + 1j * v)
    out[..., 1, 0] = s * a * (a + 1j) * np.exp(-u - 1j * v)
    out[..., 1, 1] = s * a * a * np.exp(-2 * u)
    return out


def parabolic_catenoid(c: float, domain=(-1.0, 1.0, -1.0, 1.0)) -> Immersion:
    """``e^{-2cv} P(iv) [[u^2, u], [u, 1]] P(iv)*``, which equals ``phi phi*`` for ``phi = e^{icz}(z, 1)``."""

    def ev(u, v):
        P = C.mat([[1, v * 1j], [0, 1]])
        return (P @ _geodesic(u) @ C.dagger(P)) * C.exp(v * (-2 * c))

    return Immersion(ev, domain, f"ParabolicCatenoid({c})")


def parabolic_catenoid_ruled(c: float, domain=(-1.0, 1.0, -1.0, 1.0)) -> Immersion:
    """``P(iv) D1(e^{cv}) [[u^2, u], [u, 1]] D1(e^{cv})* P(iv)*``; rulings ``u -> X(u, v)`` are geodesics."""

    def ev(u, v):
        P = C.mat([[1, v * 1j], [0, 1]])
        D = P @ _diag(C.exp(v * c), C.exp(v * -c))
        return D @ _geodesic(u) @ C.dagger(D)

    return Immersion(ev, domain, f"ParabolicCatenoidRuled({c})")


def parabolic_catenoid_normal_form(c: float, domain=(-1.0, 1.0, -1.0, 1.0)) -> Immersion:
    """The normal form ``P(iv) D1(e^{-cv/2}) [[u^2, u], [u, 1]] D1(e^{-cv/2})* P(iv)*`` of ruled classification."""
    return parabolic_catenoid_ruled(-c / 2, domain)


def horosphere(domain=(-1.0, 1.0, -1.0, 1.0)) -> Immersion:
    return Immersion(horosphere_matrix, domain, "Horosphere")


# -- the catalog -----------------------------------------------------------------------

@dataclass(frozen=True)
class CatalogSurface:
    kind: str
    params: dict
    immersion: Immersion
    lift: HolLift | None = None
    frame: NullFrame | None = None
    singular_margin: float = 0.0

    def sample_grid(self, n: int = 21):
        return self.immersion.grid(n, self.singular_margin)


def _check(cond: bool, msg: str):
    if not cond:
        raise BadParameter(msg)


def build(kind: str, **params) -> CatalogSurface:
    """Build a catalog surface by kind name (see ``KINDS``)."""
    if kind == "EllipticCatenoid":
        a = float(params.get("a", 2.0))
        _check(a not in (0.0, 1.0, -1.0), "elliptic catenoid needs a not in {0, 1, -1}")
        lift = elliptic_lift(a)
        return CatalogSurface(kind, {"a": a}, lift.surface(label=f"EllipticCatenoid({a})"), lift, elliptic_frame(a))
    if kind == "HyperbolicCatenoid":
        b = float(params.get("b", 1.0))
        _check(b != 0, "hyperbolic catenoid needs b != 0")
        lift = hyperbolic_lift(b)
        return CatalogSurface(kind, {"b": b}, lift.surface(label=f"HyperbolicCatenoid({b})"), lift, hyperbolic_frame(b))
    if kind == "ParabolicCatenoid":
        c = float(params.get("c", 1.0))
        return CatalogSurface(kind, {"c": c}, parabolic_catenoid(c), parabolic_lift(c), parabolic_frame(c))
    if kind == "Helicoid":
        a, b = float(params.get("a", 1.0)), float(params.get("b", 1.0))
        _check(b != 0, "helicoid needs b != 0")
        return CatalogSurface(kind, {"a": a, "b": b}, helicoid(a, b), singular_margin=0.0)
    if kind == "ConformalHelicoid":
        a = float(params.get("a", 1.0))
        return CatalogSurface(kind, {"a": a}, conformal_helicoid(a), helicoid_lift(a), helicoid_frame(a))
    if kind == "Horosphere":
        return CatalogSurface(kind, {}, horosphere())
    if kind == "Plane":
        M = np.asarray(params.get("M", [[-2, 0], [0, 0]]), dtype=complex)
        q = float(params.get("q", 1.0))
        return CatalogSurface(kind, {"M": M, "q": q}, umbilic_surface(PlaneSpec(M, q)))
    raise BadParameter(f"unknown kind {kind!r}")


# -- the delta plane ----------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyLocus:
    delta: complex
    kind: str
    a: float | None = None
    x: float | None = None
    y: float | None = None
    residual: float | None = None
    census: dict | None = None


def cardioid_residual(x, y):
    r2 = x * x + y * y
    return r2 * r2 + 0.25 * x * r2 - y * y / 64


def delta_of_a(a) -> complex:
    a = np.asarray(a, dtype=float)
    return -a * (a - 1j) / (2 * a - 1j) ** 2


def helicoid_locus(a: float) -> FamilyLocus:
    d = complex(delta_of_a(a))
    p = -0.25 - d
    return FamilyLocus(d, "Helicoid", float(a), p.real, p.imag, float(cardioid_residual(p.real, p.imag)))


def locus_parameter(delta: complex, tol: float = 1e-9) -> float | None:
    """The real ``a`` with ``delta(a) = delta``, or ``None`` off the helicoid locus.

    Uses ``-1 / (1 + 4 delta(a)) = (2a - i)^2``.
    """
    delta = complex(delta)
    if abs(1 + 4 * delta) == 0:
        return None
    s = np.sqrt(-1 / (1 + 4 * delta) + 0j)
    if s.imag > 0:
        s = -s
    a = s.real / 2
    if abs(complex(delta_of_a(a)) - delta) <= tol:
        return float(a)
    return None


def associated_family_census(r: float, tol: float = 1e-12) -> dict:
    """Counts of surface types among ``(w, lam r dw/w^2)`` for ``|lam| = 1``.

    ``lam = 1`` is elliptic; ``lam = -1`` is elliptic, parabolic or
    hyperbolic as ``-r`` is above, at or below ``-1/4``; helicoids come from
    positive roots ``t = a^2`` of ``(1 - 16 r^2) t^2 + (1 - 8 r^2) t - r^2 = 0``
    (each root gives the conjugate pair ``a = +-sqrt(t)``).
    """
    if r <= 0:
        raise BadParameter("radius must be positive")
    out = {"elliptic": 1, "hyperbolic": 0, "parabolic": 0, "helicoid": 0}
    if abs(r - 0.25) <= tol:
        out["parabolic"] += 1
    elif r < 0.25:
        out["elliptic"] += 1
    else:
        out["hyperbolic"] += 1
    A, B, Cc = 1 - 16 * r * r, 1 - 8 * r * r, -r * r
    if abs(A) <= tol:
        roots = [-Cc / B]
    else:
        disc = B * B - 4 * A * Cc
        if disc < -tol:
            roots = []
        elif abs(disc) <= tol:
            roots = [-B / (2 * A)]
        else:
            sq = math.sqrt(disc)
            roots = [(-B + sq) / (2 * A), (-B - sq) / (2 * A)]
    out["helicoid"] = 2 * sum(1 for t in roots if t > tol)
    return out


def classify_delta(delta: complex, tol: float = 1e-9) -> FamilyLocus:
    delta = complex(delta)
    census = associated_family_census(abs(delta)) if abs(delta) > 0 else None
    if abs(delta.imag) <= tol:
        d = delta.real
        if abs(d) <= tol:
            kind = "Other"
        elif abs(d - PARABOLIC_DELTA) <= tol:
            kind = "Parabolic"
        elif d > PARABOLIC_DELTA:
            kind = "Elliptic"
        else:
            kind = "Hyperbolic"
        return FamilyLocus(delta, kind, census=census)
    a = locus_parameter(delta, tol)
    if a is not None:
        loc = helicoid_locus(a)
        return FamilyLocus(delta, "Helicoid", a, loc.x, loc.y, loc.residual, census)
    return FamilyLocus(delta, "Other", census=census)


def delta_tilde_of_c(c: complex, tol: float = 1e-12) -> FamilyLocus:
    """``-c(c+1)/(2c+1)^2`` tagged by the type of ``c``.

    Real ``c`` gives an elliptic catenoid, ``c = -1/2 + it`` a hyperbolic one
    and imaginary ``c = is`` a helicoid with ``delta(s) = delta~(is)``.
    """
    c = complex(c)
    if abs(2 * c + 1) <= tol:
        raise PoleAtMinusHalf("delta~ has a pole at c = -1/2")
    d = -c * (c + 1) / (2 * c + 1) ** 2
    if abs(c) <= tol:
        return FamilyLocus(d, "Other")
    if abs(c.imag) <= tol:
        return FamilyLocus(d, "Elliptic")
    if abs(c.real + 0.5) <= tol:
        return FamilyLocus(d, "Hyperbolic")
    if abs(c.real) <= tol:
        loc = helicoid_locus(c.imag)
        return FamilyLocus(d, "Helicoid", c.imag, loc.x, loc.y, loc.residual)
    return classify_delta(d)


def locus_sweep(n: int = 2000, a_max: float = 50.0) -> np.ndarray:
    """``n`` parameters in ``[-a_max, a_max]``, uniform in the angle ``theta`` of ``a = tan(theta) / 2``.

    ``2a - i`` has argument ``-theta`` up to sign, so the samples are evenly
    spread along the cardioid rather than bunched near its cusp.
    """
    th = np.arctan(2 * a_max)
    return np.tan(np.linspace(-th, th, n)) / 2


def locus_rows(a_values) -> list[dict]:
    rows = []
    for a in np.asarray(a_values, dtype=float):
        loc = helicoid_locus(float(a))
        rows.append({"a": float(a), "re_delta": loc.delta.real, "im_delta": loc.delta.imag,
                     "x": loc.x, "y": loc.y, "residual": loc.residual})
    return rows


def locus_csv(a_values) -> str:
    """CSV text with columns ``a, re_delta, im_delta, x, y, residual`` (17 significant digits)."""
    buf = io.StringIO()
    cols = ["a", "re_delta", "im_delta", "x", "y", "residual"]
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in locus_rows(a_values):
        w.writerow([f"{row[k]:.17g}" for k in cols])
    return buf.getvalue()


# -- Lawson-type correspondence ---------------------------------------------------------

def lawson_T(x, y, ell) -> np.ndarray:
    """``e^ell [[x^2 + y^2, x + iy], [x - iy, 1]]``."""
    x, y, ell = (np.asarray(t, dtype=float) for t in (x, y, ell))
    m = np.asarray(horosphere_matrix(x, y))
    return np.exp(ell)[..., None, None] * m


def lawson_surface(ell: Callable, domain=(-1.0, 1.0, -1.0, 1.0)) -> Immersion:
    """Image under ``T`` of the graph ``(x, y) -> ell(x, y)`` of isotropic 3-space."""

    def ev(u, v):
        return horosphere_matrix(u, v) * C.exp(ell(u, v))

    return Immersion(ev, domain, "lawson")


# -- Gauss duality and fingerprints -------------------------------------------------------

@dataclass(frozen=True)
class GaussDual:
    G: np.ndarray
    kind: str
    immersed: bool
    closed_form_error: float | None = None
    gauss_H: float | None = None
    metric_residual: float | None = None


def gauss_dual(kind: str, params: dict, u, v) -> GaussDual:
    """Lightlike Gauss map at ``(u, v)`` plus checks of the Gauss-map surface."""
    surf = build(kind, **params)
    X = surf.immersion
    G = lightlike_gauss_map(X, u, v)
    closed = None
    if kind == "ConformalHelicoid":
        closed = float(np.max(np.abs(G - conformal_helicoid_gauss(surf.params["a"], u, v))))
    Y = gauss_map_immersion(X)
    try:
        gY = first_form(Y, u, v)
        if np.any(gY[..., 0] * gY[..., 2] - gY[..., 1] ** 2 <= 1e-12 * np.max(np.abs(gY)) ** 2 + 1e-300):
            raise DegeneratePoint("Gauss map not immersed")
        HY = float(np.max(np.abs(curvatures(Y, u, v)[1].H)))
        gX = first_form(X, u, v)
        K = curvatures(X, u, v)[1].K
        scale = np.max(np.abs(gX), axis=-1)
        res = float(np.max(np.abs(gY + K[..., None] * gX) / scale[..., None]))
    except DegeneratePoint:
        return GaussDual(G, kind, False, closed)
    return GaussDual(G, kind, True, closed, HY, res)


@dataclass(frozen=True)
class Fingerprint:
    """Invariants of a surface at marked points, unchanged by isometries and homotheties.

    ``gram`` is the matrix of pairings ``<X(p_i), X(p_j)>`` divided by its
    largest entry; ``scaled_K`` is ``K`` times the square of that entry.
    """

    gram: np.ndarray
    H: np.ndarray
    scaled_K: np.ndarray

    def distance(self, other: "Fingerprint") -> float:
        """Largest entrywise difference, relative where entries exceed one."""
        def rel(x, y):
            return np.max(np.abs(x - y) / np.maximum(1.0, np.maximum(np.abs(x), np.abs(y))))
        return float(max(rel(self.gram, other.gram), rel(self.H, other.H), rel(self.scaled_K, other.scaled_K)))

    def matches(self, other: "Fingerprint", tol: float = 1e-6) -> bool:
        return self.distance(other) <= tol


def fingerprint(X: Immersion, u, v) -> Fingerprint:
    u, v = np.asarray(u, float), np.asarray(v, float)
    P = X(u, v)
    gram = inner(P[:, None], P[None, :])
    scale = float(np.max(np.abs(gram)))
    _, cd = curvatures(X, u, v)
    return Fingerprint(gram / scale, cd.H * scale, cd.K * scale ** 2)


def marked_points(n: int = 10, seed: int = 0, box=(-0.8, 0.8)):
    rng = np.random.default_rng(seed)
    return rng.uniform(*box, n), rng.uniform(*box, n)
