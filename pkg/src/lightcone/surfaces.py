"""Immersions into the light cone: lightlike Gauss map, fundamental forms, curvatures.

An :class:`Immersion` wraps an evaluator ``(u, v) -> matrix jet``.  All
quantities are computed from exact jets and vectorize over arrays of
sample points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import calculus as C
from .cone import SIGNATURE, as_matrix, coords, herm, inner
from .errors import DegeneratePoint, EmptyIntersection

HOROSPHERE_GAUSS = np.array([[-2, 0], [0, 0]], dtype=complex)


@dataclass(frozen=True)
class Immersion:
    """``evaluator(u_jet, v_jet)`` returns the matrix jet of ``X``.

    ``jet_fn`` (optional) computes the jet directly from a point and an
    order; it is used by derived immersions such as Gauss-map surfaces,
    which need higher-order jets of another immersion.
    """

    evaluator: Callable | None
    domain: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)
    label: str = "surface"
    jet_fn: Callable | None = field(default=None, compare=False)

    def jet(self, u, v, order: int = 2) -> C.Jet:
        if self.jet_fn is not None:
            return self.jet_fn(u, v, order)
        out = self.evaluator(*C.seed_vars(u, v, order))
        if not isinstance(out, C.Jet):
            return C.Jet.constant(np.broadcast_to(out, np.broadcast(np.asarray(u), np.asarray(v)).shape + (2, 2)), 2, order, 2)
        return out

    def __call__(self, u, v) -> np.ndarray:
        return np.asarray(self.jet(u, v, 0).value)

    def grid(self, n: int = 21, margin: float = 0.0):
        u0, u1, v0, v1 = self.domain
        us = np.linspace(u0 + margin, u1 - margin, n)
        vs = np.linspace(v0 + margin, v1 - margin, n)
        return np.meshgrid(us, vs, indexing="ij")


@dataclass(frozen=True)
class FundamentalForms:
    E: np.ndarray
    F_m: np.ndarray
    G_m: np.ndarray
    L: np.ndarray
    M_m: np.ndarray
    N_m: np.ndarray

    @property
    def det_g(self):
        return self.E * self.G_m - self.F_m ** 2


@dataclass(frozen=True)
class CurvatureData:
    H: np.ndarray
    K: np.ndarray


def _first_derivatives(J: C.Jet):
    return J.value, J.d_u, J.d_v


def gauss_map_from_derivatives(X, Xu, Xv, rank_tol: float = 1e-12) -> np.ndarray:
    """Solve ``<G,X_u> = <G,X_v> = 0, <G,X> = 1`` and fix the free multiple of ``X`` by ``<G,G> = 0``."""
    X, Xu, Xv = (np.asarray(a, dtype=complex) for a in (X, Xu, Xv))
    rows = np.stack([coords(Xu), coords(Xv), coords(X)], axis=-2) @ SIGNATURE
    U, S, Vt = np.linalg.svd(rows)
    if np.any(S[..., 2] <= rank_tol * np.maximum(S[..., 0], 1e-300)):
        raise DegeneratePoint("Gauss-map system is rank-deficient (surface not immersed)")
    rhs = np.zeros(rows.shape[:-1])
    rhs[..., 2] = 1.0
    y = np.einsum("...ji,...j->...i", U, rhs) / S
    g0 = np.einsum("...ji,...j->...i", Vt[..., :3, :], y)
    G0 = herm(*np.moveaxis(g0, -1, 0))
    t = -inner(G0, G0) / 2
    return G0 + t[..., None, None] * X


def lightlike_gauss_map(X: Immersion, u, v) -> np.ndarray:
    return gauss_map_from_derivatives(*_first_derivatives(X.jet(u, v, 1)))


def fundamental_forms(X: Immersion, u, v) -> FundamentalForms:
    J = X.jet(u, v, 2)
    G = gauss_map_from_derivatives(J.value, J.d_u, J.d_v)
    Xu, Xv = J.d_u, J.d_v
    return FundamentalForms(
        E=inner(Xu, Xu), F_m=inner(Xu, Xv), G_m=inner(Xv, Xv),
        L=inner(G, J.d_uu), M_m=inner(G, J.d_uv), N_m=inner(G, J.d_vv),
    )


def curvatures_from_forms(ff: FundamentalForms, degenerate_tol: float = 1e-12) -> CurvatureData:
    D = ff.det_g
    scale = np.maximum(ff.E ** 2 + ff.G_m ** 2, 1e-300)
    if np.any(D <= degenerate_tol * scale):
        raise DegeneratePoint("metric is degenerate or not spacelike")
    H = (ff.E * ff.N_m - 2 * ff.F_m * ff.M_m + ff.G_m * ff.L) / (2 * D)
    K = (ff.L * ff.N_m - ff.M_m ** 2) / D
    return CurvatureData(H, K)


def curvatures(X: Immersion, u, v) -> tuple[FundamentalForms, CurvatureData]:
    ff = fundamental_forms(X, u, v)
    return ff, curvatures_from_forms(ff)


def mean_curvature(X: Immersion, u, v) -> np.ndarray:
    return curvatures(X, u, v)[1].H


# -- Laplacian form of the Gauss map ------------------------------------------------

def laplacian_jet(J: C.Jet) -> C.Jet:
    """``Delta_g X = g^ij (X_ij - Gamma^k_ij X_k)`` for a bivariate matrix jet (loses two orders)."""
    Xu, Xv = J.partial(0), J.partial(1)
    Xuu, Xuv, Xvv = Xu.partial(0), Xu.partial(1), Xv.partial(1)
    Xu, Xv = Xu.truncate(Xuu.order), Xv.truncate(Xuu.order)
    E, F, G = inner(Xu, Xu), inner(Xu, Xv), inner(Xv, Xv)
    r = (E * G - F * F).reciprocal()
    iE, iF, iG = G * r, -F * r, E * r
    hess = {(0, 0): Xuu, (0, 1): Xuv, (1, 1): Xvv}
    weights = {(0, 0): iE, (0, 1): iF * 2.0, (1, 1): iG}
    out = None
    for key, Xij in hess.items():
        a, b = inner(Xij, Xu), inner(Xij, Xv)
        # tangential part g^kl <X_ij, X_l> X_k
        tang = Xu * (iE * a + iF * b) + Xv * (iF * a + iG * b)
        term = (Xij - tang) * weights[key]
        out = term if out is None else out + term
    return out


def gauss_map_jet(X: Immersion, u, v, order: int = 2) -> tuple[C.Jet, C.Jet]:
    """Jets of ``(G, H)`` using ``G = H X - Delta_g X / 2`` and ``H = -<Delta X, Delta X>/8``."""
    J = X.jet(u, v, order + 2)
    lap = laplacian_jet(J)
    H = inner(lap, lap) * (-1.0 / 8)
    G = J.truncate(order) * H - lap * 0.5
    return G, H


def gauss_map_immersion(X: Immersion) -> Immersion:
    """The lightlike Gauss map viewed as a surface (in the past cone)."""

    def jet_fn(u, v, order):
        return gauss_map_jet(X, u, v, order)[0]

    return Immersion(None, X.domain, f"gauss({X.label})", jet_fn=jet_fn)


def first_form(X: Immersion, u, v) -> np.ndarray:
    J = X.jet(u, v, 1)
    Xu, Xv = J.d_u, J.d_v
    E, F, G = inner(Xu, Xu), inner(Xu, Xv), inner(Xv, Xv)
    return np.stack([E, F, G], axis=-1)


def metric_relation_residual(X: Immersion, u, v) -> float:
    """Max of ``|g_G + K g_X|`` relative to ``|g_X|``, where the Gauss map is immersed."""
    gX = first_form(X, u, v)
    gG = first_form(gauss_map_immersion(X), u, v)
    K = curvatures(X, u, v)[1].K
    scale = np.max(np.abs(gX), axis=-1)
    return float(np.max(np.abs(gG + K[..., None] * gX) / scale[..., None]))


# -- graphs over the horosphere -------------------------------------------------------

def horosphere_matrix(u, v):
    return C.mat([[u * u + v * v, u + 1j * v], [u - 1j * v, 1]])


def graph_surface(f: Callable, domain=(-1.0, 1.0, -1.0, 1.0), label: str = "graph") -> Immersion:
    """``X_f = e^f [[u^2 + v^2, u + iv], [u - iv, 1]]`` for a jet-capable ``f(u, v)``."""

    def ev(u, v):
        return horosphere_matrix(u, v) * C.exp(f(u, v))

    return Immersion(ev, domain, label)


def graph_mean_curvature(f: Callable, u, v) -> np.ndarray:
    J = f(*C.seed_vars(u, v, 2))
    return np.real(0.5 * np.exp(-2 * J.value) * (J.d_uu + J.d_vv))


def horosphere(domain=(-1.0, 1.0, -1.0, 1.0)) -> Immersion:
    return Immersion(horosphere_matrix, domain, "horosphere")


# -- totally umbilic surfaces ------------------------------------------------------------

@dataclass(frozen=True)
class PlaneSpec:
    """The intersection ``{X : <X, M> = q}`` of the future cone with an affine hyperplane."""

    M: np.ndarray
    q: float

    def __post_init__(self):
        if self.q == 0:
            raise ValueError("q must be nonzero")

    @property
    def norm(self) -> float:
        M = as_matrix(self.M)
        return float(inner(M, M))

    def is_plane(self, tol: float = 1e-10) -> bool:
        return abs(self.norm) <= tol

    @property
    def mean_curvature(self) -> float:
        return self.norm / (2 * self.q ** 2)

    @property
    def gauss_curvature(self) -> float:
        return self.norm ** 2 / (4 * self.q ** 4)

    def gauss_map(self, X) -> np.ndarray:
        return -self.norm / (2 * self.q ** 2) * np.asarray(X) + np.asarray(as_matrix(self.M)) / self.q


def _null_frame(M: np.ndarray):
    """``(sigma, F)`` with ``M = sigma F diag(1,0) F*``, ``sigma = sign tr M``, ``det F = 1``."""
    sigma = 1.0 if np.trace(M).real > 0 else -1.0
    P = sigma * M
    if P[0, 0].real >= P[1, 1].real:
        p = np.sqrt(P[0, 0].real)
        q = P[1, 0] / p
    else:
        q = np.sqrt(P[1, 1].real)
        p = P[0, 1].conjugate() / q
    n = abs(p) ** 2 + abs(q) ** 2
    F = np.array([[p, -np.conj(q) / n], [q, np.conj(p) / n]], dtype=complex)
    return sigma, F


def umbilic_surface(spec: PlaneSpec, domain=(-1.0, 1.0, -1.0, 1.0), tol: float = 1e-10) -> Immersion:
    """Parametrize ``S[M, q]``.

    For null ``M`` this is the isometric chart ``Y -> Y + M~ - <Y,Y> M / (2q)``
    on the orthogonal complement of ``span{M, M~}``; otherwise the graph
    ``f = ln(q / <h(u,v), M>)`` over the horosphere ``h``.
    """
    M = np.asarray(as_matrix(spec.M), dtype=complex)
    q = float(spec.q)
    if not np.any(M):
        raise EmptyIntersection("M = 0")
    if spec.is_plane(tol):
        sigma, F = _null_frame(M)
        k = -2 * q * sigma
        if k <= 0:
            raise EmptyIntersection("<X, M> has the wrong sign on the whole cone")
        Fh = F.conj().T
        c = k / (4 * q * q)

        def ev(u, v):
            mid = C.mat([[(u * u + v * v) * c, u + 1j * v], [u - 1j * v, k]])
            return F @ mid @ Fh

        return Immersion(ev, domain, f"plane(q={q})")

    def ratio(u, v):
        h = np.asarray(horosphere_matrix(np.asarray(u, float), np.asarray(v, float)))
        return q / inner(h, M)

    u0, u1, v0, v1 = domain
    us, vs = np.meshgrid(np.linspace(u0, u1, 9), np.linspace(v0, v1, 9))
    if np.any(ratio(us, vs) <= 0):
        raise EmptyIntersection("S[M, q] does not meet the chart domain")

    def ev(u, v):
        h = horosphere_matrix(u, v)
        return h * (inner(h, M).reciprocal() * q)

    return Immersion(ev, domain, f"umbilic(q={q})")
