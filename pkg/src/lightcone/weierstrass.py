"""Null holomorphic frames, Weierstrass data and associated families.

A holomorphic map is a callable accepting complex numbers, arrays, or
jets in ``z`` (univariate, or bivariate via ``z = u + iv``).  Frames are
2x2 matrix valued; ``X = F diag(1, 0) F*`` is the induced surface.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from . import calculus as C
from .errors import NonConvergent, SingularPath, SingularSample, UndefinedData, ZeroLambda
from .surfaces import Immersion

E11 = np.array([[1, 0], [0, 0]], dtype=complex)


def holomorphic_jet(fn: Callable, z: C.Jet) -> C.Jet:
    """Evaluate a univariate holomorphic ``fn`` on an arbitrary jet ``z``.

    ``fn`` is called on univariate seeds at each expansion point and the
    resulting derivatives are composed with ``z``.
    """
    centers = np.asarray(z.value, dtype=complex)
    flat = centers.ravel()
    per_point = [fn(C.seed(c, z.order)).derivatives() for c in flat]
    derivs = []
    for k in range(z.order + 1):
        vals = np.stack([np.asarray(p[k]) for p in per_point])
        derivs.append(vals.reshape(centers.shape + vals.shape[1:]))
    return z.compose(derivs)


@dataclass(frozen=True)
class HolLift:
    """The lift ``phi = (A, C)`` of ``X = phi phi*``."""

    A: Callable
    C: Callable
    z0: complex = 0.0

    def __call__(self, z):
        return self.A(z), self.C(z)

    def surface(self, domain=(-1.0, 1.0, -1.0, 1.0), label: str = "lift") -> Immersion:
        def ev(u, v):
            z = u + 1j * v
            a, c = self.A(z), self.C(z)
            return C.mat([[a * C.conj(a), a * C.conj(c)], [c * C.conj(a), c * C.conj(c)]])

        return Immersion(ev, domain, label)


@dataclass(frozen=True)
class NullFrame:
    """A holomorphic ``SL(2, C)``-valued map ``z -> F(z)``."""

    F: Callable
    label: str = "frame"

    def __call__(self, z):
        return self.F(z)

    def jet(self, z, order: int = 1) -> C.Jet:
        return self.F(C.seed(z, order))

    def dz(self, z) -> np.ndarray:
        return np.asarray(self.jet(z, 1).d(1))

    def det_error(self, z) -> float:
        return float(np.max(np.abs(C.det2(np.asarray(self.F(np.asarray(z, dtype=complex)))) - 1)))

    def null_error(self, z) -> float:
        """``|det F_z| / |F_z|^2``; zero for a null frame."""
        Fz = self.dz(z)
        scale = np.maximum(np.sum(np.abs(Fz) ** 2, axis=(-1, -2)), 1e-300)
        return float(np.max(np.abs(C.det2(Fz)) / scale))

    def surface(self, domain=(-1.0, 1.0, -1.0, 1.0), label: str | None = None) -> Immersion:
        def ev(u, v):
            F = self.F(u + 1j * v)
            return F @ E11 @ C.dagger(F)

        return Immersion(ev, domain, label or self.label)


def frame_from_lift(lift: HolLift, via: Sequence[complex] = (), spec: C.QuadratureSpec = C.QuadratureSpec(),
                    E0: complex = 0.0) -> NullFrame:
    """``F = [[A, 0], [C, 1/A]] [[1, -E], [0, 1]]`` with ``E = int ((1/A)')^2 / (C/A)' dz``.

    ``E`` is integrated along ``z0 -> via... -> z`` with ``E(z0) = E0``
    (default 0).  Other constants change ``F`` by a unipotent factor on the
    right, which leaves ``F diag(1, 0) F*`` unchanged.
    """

    def integrand(zeta):
        z = C.seed(zeta.value, zeta.order + 1)
        a = lift.A(z)
        r = a.reciprocal()
        s = lift.C(z) * r
        return r.partial(0) * r.partial(0) * s.partial(0).reciprocal()

    E = C.antiderivative(integrand, lift.z0, spec, via)

    def F(z):
        try:
            e = E(z) + E0
        except SingularSample as exc:
            raise SingularPath(str(exc)) from exc
        a, c = lift.A(z), lift.C(z)
        return C.mat([[a, -(a * e)], [c, -(c * e) + 1 / a]])

    return NullFrame(F, "lift-frame")


@dataclass(frozen=True)
class WeierstrassData:
    """Pointwise data: Gauss maps, 1-form densities (coefficients of dz) and the Hopf density."""

    z: complex
    G: complex
    g: complex
    Omega: complex
    omega: complex
    hopf: complex
    lam: complex = 1.0

    def to_json(self) -> str:
        def enc(x):
            x = complex(x)
            return [x.real, x.imag]
        return json.dumps({k: enc(getattr(self, k)) for k in ("z", "G", "g", "Omega", "omega", "hopf")}, sort_keys=True)


def _log_derivatives(frame: NullFrame, z: complex):
    J = frame.jet(z, 2)
    Fz = J.partial(0)
    Fi = C.inv2(J.truncate(1))
    return Fz @ Fi, Fi @ Fz


def data_from_frame(frame: NullFrame, z: complex, tol: float = 1e-8) -> WeierstrassData:
    """Read ``(G, Omega)`` from ``F_z F^-1`` and ``(g, omega)`` from ``F^-1 F_z``."""
    left, right = _log_derivatives(frame, z)
    Om, om = left[1, 0], right[1, 0]
    scale = max(1.0, float(np.max(np.abs(left.value))), float(np.max(np.abs(right.value))))
    if abs(Om.value) <= 1e-14 * scale or abs(om.value) <= 1e-14 * scale:
        raise UndefinedData(f"Weierstrass data undefined at z={z}")
    G = left[0, 0] / Om
    g = right[0, 0] / om
    for L, gg, w in ((left, G, Om), (right, g, om)):
        err = max(abs(complex(L.value[0, 1]) + complex(gg.value) ** 2 * complex(w.value)),
                  abs(complex(L.value[1, 1]) + complex(gg.value) * complex(w.value)))
        if err > tol * scale * (1 + abs(complex(gg.value))) ** 2:
            raise UndefinedData(f"frame is not null at z={z} (residual {err:.2e})")
    hopf = complex(Om.value) * complex(G.d(1))
    return WeierstrassData(complex(z), complex(G.value), complex(g.value), complex(Om.value),
                           complex(om.value), hopf)


def hopf_pair(frame: NullFrame, z: complex) -> tuple[complex, complex]:
    """``(Omega G', omega g')``; the two agree for a null frame."""
    left, right = _log_derivatives(frame, z)
    G = left[0, 0] / left[1, 0]
    g = right[0, 0] / right[1, 0]
    return complex(left[1, 0].value * G.d(1)), complex(right[1, 0].value * g.d(1))


def secondary_gauss_jet(frame: NullFrame, z: complex, order: int = 1) -> tuple[C.Jet, C.Jet]:
    """Jets of ``g`` and the density ``omega`` at ``z``."""
    J = frame.jet(z, order + 1)
    Fz = J.partial(0)
    R = C.inv2(J.truncate(order)) @ Fz
    return R[0, 0] / R[1, 0], R[1, 0]


def normalized_density(frame: NullFrame, z: complex) -> tuple[complex, complex]:
    """``(w, delta)`` with ``w = g(z)`` and ``omega = delta dw / w^2`` in the coordinate ``w``."""
    g, om = secondary_gauss_jet(frame, z, 1)
    w = complex(g.value)
    dg = complex(g.d(1))
    if dg == 0:
        raise UndefinedData(f"g is critical at z={z}")
    return w, w * w * complex(om.value) / dg


def invert_holomorphic(f: Callable, w: complex, z_guess: complex, tol: float = 1e-12, max_iter: int = 50) -> complex:
    """Newton solve of ``f(z) = w`` starting from ``z_guess``."""
    z = complex(z_guess)
    for _ in range(max_iter):
        J = f(C.seed(z, 1))
        step = (complex(J.value) - w) / complex(J.d(1))
        z -= step
        if abs(step) <= tol * (1 + abs(z)):
            return z
    raise NonConvergent(f"Newton inversion failed for w={w}")


def secondary_gauss(frame: NullFrame) -> Callable:
    """``g`` as a function of a univariate seed jet in ``z``."""

    def g(zeta: C.Jet) -> C.Jet:
        return secondary_gauss_jet(frame, complex(zeta.value), zeta.order)[0]

    return g


def density_in_w(frame: NullFrame, w: complex, z_guess: complex) -> complex:
    """``omega`` density with respect to ``w = g(z)``, at the point ``w``."""
    z = invert_holomorphic(secondary_gauss(frame), w, z_guess)
    return normalized_density(frame, z)[1] / (w * w)


@dataclass(frozen=True)
class DataFunctions:
    """Weierstrass data ``(g, omega)`` as holomorphic functions of ``z``; ``omega`` is the dz-density."""

    g: Callable
    omega: Callable
    lam: complex = 1.0

    def connection(self, z):
        g, om = self.g(z), self.omega(z) * self.lam
        return C.mat([[g * om, -(g * g * om)], [om, -(g * om)]])


def associate(data, lam: complex):
    """``(g, omega) -> (g, lam omega)`` for pointwise or functional data."""
    if lam == 0:
        raise ZeroLambda("the family parameter must be nonzero")
    if isinstance(data, DataFunctions):
        return replace(data, lam=data.lam * lam)
    return replace(data, omega=data.omega * lam, hopf=data.hopf * lam, lam=data.lam * lam)


def catenoid_type_data(delta: complex) -> DataFunctions:
    """``(w, delta dw / w^2)``."""
    return DataFunctions(lambda w: w, lambda w: (w * w).reciprocal() * delta if isinstance(w, C.Jet) else delta / w ** 2)


def integrate_frame(data: DataFunctions, F0, z0: complex = 1.0, via: Sequence[complex] = (),
                    tol: float = 1e-11) -> NullFrame:
    """Solve ``F^-1 dF = [[g, -g^2], [1, -g]] omega`` with ``F(z0) = F0``.

    Values come from the ODE integrated along ``z0 -> via... -> z``; higher
    Taylor coefficients from the recursion ``f_{k+1} = sum_j f_j m_{k-j} / (k+1)``
    applied to the jet of the connection matrix.
    """
    F0 = np.asarray(F0, dtype=complex)

    def rhs(z, Y):
        return Y @ np.asarray(data.connection(z))

    def value(z: complex) -> np.ndarray:
        return C.integrate_ode_path(rhs, F0, [z0, *via, z], tol)

    def univariate(zeta: C.Jet) -> C.Jet:
        c = complex(zeta.value)
        n = zeta.order
        f = [value(c)]
        if n:
            m = data.connection(C.seed(c, n - 1))
            mc = [np.asarray(x) for x in m.coef] if isinstance(m, C.Jet) else [np.asarray(m)] + [0 * np.asarray(m)] * (n - 1)
            for k in range(n):
                f.append(sum(f[j] @ mc[k - j] for j in range(k + 1)) / (k + 1))
        lay = C._layout(1, n)
        return C.Jet(np.stack(f), lay, 2)

    def F(z):
        if isinstance(z, C.Jet):
            if z.nvars == 1 and np.ndim(z.value) == 0 and z.order >= 0 and _is_seed(z):
                return univariate(z)
            return holomorphic_jet(univariate, z)
        zs = np.asarray(z, dtype=complex)
        if zs.ndim == 0:
            return value(complex(zs))
        return np.stack([value(complex(w)) for w in zs.ravel()]).reshape(zs.shape + (2, 2))

    return NullFrame(F, "integrated")


def _is_seed(z: C.Jet) -> bool:
    c = z.coef
    return c.shape[0] == 1 or (np.all(c[1] == 1) and not np.any(c[2:]))
