import cmath
import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lightcone import calculus as C
from lightcone import catalog as cat
from lightcone.cone import inner
from lightcone.errors import UndefinedData, ZeroLambda
from lightcone.surfaces import first_form, mean_curvature
from lightcone.weierstrass import (DataFunctions, NullFrame, associate, catenoid_type_data, data_from_frame,
                                   density_in_w, frame_from_lift, hopf_pair, integrate_frame, normalized_density)

ZS = [0.3 + 0.2j, -0.4 + 0.1j, 0.5 - 0.3j]


def surfaces_close(F1, F2, zs, tol):
    E11 = np.diag([1, 0])
    for z in zs:
        A, B = np.asarray(F1(z)), np.asarray(F2(z))
        if np.max(np.abs(A @ E11 @ A.conj().T - B @ E11 @ B.conj().T)) > tol:
            return False
    return True


@pytest.mark.parametrize("frame,delta", [
    (cat.elliptic_frame(2), -3 / 16), (cat.elliptic_frame(3), -0.25 + 1 / 36),
    (cat.hyperbolic_frame(1), -0.5), (cat.hyperbolic_frame(2), -0.25 - 1 / 16),
    (cat.parabolic_frame(1), -0.25),
    (cat.helicoid_frame(1.0), -(7 + 1j) / 25),
])
def test_normalized_densities(frame, delta):
    for z in ZS:
        w, d = normalized_density(frame, z)
        assert abs(d - delta) <= 1e-9
        assert abs(density_in_w(frame, w, z + 0.01) - delta / w ** 2) <= 1e-9 * (1 + abs(delta / w ** 2))


@given(st.floats(-2, 2), st.floats(-0.5, 0.5))
def test_helicoid_normalized_data(a, x):
    if abs(a) < 0.05:
        return
    d = normalized_density(cat.helicoid_frame(a), complex(x, 0.1))[1]
    assert abs(d - (-a * (a - 1j) / (2 * a - 1j) ** 2)) <= 1e-9


def test_parabolic_zero_frame_has_constant_secondary_gauss_map():
    F = cat.parabolic_frame(0)
    assert np.allclose(F(0.7), [[0.7, -1], [1, 0]])
    with pytest.raises(UndefinedData):
        normalized_density(F, 0.3 + 0.1j)


@pytest.mark.parametrize("frame", [cat.elliptic_frame(2), cat.hyperbolic_frame(0.5), cat.parabolic_frame(1),
                                   cat.helicoid_frame(0.7), cat.exponential_frame(-0.5 + 1j)])
def test_frames_are_null_and_unimodular(frame):
    for z in ZS:
        assert frame.det_error(z) <= 1e-9
        assert frame.null_error(z) <= 1e-8
        q1, q2 = hopf_pair(frame, z)
        assert abs(q1 - q2) <= 1e-8 * max(1, abs(q1))
        d = data_from_frame(frame, z)
        assert abs(d.hopf - q1) <= 1e-8 * max(1, abs(q1))


@pytest.mark.parametrize("lift,frame", [
    (cat.parabolic_lift(0), cat.parabolic_frame(0)), (cat.parabolic_lift(1), cat.parabolic_frame(1)),
    (cat.elliptic_lift(2), cat.elliptic_frame(2)), (cat.hyperbolic_lift(1), cat.hyperbolic_frame(1)),
    (cat.helicoid_lift(1.0), cat.helicoid_frame(1.0)),
])
def test_frame_from_lift_reproduces_surface(lift, frame):
    F = frame_from_lift(lift)
    zs = [lift.z0 + d for d in (0.2 + 0.1j, -0.3 + 0.2j, 0.25 - 0.3j)]
    assert surfaces_close(F, frame, zs, 1e-9)
    for z in zs:
        assert F.null_error(z) <= 1e-8 and F.det_error(z) <= 1e-9
        A, Cc = lift(z)
        phi = np.array([A, Cc])
        X = np.asarray(F(z)) @ np.diag([1, 0]) @ np.asarray(F(z)).conj().T
        assert np.max(np.abs(X - np.outer(phi, phi.conj()))) <= 1e-9


def test_frame_from_lift_matches_helicoid_closed_form():
    a = 1.3
    E0 = (1 + 1j * a) ** 2 / (1 + 2j * a)
    F = frame_from_lift(cat.helicoid_lift(a), E0=E0)
    ref = cat.helicoid_frame(a)
    for z in ZS:
        assert np.max(np.abs(np.asarray(F(z)) - np.asarray(ref(z)))) <= 1e-8


def test_data_json():
    d = json.loads(data_from_frame(cat.parabolic_frame(1), 0.4 + 0.1j).to_json())
    assert set(d) == {"z", "G", "g", "Omega", "omega", "hopf"}


def test_integrate_frame_roundtrip():
    data = catenoid_type_data(-0.25)
    F = integrate_frame(data, np.eye(2), z0=1.0)
    for w in (1.2 + 0.1j, 0.8 - 0.3j, 1.5j + 0.5):
        g, om = data_from_frame(F, w).g, data_from_frame(F, w).omega
        assert abs(g - w) <= 1e-7 and abs(om + 0.25 / w ** 2) <= 1e-7


def test_integrate_frame_reproduces_parabolic_catenoid():
    ref = cat.parabolic_frame(1)
    z0 = 0.3 + 0.2j
    w0, _ = normalized_density(ref, z0)
    F = integrate_frame(catenoid_type_data(-0.25), ref(z0), z0=w0)
    # points in the w chart, matched back through g
    for dz in (0.05 + 0.02j, -0.04 + 0.03j):
        z = z0 + dz
        w, _ = normalized_density(ref, z)
        assert abs(data_from_frame(F, w).g - w) <= 1e-7
        # frames differ by the stabiliser of diag(1,0) only
        X1 = np.asarray(F(w)) @ np.diag([1, 0]) @ np.asarray(F(w)).conj().T
        X2 = np.asarray(ref(z)) @ np.diag([1, 0]) @ np.asarray(ref(z)).conj().T
        assert np.max(np.abs(X1 - X2)) <= 1e-7 * max(1, np.max(np.abs(X2)))


def test_integrate_constant_data():
    data = DataFunctions(lambda z: 2.0 + 0 * z, lambda z: 0.0 * z)
    F0 = np.array([[2, 1], [1, 1]], dtype=complex)
    F = integrate_frame(data, F0, z0=0.0)
    assert np.allclose(F(0.7 + 0.4j), F0)


def test_associate():
    d = data_from_frame(cat.elliptic_frame(2), 0.3 + 0.1j)
    assert associate(d, 1) == d
    lam = cmath.exp(0.7j)
    e = associate(d, lam)
    assert e.omega == pytest.approx(d.omega * lam) and e.hopf == pytest.approx(d.hopf * lam)
    with pytest.raises(ZeroLambda):
        associate(d, 0)
    flipped = associate(catenoid_type_data(3 / 16), -1)
    assert flipped.lam * flipped.omega(2.0) == pytest.approx(-3 / 16 / 4)
    assert cat.classify_delta(-3 / 16).kind == "Elliptic"


@pytest.mark.parametrize("theta", [0.0, 0.9, 2.5])
def test_associated_family_metric_and_zmc(theta):
    """Surfaces of (w, delta e^{i theta} dw/w^2) share the metric and stay ZMC."""
    delta = -3 / 16
    base = integrate_frame(catenoid_type_data(delta), np.eye(2), z0=1.0)
    fam = integrate_frame(associate(catenoid_type_data(delta), cmath.exp(1j * theta)), np.eye(2), z0=1.0)
    X0, X1 = base.surface((0.8, 1.2, -0.2, 0.2)), fam.surface((0.8, 1.2, -0.2, 0.2))
    u, v = np.array([0.9, 1.1]), np.array([0.1, -0.15])
    g0, g1 = first_form(X0, u, v), first_form(X1, u, v)
    assert np.max(np.abs(g0 - g1)) <= 1e-6 * np.max(np.abs(g0))
    assert np.max(np.abs(mean_curvature(X1, u, v))) <= 1e-7
