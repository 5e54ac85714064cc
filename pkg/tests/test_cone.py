import numpy as np
import pytest
from hypothesis import given, strategies as st

from lightcone import cone
from lightcone.cone import (HermMatrix, Region, act, classify_point, herm, inner, minkowski_inner,
                            rotation_D1, rotation_D2, rotation_P, screw_normal_form)
from lightcone.errors import NonUnimodular, ZeroGenerator, ZeroParameter

seeds = st.integers(0, 2 ** 31)


def random_sl2(rng):
    M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return M / np.sqrt(np.linalg.det(M))


def random_point(rng):
    return herm(*rng.normal(size=4))


def test_inner_examples():
    assert minkowski_inner(np.diag([1, 0]), np.diag([1, 0])) == 0
    assert minkowski_inner([[0, 1], [1, 0]], [[0, 1], [1, 0]]) == 1
    assert minkowski_inner(np.eye(2), np.eye(2)) == -1


@given(seeds)
def test_inner_matches_coordinate_formula(seed):
    rng = np.random.default_rng(seed)
    x, y = rng.normal(size=4), rng.normal(size=4)
    expected = -x[0] * y[0] + x[1] * y[1] + x[2] * y[2] + x[3] * y[3]
    assert minkowski_inner(herm(*x), herm(*y)) == pytest.approx(expected, abs=1e-12)
    X = herm(*x)
    assert minkowski_inner(X, X) == pytest.approx(-np.linalg.det(X).real, abs=1e-12)


@given(seeds)
def test_act_preserves_pairing(seed):
    rng = np.random.default_rng(seed)
    F, X, Y = random_sl2(rng), random_point(rng), random_point(rng)
    before = inner(X, Y)
    after = inner(act(F, X), act(F, Y))
    assert abs(after - before) <= 1e-9 * (1 + abs(before)) * max(1, np.linalg.norm(F) ** 4)
    Z = act(F, X)
    assert np.allclose(Z, Z.conj().T)


@given(seeds)
def test_act_preserves_future_cone(seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=2) + 1j * rng.normal(size=2)
    X = np.outer(psi, psi.conj())
    assert classify_point(X) is Region.LightConePlus
    assert classify_point(act(random_sl2(rng), X)) is Region.LightConePlus


def test_act_examples():
    X = np.array([[1.5, 2 - 1j], [2 + 1j, 0.3]])
    assert np.array_equal(act(np.eye(2), X), X)
    assert np.allclose(act(rotation_D1(np.exp(0.7j)), np.diag([1, 0])), np.diag([1, 0]))
    mu = 0.4 - 1.2j
    assert np.allclose(act(rotation_P(mu), np.diag([0, 1])), [[abs(mu) ** 2, mu], [np.conj(mu), 1]])


def test_rotations():
    assert np.array_equal(rotation_D1(1), np.eye(2))
    assert np.array_equal(rotation_D2(1), [[0, 1], [-1, 0]])
    assert np.array_equal(rotation_P(1j), [[1, 1j], [0, 1]])
    for R in (rotation_D1(2 + 1j), rotation_D2(0.3j), rotation_P(5)):
        assert np.linalg.det(R) == pytest.approx(1)
    with pytest.raises(ZeroParameter):
        rotation_D1(0)
    with pytest.raises(ZeroParameter):
        rotation_D2(0)


def test_classify_point_examples():
    assert classify_point(np.diag([1, 0])) is Region.LightConePlus
    assert classify_point(np.diag([-2, 0])) is Region.LightConeMinus
    assert classify_point(np.diag([2, 0])) is Region.LightConePlus
    assert classify_point(herm(1, 0.5, 0, 1)) is Region.Isotropic3
    assert classify_point(np.eye(2)) is Region.Other


def test_herm_matrix_roundtrip():
    p = HermMatrix(1.25, -0.5, 3.0, 0.125)
    assert HermMatrix.from_json(p.to_json()) == p
    assert HermMatrix.from_matrix(p.matrix) == p
    m = p.matrix
    assert m[1, 0] == np.conj(m[0, 1]) and m[0, 0].imag == 0


def test_check_unimodular():
    with pytest.raises(NonUnimodular):
        cone.check_unimodular(2 * np.eye(2))


def test_screw_examples():
    N, M = screw_normal_form(np.diag([1, -1]))
    assert N.kind == "diagonal" and N.param == pytest.approx(1)
    N, M = screw_normal_form(np.array([[0, 1], [0, 0]]))
    assert N.kind == "parabolic" and N.motion == "parabolic"
    N, M = screw_normal_form(np.diag([1j, -1j]))
    assert N.kind == "diagonal" and N.param == pytest.approx(1j) and N.motion == "elliptic"
    assert screw_normal_form(np.diag([1 + 1j, -1 - 1j]))[0].motion == "screw"
    with pytest.raises(ZeroGenerator):
        screw_normal_form(np.zeros((2, 2)))


def expm(A, s):
    w, V = np.linalg.eig(A)
    if abs(w[0] - w[1]) > 1e-6:
        return V @ np.diag(np.exp(s * w)) @ np.linalg.inv(V)
    return np.eye(2) + s * A  # nilpotent trace-free


generators = st.sampled_from(["generic", "nilpotent", "upper", "lower"])


@given(seeds, generators)
def test_screw_normal_form_reconstructs(seed, kind):
    rng = np.random.default_rng(seed)
    if kind == "generic":
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        A -= np.trace(A) / 2 * np.eye(2)
    else:
        a, b = rng.normal(size=2) + 1j * rng.normal(size=2)
        A = {"nilpotent": np.array([[a * b, -a * a], [b * b, -a * b]]),
             "upper": np.array([[0, a], [0, 0]]),
             "lower": np.array([[0, 0], [b, 0]])}[kind]
    N, M = screw_normal_form(A)
    assert np.linalg.det(M) == pytest.approx(1, abs=1e-10)
    Minv = np.linalg.inv(M)
    for s in np.linspace(-2, 2, 9):
        err = np.max(np.abs(expm(A, s) - M @ N(s) @ Minv))
        assert err <= 1e-8 * max(1, np.max(np.abs(expm(A, s))))


@given(st.floats(-3, 3), st.floats(-3, 3), st.complex_numbers(max_magnitude=1.5), st.booleans())
def test_subgroup_homomorphism(s, t, lam, parabolic):
    g = cone.OneParamSubgroup("parabolic", abs(lam)) if parabolic else cone.OneParamSubgroup("diagonal", lam)
    lhs, rhs = g(s + t), g(s) @ g(t)
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1, np.max(np.abs(lhs)))
