import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from vtolnav.mathx import (
    E3,
    IDENTITY_QUAT,
    quat_inv,
    quat_mul,
    quat_rate,
    quat_to_rot,
    random_quaternion,
    sat_h,
    sat_phi,
    skew,
    spectral_norm,
    sym_eigvals3,
)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)
vec3 = arrays(np.float64, 3, elements=finite)
quat4 = arrays(np.float64, 4, elements=st.floats(-1, 1)).filter(
    lambda a: np.linalg.norm(a) > 1e-3
).map(lambda a: a / np.linalg.norm(a))


def test_identity_element(rng):
    q = random_quaternion(rng)
    np.testing.assert_allclose(quat_mul(IDENTITY_QUAT, q), q, atol=1e-15)
    np.testing.assert_allclose(quat_mul(q, IDENTITY_QUAT), q, atol=1e-15)


def test_group_inverse(rng):
    for _ in range(100):
        q = random_quaternion(rng)
        np.testing.assert_allclose(quat_mul(q, quat_inv(q)), IDENTITY_QUAT, atol=1e-12)
        np.testing.assert_allclose(quat_mul(quat_inv(q), q), IDENTITY_QUAT, atol=1e-12)


def test_quat_inv_examples():
    np.testing.assert_array_equal(quat_inv(IDENTITY_QUAT), IDENTITY_QUAT)
    np.testing.assert_array_equal(quat_inv(np.array([0.0, 1.0, 0.0, 0.0])), [0.0, -1.0, 0.0, 0.0])


def test_product_formula_by_hand():
    a = np.array([0.5, 0.5, 0.5, 0.5])
    b = np.array([0.0, 1.0, 0.0, 0.0])
    # (eta1 eta2 - q1.q2, eta1 q2 + eta2 q1 + q1 x q2)
    expected = np.array([-0.5, 0.5, 0.5, -0.5])
    np.testing.assert_allclose(quat_mul(a, b), expected, atol=1e-15)


def test_homomorphism_order(rng):
    for _ in range(1000):
        a, b = random_quaternion(rng), random_quaternion(rng)
        np.testing.assert_allclose(
            quat_to_rot(quat_mul(a, b)), quat_to_rot(b) @ quat_to_rot(a), atol=1e-12
        )


def test_rot_examples(rng):
    np.testing.assert_array_equal(quat_to_rot(IDENTITY_QUAT), np.eye(3))
    np.testing.assert_allclose(
        quat_to_rot(np.array([0.0, 0.0, 0.0, 1.0])), np.diag([-1.0, -1.0, 1.0]), atol=1e-15
    )
    q = random_quaternion(rng)
    np.testing.assert_allclose(quat_to_rot(q), quat_to_rot(-q), atol=1e-15)


def test_rotation_validity_and_unit_norm(rng):
    for _ in range(10_000):
        a, b = random_quaternion(rng), random_quaternion(rng)
        c = quat_mul(a, b)
        assert abs(np.linalg.norm(c) - 1.0) <= 1e-9
        r = quat_to_rot(c)
        assert np.linalg.norm(r.T @ r - np.eye(3)) <= 1e-9
        assert abs(np.linalg.det(r) - 1.0) <= 1e-9


def test_body_frame_convention():
    # 90 degrees about z: inertial x seen in the body frame as -y.
    q = np.array([np.cos(np.pi / 4), 0.0, 0.0, np.sin(np.pi / 4)])
    np.testing.assert_allclose(quat_to_rot(q) @ np.array([1.0, 0.0, 0.0]), [0, -1, 0], atol=1e-15)


def test_quat_rate_matches_rotation_kinematics(rng):
    # R(Q) is body-from-inertial, so R_dot = -S(omega) R.
    q = random_quaternion(rng)
    w = rng.standard_normal(3)
    eps = 1e-6
    r_dot = (quat_to_rot(q + eps * quat_rate(q, w)) - quat_to_rot(q - eps * quat_rate(q, w))) / (2 * eps)
    np.testing.assert_allclose(r_dot, -skew(w) @ quat_to_rot(q), atol=1e-8)


def test_skew_examples():
    np.testing.assert_array_equal(skew(np.zeros(3)), np.zeros((3, 3)))
    np.testing.assert_array_equal(skew(np.array([1.0, 0, 0])) @ np.array([0, 1.0, 0]), E3)


@given(vec3, vec3)
def test_skew_is_cross_product(x, y):
    s = skew(x)
    np.testing.assert_array_equal(s, -s.T)
    np.testing.assert_allclose(s @ y, np.cross(x, y), rtol=1e-12, atol=1e-9)


@given(vec3)
def test_skew_squared_eigenvalues(x):
    s = skew(x)
    lam = np.linalg.eigvalsh(s @ s)
    n2 = x @ x
    np.testing.assert_allclose(lam, [-n2, -n2, 0.0], atol=1e-9 * max(1.0, n2))
    np.testing.assert_allclose(s @ s, np.outer(x, x) - n2 * np.eye(3), atol=1e-9 * max(1.0, n2))


@given(quat4, vec3)
def test_skew_rotation_property(q, x):
    r = quat_to_rot(q)
    np.testing.assert_allclose(skew(r @ x), r @ skew(x) @ r.T, atol=1e-9 * max(1.0, np.abs(x).max()))


def test_sat_h_examples():
    np.testing.assert_array_equal(sat_h(np.zeros(3)), np.zeros(3))
    np.testing.assert_allclose(sat_h(np.array([3.0, 0, 0])), [3 / np.sqrt(10), 0, 0], rtol=1e-15)
    assert np.linalg.norm(sat_h(np.array([1e6, 0, 0]))) > 1 - 1e-6


@given(st.one_of(st.just(0.0), st.floats(1e-100, 1e6)), arrays(np.float64, 3, elements=st.floats(-1, 1)))
def test_sat_bounds(scale, direction):
    nd = np.linalg.norm(direction)
    u = direction / nd * scale if nd > 1e-6 else np.zeros(3)
    h = sat_h(u)
    assert 0.0 <= np.linalg.norm(h) < 1.0
    if scale > 0 and nd > 1e-6:
        assert u @ h > 0.0
    phi_norm = np.linalg.norm(sat_phi(u), 2)
    assert 0.0 < phi_norm <= 1.0 + 1e-15


def test_sat_phi_examples():
    np.testing.assert_array_equal(sat_phi(np.zeros(3)), np.eye(3))
    np.testing.assert_allclose(
        sat_phi(np.array([1.0, 0, 0])), 2.0**-1.5 * np.diag([1.0, 2.0, 2.0]), rtol=1e-15
    )


def test_sat_phi_finite_difference(rng):
    step = 1e-5
    for _ in range(200):
        u = rng.normal(scale=3.0, size=3)
        fd = np.column_stack([
            (sat_h(u + step * e) - sat_h(u - step * e)) / (2 * step) for e in np.eye(3)
        ])
        np.testing.assert_allclose(sat_phi(u), fd, atol=1e-6)
        phi = sat_phi(u)
        np.testing.assert_allclose(phi, phi.T, atol=1e-15)
        assert np.linalg.eigvalsh(phi)[0] > 0.0


@settings(max_examples=300)
@given(arrays(np.float64, (3, 3), elements=st.floats(-100, 100)))
def test_sym_eigvals_matches_lapack(a):
    s = 0.5 * (a + a.T)
    scale = max(1.0, np.abs(s).max())
    np.testing.assert_allclose(sym_eigvals3(s), np.linalg.eigvalsh(s), atol=1e-12 * scale)


@pytest.mark.parametrize("lam", [(0.0, 0.0, 5.0), (2.0, 2.0, 2.0), (-1.0, 3.0, 3.0), (1.0, 1.0 + 1e-7, 4.0)])
def test_sym_eigvals_repeated_roots(lam, rng):
    q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    s = q @ np.diag(lam) @ q.T
    s = 0.5 * (s + s.T)
    np.testing.assert_allclose(sym_eigvals3(s), np.linalg.eigvalsh(s), atol=1e-13)


@pytest.mark.parametrize("m", [np.eye(3), np.diag([3.0, -7.0, 2.0]), np.zeros((3, 3))])
def test_spectral_norm_examples(m):
    assert spectral_norm(m) == pytest.approx(np.linalg.norm(m, 2), abs=1e-12)


def test_spectral_norm_random(rng):
    for _ in range(500):
        m = rng.standard_normal((3, 3))
        assert spectral_norm(m) == pytest.approx(np.linalg.norm(m, 2), rel=1e-9)
