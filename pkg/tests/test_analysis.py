import numpy as np
import pytest

from vtolnav.analysis import (
    LyapunovWeights,
    attitude_error,
    check_log,
    factorization_check,
    lyapunov,
    tilde_r2,
    w_matrix,
    w_min_eig,
)
from vtolnav.errors import IncompleteLogError
from vtolnav.mathx import E3, quat_to_rot, random_quaternion, spectral_norm

W1 = LyapunovWeights()


def test_attitude_error_examples(rng):
    q = random_quaternion(rng)
    np.testing.assert_allclose(attitude_error(q, q), [1, 0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(attitude_error(-q, q), [-1, 0, 0, 0], atol=1e-15)
    for _ in range(200):
        a, b = random_quaternion(rng), random_quaternion(rng)
        np.testing.assert_allclose(
            quat_to_rot(attitude_error(a, b)), quat_to_rot(b).T @ quat_to_rot(a), atol=1e-12
        )


def test_tilde_r2_examples(rng):
    v, r2 = rng.standard_normal(3), rng.standard_normal(3)
    np.testing.assert_array_equal(tilde_r2(v, v, 5.0, np.eye(3), r2), 0.0)
    v_hat = rng.standard_normal(3)
    rt = quat_to_rot(random_quaternion(rng))
    np.testing.assert_allclose(tilde_r2(v, v_hat, 5.0, rt, np.zeros(3)), 5.0 * (v - v_hat))
    np.testing.assert_allclose(
        tilde_r2(v, v_hat, 5.0, rt, r2), 5.0 * (v - v_hat) - r2 + rt @ r2, atol=1e-13
    )


def test_lyapunov_examples():
    z = np.zeros(3)
    assert lyapunov(z, z, z, 1.0, 5.0, W1) == 0.0
    assert lyapunov(z, z, z, -1.0, 5.0, W1) == 0.0
    assert lyapunov(np.array([3.0, 4.0, 0.0]), z, z, 1.0, 1.0, W1) == pytest.approx(np.sqrt(26) - 1)
    assert lyapunov(z, z, z, 0.0, 5.0, LyapunovWeights(gamma_q=2.5)) == 2.5
    with pytest.raises(ValueError):
        lyapunov(z, z, z, 1.5, 5.0, W1)
    with pytest.raises(ValueError):
        LyapunovWeights(gamma=0.0)


def test_lyapunov_nonnegative(rng):
    for _ in range(500):
        val = lyapunov(rng.standard_normal(3), rng.standard_normal(3), rng.standard_normal(3),
                       rng.uniform(-1, 1), 5.0, W1)
        assert val >= 0.0


def test_w_examples():
    e1, e2 = np.eye(3)[0], np.eye(3)[1]
    np.testing.assert_allclose(w_matrix(e1, e2, 1.0, 1.0), np.diag([1.0, 1.0, 2.0]))
    assert w_min_eig(e1, e2, 1.0, 1.0) == pytest.approx(1.0, abs=1e-14)
    r1 = np.array([0.18, 0.0, 0.54])
    base = w_min_eig(r1, np.array([0.3, -2.0, -9.0]), 0.1, 0.05)
    assert w_min_eig(r1, np.array([0.3, -2.0, -9.0]), 0.7, 0.35) == pytest.approx(7 * base, rel=1e-10)


@pytest.mark.parametrize("alpha", [-54.5, -1.0, 1e-3, 3.0])
def test_w_collinear_is_singular(alpha):
    r1 = np.array([0.18, 0.0, 0.54])
    w = w_matrix(r1, alpha * r1, 0.1, 0.05)
    assert abs(w_min_eig(r1, alpha * r1, 0.1, 0.05)) <= 1e-12 * np.linalg.norm(w)


def test_factorizations(rng):
    for _ in range(1000):
        q, q_d = random_quaternion(rng), random_quaternion(rng)
        qt = attitude_error(q, q_d)
        rt = quat_to_rot(qt)
        u_t = rng.uniform(4.71, 14.91)
        # mu - mu_d for the thrust direction of q versus that of q_d.
        r_body_e3 = quat_to_rot(q).T @ E3
        mu_tilde = -u_t * r_body_e3 + u_t * quat_to_rot(q_d).T @ E3
        x = rng.normal(scale=10, size=3)
        f1, f2 = factorization_check(u_t, qt, r_body_e3, x)
        np.testing.assert_allclose(f1 @ qt[1:], mu_tilde, atol=1e-10)
        np.testing.assert_allclose(f2 @ qt[1:], (np.eye(3) - rt) @ x, atol=1e-10)
        assert spectral_norm(f1) <= 2 * 14.91 + 1e-12
        assert spectral_norm(f2) <= 2 * np.linalg.norm(x) * (1 + 1e-12)


def test_check_log_is_pure(clean_log):
    a, b = check_log(clean_log), check_log(clean_log)
    assert a.to_json() == b.to_json()
    assert a.passed


def test_check_log_truncated(clean_log):
    with pytest.raises(IncompleteLogError):
        check_log(clean_log.truncated(len(clean_log) // 2))


def test_check_log_detects_thrust_violation(clean_log):
    bad = clean_log.truncated(len(clean_log))
    bad.meta = dict(clean_log.meta)
    u = bad["cmd_u_t"].copy()
    u[100] = 20.0
    bad["cmd_u_t"] = u
    report = check_log(bad)
    assert report.thrust_violations == 1
    assert not report.passed
    assert "FAIL" in report.to_text()


def test_report_json_round_trip(clean_log):
    import json

    d = json.loads(check_log(clean_log).to_json())
    assert d["passed"] is True
    assert d["thrust_violations"] == 0
    assert set(d["terminal"]) == {"e_p", "v", "r2_tilde", "1-eta^2"}
