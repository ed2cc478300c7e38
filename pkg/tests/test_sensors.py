import numpy as np
import pytest

from vtolnav.mathx import E3, IDENTITY_QUAT, quat_to_rot, random_quaternion
from vtolnav.plant import PlantParams, PlantState, deriv
from vtolnav.sensors import RandomStream, SensorParams, corrupt_gyro, measure

DEG = np.pi / 180


def test_noise_free_hover_readings():
    params = PlantParams()
    s = PlantState(p=np.zeros(3), v=np.zeros(3))
    u_t = params.g
    v_dot = deriv(s, u_t, np.zeros(3), params).v_dot
    m = measure(s, v_dot, SensorParams(), RandomStream(1))
    np.testing.assert_allclose(m.b2, -u_t * E3, atol=1e-15)
    np.testing.assert_array_equal(m.b1, [0.18, 0.0, 0.54])
    np.testing.assert_array_equal(m.p_meas, s.p)
    np.testing.assert_array_equal(m.v_meas, s.v)


def test_noise_free_reproduces_truth(rng):
    params = PlantParams(v_w=np.array([10.0, 5.0, 0.0]))
    for _ in range(50):
        s = PlantState(p=rng.normal(size=3), v=rng.normal(size=3), q=random_quaternion(rng))
        v_dot = deriv(s, 8.0, np.zeros(3), params).v_dot
        m = measure(s, v_dot, SensorParams(), RandomStream(2))
        r = quat_to_rot(s.q)
        np.testing.assert_array_equal(m.b1, r @ SensorParams().r1)
        np.testing.assert_allclose(m.b2, r @ (v_dot - params.g * E3), atol=1e-14)


def test_position_noise_statistics():
    draws = RandomStream(7).normal("pos", 0.5, (100_000, 3))
    std = draws.std(axis=0)
    assert np.all((std >= 0.49) & (std <= 0.51))
    assert np.all(np.abs(draws.mean(axis=0)) < 0.01)


def test_gyro_identity_and_bias():
    rng = RandomStream(3)
    w = np.array([0.3, -0.2, 0.1])
    np.testing.assert_array_equal(corrupt_gyro(w, SensorParams(), rng), w)
    bias = np.array([0.1, 0.05, -0.2]) * DEG
    out = corrupt_gyro(w, SensorParams(gyro_bias=bias), rng)
    np.testing.assert_array_equal(out, w + bias)


def test_gyro_noise_statistics():
    std = 0.1 * DEG
    params = SensorParams(std_gyro=std)
    rng = RandomStream(11)
    samples = np.array([corrupt_gyro(np.zeros(3), params, rng) for _ in range(100_000)])
    assert np.all(np.abs(samples.std(axis=0) / std - 1.0) < 0.02)


def test_same_seed_same_stream():
    a, b = RandomStream(5), RandomStream(5)
    params = SensorParams(std_mag=0.01, std_acc=0.1, std_gyro=0.01, std_vel=0.5, std_pos=0.5)
    ba, bb = a.block(params, 100), b.block(params, 100)
    for c in ba:
        np.testing.assert_array_equal(ba[c], bb[c])


def test_channels_are_independent_streams():
    a, b = RandomStream(5), RandomStream(5)
    for _ in range(10):
        a.normal("acc", 1.0)  # extra draws on one sensor only
    np.testing.assert_array_equal(a.normal("pos", 1.0), b.normal("pos", 1.0))


def test_block_matches_per_tick_draws():
    a, b = RandomStream(9), RandomStream(9)
    blk = a.block(SensorParams(std_pos=0.5), 20)["pos"]
    seq = np.array([b.normal("pos", 0.5) for _ in range(20)])
    np.testing.assert_array_equal(blk, seq)


def test_negative_std_rejected():
    with pytest.raises(ValueError):
        SensorParams(std_pos=-1.0)


def test_noise_free_flag():
    assert SensorParams().noise_free
    assert not SensorParams(gyro_bias=np.array([0.0, 0.0, 1e-6])).noise_free
    assert not SensorParams(std_acc=0.1).noise_free
