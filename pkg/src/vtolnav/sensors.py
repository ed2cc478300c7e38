"""GPS / IMU measurement model with seeded Gaussian noise and gyro bias."""

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .mathx import E3, quat_to_rot

R1_SOUTHERN_ONTARIO = (0.18, 0.0, 0.54)  # gauss
DEFAULT_SEED = 20120101

# Order fixes which child seed each sensor gets; append, never reorder.
CHANNELS = ("pos", "vel", "mag", "acc", "gyro")


@dataclass(frozen=True)
class SensorParams:
    """Noise model. Gyro quantities are in rad/s."""

    r1: np.ndarray = field(default_factory=lambda: np.array(R1_SOUTHERN_ONTARIO))
    std_mag: float = 0.0
    std_acc: float = 0.0
    std_gyro: float = 0.0
    std_vel: float = 0.0
    std_pos: float = 0.0
    gyro_bias: np.ndarray = field(default_factory=lambda: np.zeros(3))
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        for name in ("std_mag", "std_acc", "std_gyro", "std_vel", "std_pos"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")
        object.__setattr__(self, "r1", np.asarray(self.r1, dtype=float))
        object.__setattr__(self, "gyro_bias", np.asarray(self.gyro_bias, dtype=float))

    def std(self, channel):
        return getattr(self, "std_" + channel)

    @property
    def noise_free(self):
        return all(self.std(c) == 0.0 for c in CHANNELS) and not np.any(self.gyro_bias)


@dataclass(frozen=True)
class Measurements:
    p_meas: np.ndarray
    v_meas: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    t: float = 0.0


class RandomStream:
    """Independent standard-normal streams, one per sensor channel.

    Each channel gets its own child of ``SeedSequence(seed)`` so the values a
    sensor sees do not depend on how often the other sensors are sampled.
    """

    def __init__(self, seed=DEFAULT_SEED):
        children = np.random.SeedSequence(seed).spawn(len(CHANNELS))
        self._gens = {c: np.random.default_rng(s) for c, s in zip(CHANNELS, children)}

    def normal(self, channel, std, size=3):
        # Always draw, even for std == 0, to keep streams aligned across configs.
        return std * self._gens[channel].standard_normal(size)

    def block(self, params, n):
        """Pre-draw ``n`` epochs of scaled noise for every channel, shape (n, 3)."""
        return {c: self.normal(c, params.std(c), (n, 3)) for c in CHANNELS}


@njit(cache=True)
def measure_kernel(p, v, quat, v_dot, r1, g, n_pos, n_vel, n_mag, n_acc):
    rot = quat_to_rot(quat)
    return (
        p + n_pos,
        v + n_vel,
        rot @ r1 + n_mag,
        rot @ (v_dot - g * E3) + n_acc,
    )


def measure(state, v_dot, params, rng, g=9.81):
    """Sample ``y = [p, v, b1, b2]`` at ``state`` given the true acceleration."""
    noise = [rng.normal(c, params.std(c)) for c in ("pos", "vel", "mag", "acc")]
    p_meas, v_meas, b1, b2 = measure_kernel(
        state.p, state.v, state.q, np.asarray(v_dot, dtype=float), params.r1, float(g), *noise
    )
    return Measurements(p_meas=p_meas, v_meas=v_meas, b1=b1, b2=b2, t=state.t)


def corrupt_gyro(omega_cmd, params, rng):
    """Angular velocity actually applied: command plus gyro bias and noise."""
    return np.asarray(omega_cmd, dtype=float) + params.gyro_bias + rng.normal("gyro", params.std_gyro)
