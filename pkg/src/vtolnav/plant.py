"""Translational rigid-body dynamics driven by thrust and angular velocity."""

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import NonFiniteError
from .mathx import E3, IDENTITY_QUAT, quat_normalize, quat_rate, quat_to_rot


@dataclass(frozen=True)
class PlantParams:
    mass: float = 5.0
    c_d: np.ndarray = field(default_factory=lambda: np.diag([0.1, 0.1, 0.05]))
    v_w: np.ndarray = field(default_factory=lambda: np.zeros(3))
    g: float = 9.81

    def __post_init__(self):
        c_d = np.asarray(self.c_d, dtype=float)
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if c_d.shape != (3, 3) or not np.allclose(c_d, c_d.T):
            raise ValueError("c_d must be a symmetric 3x3 matrix")
        if np.linalg.eigvalsh(c_d)[0] <= 0.0:
            raise ValueError("c_d must be positive definite")
        object.__setattr__(self, "c_d", c_d)
        object.__setattr__(self, "v_w", np.asarray(self.v_w, dtype=float))


@dataclass(frozen=True)
class PlantState:
    p: np.ndarray
    v: np.ndarray
    q: np.ndarray = field(default_factory=lambda: IDENTITY_QUAT.copy())
    t: float = 0.0

    def pack(self):
        return np.concatenate([self.p, self.v, self.q]).astype(float)

    @classmethod
    def unpack(cls, x, t=0.0):
        x = np.asarray(x, dtype=float)
        return cls(p=x[0:3].copy(), v=x[3:6].copy(), q=x[6:10].copy(), t=t)


@dataclass(frozen=True)
class PlantDeriv:
    p_dot: np.ndarray
    v_dot: np.ndarray
    q_dot: np.ndarray


@njit(cache=True)
def drag_kernel(v, rot, mass, c_d, v_w):
    air = v - v_w
    return -(np.sqrt(np.dot(air, air)) / mass) * (rot.T @ (c_d @ (rot @ air)))


@njit(cache=True)
def accel_kernel(v, quat, u_t, mass, c_d, v_w, g):
    """Return ``(v_dot, delta)`` for the packed plant model."""
    rot = quat_to_rot(quat)
    delta = drag_kernel(v, rot, mass, c_d, v_w)
    return g * E3 - u_t * (rot.T @ E3) + delta, delta


@njit(cache=True)
def deriv_kernel(x, u_t, omega, mass, c_d, v_w, g):
    out = np.empty(10)
    out[0:3] = x[3:6]
    v_dot, _ = accel_kernel(x[3:6], x[6:10], u_t, mass, c_d, v_w, g)
    out[3:6] = v_dot
    out[6:10] = quat_rate(x[6:10], omega)
    return out


@njit(cache=True)
def rk4_kernel(x, u_t, omega, mass, c_d, v_w, g, dt):
    k1 = deriv_kernel(x, u_t, omega, mass, c_d, v_w, g)
    k2 = deriv_kernel(x + 0.5 * dt * k1, u_t, omega, mass, c_d, v_w, g)
    k3 = deriv_kernel(x + 0.5 * dt * k2, u_t, omega, mass, c_d, v_w, g)
    k4 = deriv_kernel(x + dt * k3, u_t, omega, mass, c_d, v_w, g)
    out = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    out[6:10] = quat_normalize(out[6:10])
    return out


def aero_drag(v, q, params):
    """Quadratic drag ``-(1/m)|v - v_w| R^T C_d R (v - v_w)`` in the inertial frame."""
    return drag_kernel(
        np.asarray(v, dtype=float), quat_to_rot(np.asarray(q, dtype=float)),
        params.mass, params.c_d, params.v_w,
    )


def deriv(state, u_t, omega_applied, params):
    d = deriv_kernel(
        state.pack(), float(u_t), np.asarray(omega_applied, dtype=float),
        params.mass, params.c_d, params.v_w, params.g,
    )
    return PlantDeriv(p_dot=d[0:3], v_dot=d[3:6], q_dot=d[6:10])


def rk4_step(state, u_t, omega_applied, params, dt):
    """Advance one RK4 step with ``(u_t, omega_applied)`` held constant."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    x = rk4_kernel(
        state.pack(), float(u_t), np.asarray(omega_applied, dtype=float),
        params.mass, params.c_d, params.v_w, params.g, float(dt),
    )
    if not np.all(np.isfinite(x)):
        raise NonFiniteError(f"plant state became non-finite at t={state.t + dt}")
    return PlantState.unpack(x, t=state.t + dt)


def apparent_acceleration(state, u_t, params):
    """Inertial apparent acceleration ``r2 = v_dot - g e3``."""
    v_dot, _ = accel_kernel(
        state.v, state.q, float(u_t), params.mass, params.c_d, params.v_w, params.g
    )
    return v_dot - params.g * E3
