"""Output-feedback position controller driven by GPS and IMU signals.

The controller consumes only ``p, v`` (GPS), ``b1`` (magnetometer) and ``b2``
(accelerometer) plus its own filter state ``v_hat``. It never sees the
vehicle attitude.
"""

from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import NonFiniteError, SingularityError
from .extraction import DesiredFrame, extract_kernel, is_singular, m_matrix_kernel
from .mathx import E3, cross, quat_to_rot, sat_h, sat_phi
from .sensors import R1_SOUTHERN_ONTARIO


@dataclass(frozen=True)
class ControlGains:
    k_p: float = 5.0
    k_v: float = 0.1
    k_1: float = 5.0
    gamma_1: float = 0.1
    gamma_2: float = 0.05
    g: float = 9.81
    # Inertial magnetic field the magnetometer is compared against (gauss).
    r1: np.ndarray = field(default_factory=lambda: np.array(R1_SOUTHERN_ONTARIO))

    def __post_init__(self):
        object.__setattr__(self, "r1", np.asarray(self.r1, dtype=float))
        for name in ("k_p", "k_v", "k_1", "gamma_1", "gamma_2", "g"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if not self.k_p + self.k_v < self.g:
            raise ValueError(
                f"k_p + k_v = {self.k_p + self.k_v} must be below g = {self.g}"
            )

    @property
    def thrust_min(self):
        return self.g - self.k_p - self.k_v

    @property
    def thrust_max(self):
        return self.g + self.k_p + self.k_v


@dataclass(frozen=True)
class ControllerState:
    v_hat: np.ndarray = field(default_factory=lambda: np.zeros(3))
    last_frame: DesiredFrame = None
    last_omega_cmd: np.ndarray = field(default_factory=lambda: np.zeros(3))


@dataclass(frozen=True)
class ControlOutput:
    u_t: float
    omega: np.ndarray
    frame: DesiredFrame
    psi: np.ndarray
    mu_d: np.ndarray


@njit(cache=True)
def mu_d_kernel(e_p, v, k_p, k_v):
    return -k_p * sat_h(e_p) - k_v * sat_h(v)


@njit(cache=True)
def psi_kernel(r_d, b1, b2, v, v_hat, r1, k_1, gamma_1, gamma_2):
    return gamma_1 * cross(r_d @ r1, b1) + gamma_2 * k_1 * cross(r_d @ (v - v_hat), b2)


@njit(cache=True)
def law_kernel(p, v, b1, b2, v_hat, p_r, r1, k_p, k_v, k_1, gamma_1, gamma_2, g):
    """One evaluation of the control law.

    Returns ``(u_t, omega, q_d, mu_d, psi, v_hat_dot)``. ``u_t`` is NaN when
    ``mu_d`` falls on the singular ray.
    """
    e_p = p - p_r
    mu_d = mu_d_kernel(e_p, v, k_p, k_v)
    if is_singular(mu_d, g):
        nan3 = np.full(3, np.nan)
        return np.nan, nan3, np.full(4, np.nan), mu_d, nan3, nan3
    u_t, q_d = extract_kernel(mu_d, g)
    r_d = quat_to_rot(q_d)
    m = m_matrix_kernel(mu_d, u_t, q_d[0], g)
    phi_v = sat_phi(v)
    f_mu = -k_p * (sat_phi(e_p) @ v) + k_v * (phi_v @ (k_p * sat_h(e_p) + k_v * sat_h(v)))
    psi = psi_kernel(r_d, b1, b2, v, v_hat, r1, k_1, gamma_1, gamma_2)
    omega = m @ (f_mu - k_v * (phi_v @ (r_d.T @ (b2 + u_t * E3)))) + psi
    v_hat_dot = (
        g * E3 + r_d.T @ b2 + k_1 * (v - v_hat) + (r_d.T @ cross(b2, psi)) / k_1
    )
    return u_t, omega, q_d, mu_d, psi, v_hat_dot


def compute_mu_d(e_p, v, gains):
    """Desired acceleration ``-k_p h(e_p) - k_v h(v)``; norm below ``k_p + k_v``."""
    return mu_d_kernel(
        np.asarray(e_p, dtype=float), np.asarray(v, dtype=float), gains.k_p, gains.k_v
    )


def compute_psi(frame, b1, b2, v, v_hat, r1, gains):
    return psi_kernel(
        frame.r_d,
        np.asarray(b1, dtype=float),
        np.asarray(b2, dtype=float),
        np.asarray(v, dtype=float),
        np.asarray(v_hat, dtype=float),
        np.asarray(r1, dtype=float),
        gains.k_1,
        gains.gamma_1,
        gains.gamma_2,
    )


def _evaluate(meas, p_r, v_hat, gains):
    arrays = [meas.p_meas, meas.v_meas, meas.b1, meas.b2]
    if not all(np.all(np.isfinite(a)) for a in arrays):
        raise NonFiniteError(f"non-finite measurement at t={meas.t}")
    result = law_kernel(
        *(np.asarray(a, dtype=float) for a in arrays),
        np.asarray(v_hat, dtype=float),
        np.asarray(p_r, dtype=float),
        gains.r1, gains.k_p, gains.k_v, gains.k_1, gains.gamma_1, gains.gamma_2, gains.g,
    )
    u_t, omega, q_d, mu_d, psi, v_hat_dot = result
    if np.isnan(u_t):
        raise SingularityError(f"mu_d={mu_d} is on the singular ray (k_p + k_v >= g?)")
    frame = DesiredFrame(u_t=float(u_t), q_d=q_d, r_d=quat_to_rot(q_d), mu_d=mu_d)
    out = ControlOutput(u_t=float(u_t), omega=omega, frame=frame, psi=psi, mu_d=mu_d)
    return out, v_hat_dot


def command(meas, p_r, state, gains):
    """Control output for ``meas`` without advancing the filter."""
    out, _ = _evaluate(meas, p_r, state.v_hat, gains)
    return out


def step(meas, p_r, state, gains, dt):
    """Evaluate the control law and advance ``v_hat`` by one Euler step of ``dt``."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    out, v_hat_dot = _evaluate(meas, p_r, state.v_hat, gains)
    new_state = ControllerState(
        v_hat=state.v_hat + dt * v_hat_dot, last_frame=out.frame, last_omega_cmd=out.omega
    )
    return out, new_state
