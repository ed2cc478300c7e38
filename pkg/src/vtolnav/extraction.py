"""Thrust and attitude extraction from a desired acceleration.

Given ``mu_d`` the extraction returns a thrust acceleration ``u_t`` and an
attitude ``Q_d`` such that ``g e3 - u_t R(Q_d)^T e3 == mu_d``.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import DegenerateFrameError, SingularityError
from .mathx import E3, quat_to_rot, skew

SINGULAR_TOL = 1e-12
DEGENERATE_ETA = 1e-9


@dataclass(frozen=True)
class DesiredFrame:
    u_t: float
    q_d: np.ndarray
    r_d: np.ndarray
    mu_d: np.ndarray

    @property
    def eta_d(self):
        return float(self.q_d[0])


@njit(cache=True)
def is_singular(mu_d, g):
    return (
        abs(mu_d[0]) < SINGULAR_TOL
        and abs(mu_d[1]) < SINGULAR_TOL
        and mu_d[2] >= g - SINGULAR_TOL
    )


def check_singularity(mu_d, g):
    """True iff ``mu_d`` is (numerically) on ``{[0, 0, z] : z >= g}``."""
    return bool(is_singular(np.asarray(mu_d, dtype=float), float(g)))


@njit(cache=True)
def extract_kernel(mu_d, g):
    """Return ``(u_t, Q_d)``; caller guarantees ``mu_d`` is not singular."""
    diff = mu_d - g * E3
    u_t = np.sqrt(np.dot(diff, diff))
    eta_d = np.sqrt(0.5 * (1.0 + (g - mu_d[2]) / u_t))
    q_d = np.empty(4)
    q_d[0] = eta_d
    q_d[1:] = (skew(mu_d) @ E3) / (2.0 * u_t * eta_d)
    return u_t, q_d


@njit(cache=True)
def m_matrix_kernel(mu_d, u_t, eta_d, g):
    """Closed-form ``M(mu_d)`` with ``omega_d = M(mu_d) @ mu_d_dot``."""
    s_mu = skew(mu_d)
    s_e3 = skew(E3)
    s_err = skew(mu_d - g * E3)
    inner = (
        -4.0 * np.outer(s_mu @ E3, E3)
        + 4.0 * eta_d**2 * u_t * s_e3
        + 2.0 * s_mu
        - 2.0 * mu_d[2] * s_e3
    )
    return inner @ (s_err @ s_err) / (4.0 * eta_d**2 * u_t**4)


def extract(mu_d, g):
    """Extract thrust and desired attitude for ``mu_d``.

    Raises :class:`SingularityError` when ``mu_d`` is on the singular ray.
    """
    mu_d = np.asarray(mu_d, dtype=float)
    if is_singular(mu_d, float(g)):
        raise SingularityError(f"desired acceleration {mu_d} is not extractable")
    u_t, q_d = extract_kernel(mu_d, float(g))
    return DesiredFrame(u_t=float(u_t), q_d=q_d, r_d=quat_to_rot(q_d), mu_d=mu_d.copy())


def m_matrix(frame, g):
    if frame.eta_d <= DEGENERATE_ETA or frame.u_t <= 0.0:
        raise DegenerateFrameError(
            f"eta_d={frame.eta_d:.3g}, u_t={frame.u_t:.3g}: M(mu_d) is undefined"
        )
    return m_matrix_kernel(frame.mu_d, frame.u_t, frame.eta_d, float(g))


def desired_angular_velocity(frame, mu_d_dot, g):
    return m_matrix(frame, g) @ np.asarray(mu_d_dot, dtype=float)
