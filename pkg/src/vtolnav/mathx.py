"""Quaternion, rotation and skew-symmetric helpers.

Conventions
-----------
* Quaternions are length-4 float arrays ``[eta, q1, q2, q3]`` (scalar first).
* ``quat_to_rot(Q)`` returns the body-from-inertial rotation, so a vector known
  in the inertial frame is seen in the body frame as ``R @ r``.
* Angular velocities are body-referenced, ``Qdot = 0.5 * [-q^T; eta I + S(q)] w``.

Everything here is compiled with numba so the simulator hot loop can call it.
"""

import numpy as np
from numba import njit

E3 = np.array([0.0, 0.0, 1.0])
IDENTITY_QUAT = np.array([1.0, 0.0, 0.0, 0.0])


@njit(cache=True)
def skew(x):
    """Return ``S(x)`` with ``S(x) @ y == cross(x, y)``."""
    return np.array(
        [
            [0.0, -x[2], x[1]],
            [x[2], 0.0, -x[0]],
            [-x[1], x[0], 0.0],
        ]
    )


@njit(cache=True)
def cross(x, y):
    return np.array(
        [
            x[1] * y[2] - x[2] * y[1],
            x[2] * y[0] - x[0] * y[2],
            x[0] * y[1] - x[1] * y[0],
        ]
    )


@njit(cache=True)
def quat_normalize(a):
    return a / np.sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2] + a[3] * a[3])


@njit(cache=True)
def quat_mul(a, b):
    """Quaternion product ``a (.) b``, renormalized."""
    eta1 = a[0]
    eta2 = b[0]
    q1 = a[1:]
    q2 = b[1:]
    out = np.empty(4)
    out[0] = eta1 * eta2 - np.dot(q1, q2)
    out[1:] = eta1 * q2 + eta2 * q1 + cross(q1, q2)
    return quat_normalize(out)


@njit(cache=True)
def quat_inv(a):
    out = np.empty(4)
    out[0] = a[0]
    out[1:] = -a[1:]
    return out


@njit(cache=True)
def quat_to_rot(a):
    """Rodrigues map ``R(Q) = I + 2 S(q)^2 - 2 eta S(q)``."""
    sq = skew(a[1:])
    return np.eye(3) + 2.0 * (sq @ sq) - 2.0 * a[0] * sq


@njit(cache=True)
def quat_rate(a, omega):
    """Quaternion derivative driven by the body angular velocity ``omega``."""
    q = a[1:]
    out = np.empty(4)
    out[0] = -0.5 * np.dot(q, omega)
    out[1:] = 0.5 * (a[0] * omega + cross(q, omega))
    return out


@njit(cache=True)
def sat_h(u):
    """Bounded map ``h(u) = u / sqrt(1 + u^T u)``; ``||h(u)|| < 1``."""
    return u / np.sqrt(1.0 + np.dot(u, u))


@njit(cache=True)
def sat_phi(u):
    """Jacobian of :func:`sat_h`, ``(1 + u^T u)^(-3/2) (I - S(u)^2)``."""
    su = skew(u)
    return (1.0 + np.dot(u, u)) ** -1.5 * (np.eye(3) - su @ su)


@njit(cache=True)
def _jacobi_eigvals3(a):
    a = a.copy()
    for _ in range(50):
        off = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
        if off == 0.0:
            break
        for p, q in ((0, 1), (0, 2), (1, 2)):
            apq = a[p, q]
            if apq == 0.0:
                continue
            theta = (a[q, q] - a[p, p]) / (2.0 * apq)
            t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
            if theta == 0.0:
                t = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rot = np.eye(3)
            rot[p, p] = c
            rot[q, q] = c
            rot[p, q] = s
            rot[q, p] = -s
            a = rot.T @ a @ rot
            a[p, q] = 0.0
            a[q, p] = 0.0
    return np.sort(np.array([a[0, 0], a[1, 1], a[2, 2]]))


@njit(cache=True)
def sym_eigvals3(a):
    """Eigenvalues of a symmetric 3x3 matrix in ascending order.

    Closed-form trigonometric solution of the characteristic cubic. Near a
    repeated root that formula only keeps about half the digits, so those
    cases are finished with Jacobi rotations.
    """
    p1 = a[0, 1] ** 2 + a[0, 2] ** 2 + a[1, 2] ** 2
    out = np.empty(3)
    if p1 == 0.0:
        out[0] = a[0, 0]
        out[1] = a[1, 1]
        out[2] = a[2, 2]
        return np.sort(out)
    q = (a[0, 0] + a[1, 1] + a[2, 2]) / 3.0
    p2 = (a[0, 0] - q) ** 2 + (a[1, 1] - q) ** 2 + (a[2, 2] - q) ** 2 + 2.0 * p1
    p = np.sqrt(p2 / 6.0)
    b = (a - q * np.eye(3)) / p
    r = np.linalg.det(b) / 2.0
    if r <= -1.0:
        phi = np.pi / 3.0
    elif r >= 1.0:
        phi = 0.0
    else:
        phi = np.arccos(r) / 3.0
    hi = q + 2.0 * p * np.cos(phi)
    lo = q + 2.0 * p * np.cos(phi + 2.0 * np.pi / 3.0)
    out[0] = lo
    out[1] = 3.0 * q - hi - lo
    out[2] = hi
    if min(out[1] - out[0], out[2] - out[1]) < 1e-3 * p:
        return _jacobi_eigvals3(a)
    return out


@njit(cache=True)
def spectral_norm(m):
    """Induced 2-norm of a 3x3 matrix via the eigenvalues of ``M^T M``."""
    lam = sym_eigvals3(m.T @ m)
    return np.sqrt(max(lam[2], 0.0))


def quat_distance(a, b):
    """Distance between attitudes, insensitive to the ``Q ~ -Q`` ambiguity."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))


def random_quaternion(rng):
    """Uniformly distributed unit quaternion drawn from ``rng``."""
    return quat_normalize(rng.standard_normal(4))
