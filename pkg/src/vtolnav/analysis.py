"""Closed-loop diagnostics built from plant truth and controller internals.

These quantities (attitude error, apparent-acceleration error, Lyapunov
function, excitation matrix ``W``) are never fed back to the controller; they
exist to audit a run.
"""

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from numba import njit

from .errors import IncompleteLogError
from .mathx import E3, quat_inv, quat_mul, quat_to_rot, skew, sym_eigvals3

LYAPUNOV_REL_TOL = 1e-6
LYAPUNOV_ABS_TOL = 1e-12
ETA_FLOOR = 0.1


@dataclass(frozen=True)
class LyapunovWeights:
    gamma: float = 1.0
    gamma_q: float = 1.0
    k_r: float = 1.0

    def __post_init__(self):
        for name in ("gamma", "gamma_q", "k_r"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class Diagnostics:
    e_p: np.ndarray
    v: np.ndarray
    u_t: float
    tilde_q: np.ndarray
    tilde_r2: np.ndarray
    lyapunov_v: float
    w_min_eig: float
    tilde_mu: np.ndarray


def attitude_error(q, q_d):
    """``Q (.) Q_d^-1``; its rotation matrix is ``R_d^T R``."""
    return quat_mul(np.asarray(q, dtype=float), quat_inv(np.asarray(q_d, dtype=float)))


@njit(cache=True)
def tilde_r2(v, v_hat, k_1, tilde_R, r2):
    return k_1 * (v - v_hat) - (np.eye(3) - tilde_R) @ r2


@njit(cache=True)
def _lyapunov(e_p, v, tr2, tilde_eta, k_p, gamma, gamma_q, k_r):
    return (
        gamma * k_p * (np.sqrt(1.0 + np.dot(e_p, e_p)) - 1.0)
        + 0.5 * gamma * np.dot(v, v)
        + 0.5 * gamma * k_r * np.dot(tr2, tr2)
        + gamma_q * (1.0 - tilde_eta * tilde_eta)
    )


def lyapunov(e_p, v, tilde_r2, tilde_eta, k_p, w):
    if abs(tilde_eta) > 1.0 + 1e-12:
        raise ValueError("|tilde_eta| must not exceed 1")
    return float(
        _lyapunov(
            np.asarray(e_p, dtype=float), np.asarray(v, dtype=float),
            np.asarray(tilde_r2, dtype=float), float(tilde_eta), float(k_p),
            w.gamma, w.gamma_q, w.k_r,
        )
    )


@njit(cache=True)
def w_matrix(r1, r2, gamma_1, gamma_2):
    s1 = skew(r1)
    s2 = skew(r2)
    return -gamma_1 * (s1 @ s1) - gamma_2 * (s2 @ s2)


@njit(cache=True)
def w_min_eig(r1, r2, gamma_1, gamma_2):
    """Smallest eigenvalue of ``W = -gamma_1 S(r1)^2 - gamma_2 S(r2)^2``."""
    return sym_eigvals3(w_matrix(r1, r2, gamma_1, gamma_2))[0]


def factorization_check(u_t, tilde_q, r_body_e3, x):
    """Return ``(f1, f2)`` with ``mu_tilde = f1 q~`` and ``(I - R~) x = f2 q~``.

    ``r_body_e3`` is the thrust axis ``R^T e3`` expressed in the inertial frame.
    """
    tilde_q = np.asarray(tilde_q, dtype=float)
    eta, q = tilde_q[0], tilde_q[1:]
    f1 = 2.0 * u_t * (eta * np.eye(3) - skew(q)) @ skew(np.asarray(r_body_e3, dtype=float))
    f2 = 2.0 * (skew(q) - eta * np.eye(3)) @ skew(np.asarray(x, dtype=float))
    return f1, f2


@njit(cache=True)
def diagnostics_kernel(p, v, quat, r2, u_t, q_d, mu_d, v_hat, p_r, r1,
                       k_p, k_1, gamma_1, gamma_2, g, gamma, gamma_q, k_r):
    n = p.shape[0]
    lyap = np.empty(n)
    eta = np.empty(n)
    tr2 = np.empty((n, 3))
    lam = np.empty(n)
    tmu = np.empty((n, 3))
    for i in range(n):
        qt = quat_mul(quat[i], quat_inv(q_d[i]))
        rt = quat_to_rot(qt)
        tr2[i] = tilde_r2(v[i], v_hat[i], k_1, rt, r2[i])
        eta[i] = qt[0]
        lyap[i] = _lyapunov(p[i] - p_r, v[i], tr2[i], qt[0], k_p, gamma, gamma_q, k_r)
        lam[i] = w_min_eig(r1, r2[i], gamma_1, gamma_2)
        tmu[i] = g * E3 - u_t[i] * (quat_to_rot(quat[i]).T @ E3) - mu_d[i]
    return lyap, eta, tr2, lam, tmu


def compute_diagnostics(log, weights=None):
    """Per-row diagnostic series for ``log`` as a dict of arrays."""
    meta = log.meta
    w = weights or LyapunovWeights(**meta["lyapunov"])
    gains = meta["gains"]
    cols = [np.ascontiguousarray(log[c]) for c in (
        "true_p", "true_v", "true_q", "true_r2", "cmd_u_t", "ctl_q_d", "ctl_mu_d", "ctl_v_hat",
    )]
    lyap, eta, tr2, lam, tmu = diagnostics_kernel(
        *cols,
        np.asarray(meta["p_r"], dtype=float), np.asarray(gains["r1"], dtype=float),
        gains["k_p"], gains["k_1"], gains["gamma_1"], gains["gamma_2"], gains["g"],
        w.gamma, w.gamma_q, w.k_r,
    )
    return {
        "lyapunov": lyap, "eta_tilde": eta, "r2_tilde": tr2,
        "lambda_min_w": lam, "mu_tilde": tmu,
    }


def diagnostics_at(log, i, weights=None):
    """:class:`Diagnostics` snapshot for row ``i``."""
    d = compute_diagnostics(log, weights)
    q_t = quat_mul(log["true_q"][i], quat_inv(log["ctl_q_d"][i]))
    return Diagnostics(
        e_p=log["true_p"][i] - np.asarray(log.meta["p_r"]),
        v=log["true_v"][i].copy(),
        u_t=float(log["cmd_u_t"][i]),
        tilde_q=q_t,
        tilde_r2=d["r2_tilde"][i],
        lyapunov_v=float(d["lyapunov"][i]),
        w_min_eig=float(d["lambda_min_w"][i]),
        tilde_mu=d["mu_tilde"][i],
    )


@dataclass
class Report:
    n_rows: int
    thrust_bounds: tuple
    thrust_observed: tuple
    thrust_violations: int
    lyapunov_checked: bool
    lyapunov_increases: int
    max_lyapunov_increase: float
    lyapunov_initial: float
    eta_initial: float
    min_abs_eta: float
    eta_floor: float
    eta_floor_ok: bool
    min_lambda_w: float
    lambda_w_positive: bool
    terminal: dict = field(default_factory=dict)

    @property
    def passed(self):
        if self.thrust_violations:
            return False
        if self.lyapunov_checked:
            return (
                self.lyapunov_increases == 0 and self.eta_floor_ok and self.lambda_w_positive
            )
        return True

    def to_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self):
        lo, hi = self.thrust_bounds
        tlo, thi = self.thrust_observed
        lines = [
            f"rows                 {self.n_rows}",
            f"thrust window        [{lo:.4f}, {hi:.4f}] m/s^2",
            f"thrust observed      [{tlo:.4f}, {thi:.4f}] m/s^2",
            f"thrust violations    {self.thrust_violations}",
        ]
        if self.lyapunov_checked:
            lines += [
                f"lyapunov increases   {self.lyapunov_increases} "
                f"(max step {self.max_lyapunov_increase:.3e})",
                f"min |eta~|           {self.min_abs_eta:.6f} (floor {self.eta_floor:.6f})",
            ]
        else:
            lines.append("lyapunov             not asserted (wind or sensor noise present)")
        lines.append(f"min lambda(W)        {self.min_lambda_w:.6g}")
        for k, val in self.terminal.items():
            lines.append(f"terminal {k:<12}{val:.6g}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def validate_log(log):
    """Raise :class:`IncompleteLogError` unless ``log`` covers its full horizon."""
    t = log.t
    expected = log.meta.get("n_rows")
    if expected is None or len(t) != expected:
        raise IncompleteLogError(f"log has {len(t)} rows, expected {expected}")
    if not log.meta.get("complete", False):
        raise IncompleteLogError("log is marked incomplete")
    if len(t) > 1:
        dt = np.diff(t)
        step = log.meta["timing"]["control_dt"]
        if np.any(dt <= 0.0) or not np.allclose(dt, step, rtol=1e-9, atol=1e-9):
            raise IncompleteLogError("timestamps are not on the control grid")
    if not np.all(np.isfinite(log.data)):
        raise IncompleteLogError("log contains non-finite values")


def check_log(log, gains=None, w=None, assert_lyapunov=None):
    """Audit a completed run.

    ``gains`` defaults to the gains recorded in the log. Lyapunov monotonicity
    and the attitude-error floor are only asserted for runs without wind and
    without sensor corruption, unless ``assert_lyapunov`` says otherwise.
    """
    validate_log(log)
    meta = log.meta
    if gains is None:
        k_p, k_v, g = (meta["gains"][k] for k in ("k_p", "k_v", "g"))
    else:
        k_p, k_v, g = gains.k_p, gains.k_v, gains.g
    w = w or LyapunovWeights(**meta["lyapunov"])
    if assert_lyapunov is None:
        assert_lyapunov = bool(meta.get("wind_free") and meta.get("noise_free"))

    lo, hi = g - k_p - k_v, g + k_p + k_v
    u_t = log["cmd_u_t"]
    violations = int(np.count_nonzero((u_t < lo) | (u_t > hi)))

    d = compute_diagnostics(log, w)
    lyap = d["lyapunov"]
    tol = LYAPUNOV_REL_TOL * lyap[0] + LYAPUNOV_ABS_TOL
    inc = np.diff(lyap)
    eta = np.abs(d["eta_tilde"])
    floor = min(eta[0] / 2.0, ETA_FLOOR)
    lam = d["lambda_min_w"]
    e_p = log["true_p"][-1] - np.asarray(meta["p_r"])
    return Report(
        n_rows=len(u_t),
        thrust_bounds=(lo, hi),
        thrust_observed=(float(u_t.min()), float(u_t.max())),
        thrust_violations=violations,
        lyapunov_checked=assert_lyapunov,
        lyapunov_increases=int(np.count_nonzero(inc > tol)),
        max_lyapunov_increase=float(inc.max()) if len(inc) else 0.0,
        lyapunov_initial=float(lyap[0]),
        eta_initial=float(d["eta_tilde"][0]),
        min_abs_eta=float(eta.min()),
        eta_floor=float(floor),
        eta_floor_ok=bool(np.all(eta >= floor)),
        min_lambda_w=float(lam.min()),
        lambda_w_positive=bool(np.all(lam > 0.0)),
        terminal={
            "e_p": float(np.linalg.norm(e_p)),
            "v": float(np.linalg.norm(log["true_v"][-1])),
            "r2_tilde": float(np.linalg.norm(d["r2_tilde"][-1])),
            "1-eta^2": float(1.0 - d["eta_tilde"][-1] ** 2),
        },
    )
