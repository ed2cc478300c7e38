"""Dual-rate closed loop: sensors and controller at ``control_dt``, RK4 physics at
``physics_dt`` with the command held in between."""

import numpy as np
from numba import njit

from ..analysis import compute_diagnostics
from ..controller import law_kernel, mu_d_kernel
from ..errors import DivergenceError
from ..mathx import E3
from ..plant import accel_kernel, rk4_kernel
from ..sensors import RandomStream, measure_kernel
from .telemetry import N_COLUMNS, OFFSETS, RunLog

DIVERGENCE_LIMIT = 1e9

OK, DIVERGED, SINGULAR = 0, 1, 2

_KERNEL_CHANNELS = (
    "t", "true_p", "true_v", "true_q", "true_delta", "true_r2",
    "meas_p", "meas_v", "meas_b1", "meas_b2",
    "cmd_u_t", "cmd_omega", "cmd_omega_applied",
    "ctl_mu_d", "ctl_q_d", "ctl_v_hat", "ctl_psi",
)
_KERNEL_OFFSETS = np.array([OFFSETS[c][0] for c in _KERNEL_CHANNELS], dtype=np.int64)


@njit(cache=True)
def _loop(rows, off, x0, v_hat0, p_r, r1, k_p, k_v, k_1, gamma_1, gamma_2,
          mass, c_d, v_w, g, n_ticks, substeps, physics_dt, control_dt,
          n_pos, n_vel, n_mag, n_acc, n_gyro, gyro_bias):
    """Fill ``rows`` tick by tick; returns ``(status, rows_written)``.

    The controller sees only ``meas_*`` quantities. The last row records the
    state at ``t_end`` and the command the law would issue there; that command
    is never applied.
    """
    x = x0.copy()
    v_hat = v_hat0.copy()
    zero = np.zeros(3)
    for k in range(n_ticks + 1):
        p = x[0:3]
        v = x[3:6]
        quat = x[6:10]
        p_meas = p + n_pos[k]
        v_meas = v + n_vel[k]
        # The accelerometer reads the specific force under the thrust that
        # takes effect at this tick, which depends on GPS data only.
        mu_pre = mu_d_kernel(p_meas - p_r, v_meas, k_p, k_v)
        diff = mu_pre - g * E3
        u_now = np.sqrt(np.dot(diff, diff))
        v_dot, delta = accel_kernel(v, quat, u_now, mass, c_d, v_w, g)
        _, _, b1, b2 = measure_kernel(p, v, quat, v_dot, r1, g, zero, zero, n_mag[k], n_acc[k])

        u_t, omega, q_d, mu_d, psi, v_hat_dot = law_kernel(
            p_meas, v_meas, b1, b2, v_hat, p_r, r1, k_p, k_v, k_1, gamma_1, gamma_2, g
        )
        omega_applied = omega + gyro_bias + n_gyro[k]

        row = rows[k]
        row[off[0]] = k * control_dt
        row[off[1]:off[1] + 3] = p
        row[off[2]:off[2] + 3] = v
        row[off[3]:off[3] + 4] = quat
        row[off[4]:off[4] + 3] = delta
        row[off[5]:off[5] + 3] = v_dot - g * E3
        row[off[6]:off[6] + 3] = p_meas
        row[off[7]:off[7] + 3] = v_meas
        row[off[8]:off[8] + 3] = b1
        row[off[9]:off[9] + 3] = b2
        row[off[10]] = u_t
        row[off[11]:off[11] + 3] = omega
        row[off[12]:off[12] + 3] = omega_applied
        row[off[13]:off[13] + 3] = mu_d
        row[off[14]:off[14] + 4] = q_d
        row[off[15]:off[15] + 3] = v_hat
        row[off[16]:off[16] + 3] = psi

        if np.isnan(u_t):
            return SINGULAR, k + 1
        if k == n_ticks:
            break
        for _ in range(substeps):
            x = rk4_kernel(x, u_t, omega_applied, mass, c_d, v_w, g, physics_dt)
        v_hat = v_hat + control_dt * v_hat_dot
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v_hat))):
            return DIVERGED, k + 1
        if np.max(np.abs(x)) > DIVERGENCE_LIMIT or np.max(np.abs(v_hat)) > DIVERGENCE_LIMIT:
            return DIVERGED, k + 1
    return OK, n_ticks + 1


def _as_list(a):
    return np.asarray(a, dtype=float).tolist()


def scenario_meta(cfg):
    """JSON-serializable description of ``cfg`` stored alongside a log."""
    g, s, p = cfg.gains, cfg.sensors, cfg.plant
    return {
        "timing": {"t_end": cfg.timing.t_end, "physics_dt": cfg.timing.physics_dt,
                   "control_dt": cfg.timing.control_dt},
        "gains": {"k_p": g.k_p, "k_v": g.k_v, "k_1": g.k_1, "gamma_1": g.gamma_1,
                  "gamma_2": g.gamma_2, "g": g.g, "r1": _as_list(g.r1)},
        "plant": {"mass": p.mass, "c_d": _as_list(p.c_d), "v_w": _as_list(p.v_w), "g": p.g},
        "sensors": {"r1": _as_list(s.r1), "std_mag": s.std_mag, "std_acc": s.std_acc,
                    "std_gyro": s.std_gyro, "std_vel": s.std_vel, "std_pos": s.std_pos,
                    "gyro_bias": _as_list(s.gyro_bias)},
        "lyapunov": {"gamma": cfg.lyapunov.gamma, "gamma_q": cfg.lyapunov.gamma_q,
                     "k_r": cfg.lyapunov.k_r},
        "p_r": _as_list(cfg.p_r),
        "seed": cfg.seed,
        "wind_free": not bool(np.any(p.v_w)),
        "noise_free": bool(s.noise_free),
        "n_rows": cfg.timing.n_ticks + 1,
        "controller_steps": cfg.timing.n_ticks,
    }


def run(cfg):
    """Simulate ``cfg`` and return the complete :class:`RunLog`.

    Raises :class:`DivergenceError` (carrying the partial log) if the state
    leaves ``|x| <= 1e9`` or turns non-finite.
    """
    cfg.timing.validate()
    n = cfg.timing.n_ticks
    noise = RandomStream(cfg.seed).block(cfg.sensors, n + 1)
    rows = np.zeros((n + 1, N_COLUMNS))
    x0 = np.concatenate([cfg.initial.p, cfg.initial.v, cfg.initial.q]).astype(float)
    g = cfg.gains
    status, written = _loop(
        rows, _KERNEL_OFFSETS, x0, np.asarray(cfg.initial.v_hat, dtype=float),
        np.asarray(cfg.p_r, dtype=float), g.r1, g.k_p, g.k_v, g.k_1, g.gamma_1, g.gamma_2,
        cfg.plant.mass, cfg.plant.c_d, cfg.plant.v_w, cfg.plant.g,
        n, cfg.timing.substeps, cfg.timing.physics_dt, cfg.timing.control_dt,
        noise["pos"], noise["vel"], noise["mag"], noise["acc"], noise["gyro"],
        cfg.sensors.gyro_bias,
    )
    meta = scenario_meta(cfg)
    meta["complete"] = status == OK
    log = RunLog(rows if status == OK else rows[:written].copy(), meta)
    if status != OK:
        reason = "diverged" if status == DIVERGED else "hit the extraction singularity"
        t_fail = (written - 1) * cfg.timing.control_dt
        raise DivergenceError(f"closed loop {reason} near t={t_fail:.3f}s", log=log)
    fill_diagnostics(log)
    return log


def fill_diagnostics(log):
    d = compute_diagnostics(log)
    log["diag_lyapunov"] = d["lyapunov"]
    log["diag_eta_tilde"] = d["eta_tilde"]
    log["diag_r2_tilde"] = d["r2_tilde"]
    log["diag_lambda_min_w"] = d["lambda_min_w"]
    return log
