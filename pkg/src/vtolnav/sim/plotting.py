"""Static SVG figures of a run: position error, velocity, angular velocity, thrust."""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .telemetry import RunLog, import_csv  # noqa: E402

FIGURES = ("position_error", "velocity", "angular_velocity", "thrust")
DEFAULT_MASS = 5.0

_STYLE = {
    "svg.hashsalt": "vtolnav",
    "svg.fonttype": "path",
    "figure.figsize": (7.0, 3.6),
    "axes.grid": True,
}


def _series(log, mass):
    p_r = np.asarray(log.meta.get("p_r", [0.0, 0.0, 0.0]))
    axes3 = ("x", "y", "z")
    return {
        "position_error": ("Position error e_p (m)", log["true_p"] - p_r, axes3),
        "velocity": ("Velocity v (m/s)", log["true_v"], axes3),
        "angular_velocity": ("Control effort (angular velocity) omega (rad/s)",
                             log["cmd_omega"], axes3),
        "thrust": ("Control effort (thrust) T = u_t m_b (N)",
                   (log["cmd_u_t"] * mass)[:, None], ("T",)),
    }


def plot(source, out_dir, mass=None):
    """Render the four figures for a :class:`RunLog` or telemetry CSV path.

    Returns the written paths in :data:`FIGURES` order.
    """
    log = source if isinstance(source, RunLog) else import_csv(source)
    if len(log) == 0:
        raise ValueError("cannot plot an empty log")
    if mass is None:
        mass = log.meta.get("plant", {}).get("mass", DEFAULT_MASS)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t = log.t
    paths = []
    with plt.rc_context(_STYLE):
        for name, (title, y, labels) in _series(log, mass).items():
            fig, ax = plt.subplots()
            for i, lab in enumerate(labels):
                ax.plot(t, y[:, i], lw=0.8, label=lab)
            lo, hi = float(np.min(y)), float(np.max(y))
            ax.set_title(title, fontsize=10)
            ax.set_xlabel("time (s)")
            ax.set_xlim(t[0], t[-1])
            ax.legend(loc="upper right", fontsize=8)
            fig.tight_layout()
            path = out_dir / f"{name}.svg"
            fig.savefig(path, format="svg", metadata={
                "Date": None, "Creator": None,
                "Title": title,
                "Description": f"t in [{t[0]:.6g}, {t[-1]:.6g}] s; data in [{lo:.9g}, {hi:.9g}]",
            })
            plt.close(fig)
            paths.append(path)
    return paths
