"""Run log container and CSV telemetry format.

Column groups are disjoint by prefix so the output-feedback property can be
audited from the file alone:

``true_*``  plant truth (never read by the controller)
``meas_*``  sensor outputs handed to the controller
``cmd_*``   control inputs, as commanded and as applied after gyro corruption
``ctl_*``   controller internals
``diag_*``  analysis quantities computed from truth after the run

Vectors expand to ``_x/_y/_z`` columns, quaternions to ``_w/_x/_y/_z``
(scalar first). A JSON sidecar ``<stem>.meta.json`` carries the scenario so a
CSV can be checked without its config.
"""

import json
from pathlib import Path

import numpy as np

from ..errors import IncompleteLogError

SCHEMA = (
    ("t", 1),
    ("true_p", 3),
    ("true_v", 3),
    ("true_q", 4),
    ("true_delta", 3),
    ("true_r2", 3),
    ("meas_p", 3),
    ("meas_v", 3),
    ("meas_b1", 3),
    ("meas_b2", 3),
    ("cmd_u_t", 1),
    ("cmd_omega", 3),
    ("cmd_omega_applied", 3),
    ("ctl_mu_d", 3),
    ("ctl_q_d", 4),
    ("ctl_v_hat", 3),
    ("ctl_psi", 3),
    ("diag_lyapunov", 1),
    ("diag_eta_tilde", 1),
    ("diag_r2_tilde", 3),
    ("diag_lambda_min_w", 1),
)

_SUFFIX = {3: ("x", "y", "z"), 4: ("w", "x", "y", "z")}


def _layout():
    offsets = {}
    names = []
    col = 0
    for name, width in SCHEMA:
        offsets[name] = (col, width)
        if width == 1:
            names.append(name)
        else:
            names.extend(f"{name}_{s}" for s in _SUFFIX[width])
        col += width
    return offsets, tuple(names)


OFFSETS, COLUMNS = _layout()
N_COLUMNS = len(COLUMNS)


def meta_path(csv_path):
    p = Path(csv_path)
    return p.with_name(p.stem + ".meta.json")


class RunLog:
    """Time-indexed telemetry; one row per control tick.

    ``log["true_p"]`` returns an ``(n, 3)`` view, scalar channels are 1-D.
    """

    def __init__(self, data, meta):
        data = np.asarray(data, dtype=float)
        if data.ndim != 2 or data.shape[1] != N_COLUMNS:
            raise ValueError(f"expected {N_COLUMNS} columns, got shape {data.shape}")
        self.data = data
        self.meta = meta

    def __getitem__(self, name):
        start, width = OFFSETS[name]
        if width == 1:
            return self.data[:, start]
        return self.data[:, start:start + width]

    def __setitem__(self, name, value):
        start, width = OFFSETS[name]
        if width == 1:
            self.data[:, start] = value
        else:
            self.data[:, start:start + width] = value

    def __len__(self):
        return self.data.shape[0]

    @property
    def t(self):
        return self["t"]

    def truncated(self, n):
        meta = dict(self.meta, complete=False)
        return RunLog(self.data[:n].copy(), meta)


def export_csv(log, path):
    """Write ``log`` as CSV plus its metadata sidecar."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        np.savetxt(path, log.data, delimiter=",", fmt="%.17g",
                   header=",".join(COLUMNS), comments="")
        meta_path(path).write_text(json.dumps(log.meta, indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write telemetry to {path}: {exc}") from exc


def import_csv(path):
    """Read a telemetry CSV (and sidecar, if present) back into a :class:`RunLog`."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no telemetry file at {path}")
    with path.open() as fh:
        header = fh.readline().strip().split(",")
    if tuple(header) != COLUMNS:
        raise IncompleteLogError(f"{path}: header does not match the telemetry schema")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if data.size == 0:
        data = np.empty((0, N_COLUMNS))
    mp = meta_path(path)
    meta = json.loads(mp.read_text()) if mp.is_file() else {}
    return RunLog(data, meta)
