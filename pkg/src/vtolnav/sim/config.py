"""Scenario configuration: INI-style sections of ``key = value`` lines.

Vectors are comma separated. Any key left out takes its value from the
baseline scenario below; unknown sections or keys are rejected.

``[timing]``     t_end, physics_dt, control_dt (s)
``[plant]``      mass (kg), drag (3 diagonal or 9 row-major entries, kg/m),
                 wind (m/s), g (m/s^2)
``[sensors]``    r1 (gauss), std_mag (gauss), std_acc (m/s^2),
                 std_gyro_deg (deg/s), std_vel (m/s), std_pos (m),
                 gyro_bias_deg (deg/s)
``[gains]``      k_p, k_v, k_1, gamma_1, gamma_2
``[initial]``    p, v, q (scalar first), v_hat
``[reference]``  p_r
``[lyapunov]``   gamma, gamma_q, k_r
``[run]``        seed
"""

import configparser
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np

from ..analysis import LyapunovWeights
from ..controller import ControlGains
from ..errors import ParseError, ValidationError
from ..plant import PlantParams
from ..sensors import DEFAULT_SEED, SensorParams

BUNDLED = ("paper_baseline",)


@dataclass(frozen=True)
class InitialConditions:
    p: np.ndarray = field(default_factory=lambda: np.array([150.0, 50.0, 0.0]))
    v: np.ndarray = field(default_factory=lambda: np.zeros(3))
    q: np.ndarray = field(default_factory=lambda: np.array([1.0, 0.0, 0.0, 0.0]))
    v_hat: np.ndarray = field(default_factory=lambda: np.zeros(3))


@dataclass(frozen=True)
class Timing:
    t_end: float = 60.0
    physics_dt: float = 1e-3
    control_dt: float = 5e-3

    @property
    def substeps(self):
        return int(round(self.control_dt / self.physics_dt))

    @property
    def n_ticks(self):
        return int(np.ceil(self.t_end / self.control_dt - 1e-9))

    def validate(self):
        if not self.t_end > 0.0:
            raise ValidationError("t_end must be positive")
        if not self.physics_dt > 0.0 or self.control_dt < self.physics_dt:
            raise ValidationError("need 0 < physics_dt <= control_dt")
        ratio = self.control_dt / self.physics_dt
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise ValidationError("control_dt must be an integer multiple of physics_dt")


@dataclass(frozen=True)
class ScenarioConfig:
    plant: PlantParams
    sensors: SensorParams
    gains: ControlGains
    p_r: np.ndarray
    initial: InitialConditions
    timing: Timing
    lyapunov: LyapunovWeights

    @property
    def seed(self):
        return self.sensors.seed

    def with_seed(self, seed):
        return replace(self, sensors=replace(self.sensors, seed=int(seed)))

    def without_wind(self):
        return replace(self, plant=replace(self.plant, v_w=np.zeros(3)))

    def without_noise(self):
        """Noise-free sensors and an unbiased gyro."""
        s = replace(
            self.sensors, std_mag=0.0, std_acc=0.0, std_gyro=0.0, std_vel=0.0,
            std_pos=0.0, gyro_bias=np.zeros(3),
        )
        return replace(self, sensors=s)

    def with_gains(self, **kw):
        return replace(self, gains=replace(self.gains, **kw))

    def with_timing(self, **kw):
        timing = replace(self.timing, **kw)
        timing.validate()
        return replace(self, timing=timing)


def paper_baseline():
    """Full-disturbance baseline: wind, sensor noise and gyro bias all on."""
    deg = np.pi / 180.0
    return ScenarioConfig(
        plant=PlantParams(mass=5.0, c_d=np.diag([0.1, 0.1, 0.05]),
                          v_w=np.array([10.0, 5.0, 0.0]), g=9.81),
        sensors=SensorParams(
            r1=np.array([0.18, 0.0, 0.54]), std_mag=0.01, std_acc=0.1,
            std_gyro=0.1 * deg, std_vel=0.5, std_pos=0.5,
            gyro_bias=np.array([0.1, 0.05, -0.2]) * deg, seed=DEFAULT_SEED,
        ),
        gains=ControlGains(k_p=5.0, k_v=0.1, k_1=5.0, gamma_1=0.1, gamma_2=0.05, g=9.81,
                           r1=np.array([0.18, 0.0, 0.54])),
        p_r=np.zeros(3),
        initial=InitialConditions(),
        timing=Timing(),
        lyapunov=LyapunovWeights(),
    )


def disturbance_free_baseline():
    return paper_baseline().without_wind().without_noise()


# section -> key -> expected length (0 for scalars)
_KEYS = {
    "timing": {"t_end": 0, "physics_dt": 0, "control_dt": 0},
    "plant": {"mass": 0, "drag": -1, "wind": 3, "g": 0},
    "sensors": {"r1": 3, "std_mag": 0, "std_acc": 0, "std_gyro_deg": 0,
                "std_vel": 0, "std_pos": 0, "gyro_bias_deg": 3},
    "gains": {"k_p": 0, "k_v": 0, "k_1": 0, "gamma_1": 0, "gamma_2": 0},
    "initial": {"p": 3, "v": 3, "q": 4, "v_hat": 3},
    "reference": {"p_r": 3},
    "lyapunov": {"gamma": 0, "gamma_q": 0, "k_r": 0},
    "run": {"seed": 0},
}


def _fmt(x):
    if np.ndim(x) == 0:
        return repr(float(x)) if not isinstance(x, (int, np.integer)) else str(int(x))
    return ", ".join(repr(float(v)) for v in np.ravel(x))


def to_ini(cfg):
    """Serialize ``cfg`` in the format read by :func:`load_config`."""
    deg = 180.0 / np.pi
    c_d = cfg.plant.c_d
    drag = np.diag(c_d) if np.allclose(c_d, np.diag(np.diag(c_d))) else c_d
    values = {
        "timing": {"t_end": cfg.timing.t_end, "physics_dt": cfg.timing.physics_dt,
                   "control_dt": cfg.timing.control_dt},
        "plant": {"mass": cfg.plant.mass, "drag": drag, "wind": cfg.plant.v_w,
                  "g": cfg.plant.g},
        "sensors": {"r1": cfg.sensors.r1, "std_mag": cfg.sensors.std_mag,
                    "std_acc": cfg.sensors.std_acc,
                    "std_gyro_deg": cfg.sensors.std_gyro * deg,
                    "std_vel": cfg.sensors.std_vel, "std_pos": cfg.sensors.std_pos,
                    "gyro_bias_deg": cfg.sensors.gyro_bias * deg},
        "gains": {k: getattr(cfg.gains, k) for k in _KEYS["gains"]},
        "initial": {k: getattr(cfg.initial, k) for k in _KEYS["initial"]},
        "reference": {"p_r": cfg.p_r},
        "lyapunov": {k: getattr(cfg.lyapunov, k) for k in _KEYS["lyapunov"]},
        "run": {"seed": cfg.seed},
    }
    out = []
    for section, kv in values.items():
        out.append(f"[{section}]")
        out.extend(f"{k} = {_fmt(v)}" for k, v in kv.items())
        out.append("")
    return "\n".join(out)


def _parse_value(section, key, raw, length):
    try:
        vals = [float(tok) for tok in raw.split(",")]
    except ValueError:
        raise ParseError(f"[{section}] {key}: cannot parse {raw!r} as numbers") from None
    if length == 0:
        if len(vals) != 1:
            raise ParseError(f"[{section}] {key}: expected a scalar")
        return vals[0]
    if length > 0 and len(vals) != length:
        raise ParseError(f"[{section}] {key}: expected {length} values, got {len(vals)}")
    return np.array(vals)


def parse_config(text, source="<string>"):
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ParseError(f"{source}: {exc}") from None

    values = {}
    for section in parser.sections():
        if section not in _KEYS:
            raise ParseError(f"{source}: unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in _KEYS[section]:
                raise ParseError(f"{source}: unknown key {key!r} in [{section}]")
            values[(section, key)] = _parse_value(section, key, raw, _KEYS[section][key])
    return _build(values, source)


def _build(values, source):
    base = paper_baseline()
    deg = np.pi / 180.0

    def get(section, key, default):
        return values.get((section, key), default)

    try:
        timing = Timing(
            t_end=get("timing", "t_end", base.timing.t_end),
            physics_dt=get("timing", "physics_dt", base.timing.physics_dt),
            control_dt=get("timing", "control_dt", base.timing.control_dt),
        )
        timing.validate()

        drag = values.get(("plant", "drag"))
        if drag is None:
            c_d = base.plant.c_d
        elif drag.size == 3:
            c_d = np.diag(drag)
        elif drag.size == 9:
            c_d = drag.reshape(3, 3)
        else:
            raise ParseError(f"{source}: [plant] drag needs 3 or 9 values")
        g = get("plant", "g", base.plant.g)
        plant = PlantParams(mass=get("plant", "mass", base.plant.mass), c_d=c_d,
                            v_w=get("plant", "wind", base.plant.v_w), g=g)

        seed = values.get(("run", "seed"))
        if seed is None:
            seed = DEFAULT_SEED
        elif seed != int(seed) or seed < 0:
            raise ValidationError(f"{source}: seed must be a non-negative integer")
        s = base.sensors
        r1 = get("sensors", "r1", s.r1)
        sensors = SensorParams(
            r1=r1,
            std_mag=get("sensors", "std_mag", s.std_mag),
            std_acc=get("sensors", "std_acc", s.std_acc),
            std_gyro=values[("sensors", "std_gyro_deg")] * deg
            if ("sensors", "std_gyro_deg") in values else s.std_gyro,
            std_vel=get("sensors", "std_vel", s.std_vel),
            std_pos=get("sensors", "std_pos", s.std_pos),
            gyro_bias=values[("sensors", "gyro_bias_deg")] * deg
            if ("sensors", "gyro_bias_deg") in values else s.gyro_bias,
            seed=int(seed),
        )
        gains = ControlGains(
            **{k: get("gains", k, getattr(base.gains, k)) for k in _KEYS["gains"]},
            g=g, r1=r1,
        )
        q0 = get("initial", "q", base.initial.q)
        if abs(np.linalg.norm(q0) - 1.0) > 1e-6:
            raise ValidationError(f"{source}: [initial] q must be a unit quaternion")
        initial = InitialConditions(
            p=get("initial", "p", base.initial.p), v=get("initial", "v", base.initial.v),
            q=q0 / np.linalg.norm(q0), v_hat=get("initial", "v_hat", base.initial.v_hat),
        )
        lyap = LyapunovWeights(
            **{k: get("lyapunov", k, getattr(base.lyapunov, k)) for k in _KEYS["lyapunov"]}
        )
    except ParseError:
        raise
    except ValidationError:
        raise
    except ValueError as exc:
        raise ValidationError(f"{source}: {exc}") from None
    return ScenarioConfig(plant=plant, sensors=sensors, gains=gains,
                          p_r=get("reference", "p_r", base.p_r), initial=initial,
                          timing=timing, lyapunov=lyap)


def load_config(path):
    """Load and validate a scenario file, or a bundled scenario by name."""
    if str(path) in BUNDLED and not Path(path).exists():
        text = resources.files(__package__).joinpath("scenarios", f"{path}.cfg").read_text()
        return parse_config(text, source=str(path))
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise FileNotFoundError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, source=str(path))
