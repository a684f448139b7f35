"""Line-oriented run configuration: ``key = value`` with ``#`` comments.

Unknown keys are rejected and every diagnostic carries the offending
line number.  An empty file yields the standard defaults.  The rate
keys carry the 2*hbar*rate values in the units documented on
ModelParams; ``two_hbar_gamma_phase`` is accepted as a convenience key
that splits the total equally between electrons and holes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .params import ModelParams

SWEEPABLE = ("delta_omega_BX", "two_hbar_gamma_phase", "two_hbar_P", "B_N")

CHANNEL_KEYS = ("cav", "x", "y", "L", "R", "total")


class ConfigError(Exception):
    """Invalid configuration file; message includes the line number."""


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple[float, ...]

    def __post_init__(self):
        if self.parameter not in SWEEPABLE:
            raise ConfigError(
                f"sweep_parameter must be one of {SWEEPABLE}, got {self.parameter!r}"
            )
        if len(self.values) == 0:
            raise ConfigError("sweep_values must be non-empty")


@dataclass(frozen=True)
class OverhauserSpec:
    mode: str = "fixed"
    rms_mT: tuple[float, float, float] = (0.0, 0.0, 0.0)
    samples: int = 1

    def __post_init__(self):
        if self.mode not in ("fixed", "monte_carlo"):
            raise ConfigError(f"overhauser_mode must be fixed or monte_carlo, got {self.mode!r}")
        for r in self.rms_mT:
            if not 0.0 <= r <= 100.0:
                raise ConfigError(f"overhauser rms {r} mT outside the sane range [0, 100]")
        if self.samples < 1:
            raise ConfigError("overhauser_samples must be >= 1")


@dataclass(frozen=True)
class GridSpec:
    omega_min: float
    omega_max: float
    points: int

    def __post_init__(self):
        if self.omega_max <= self.omega_min:
            raise ConfigError("omega_max must exceed omega_min")
        if self.points < 2:
            raise ConfigError("omega_points must be >= 2")


@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    sweep: SweepSpec | None = None
    overhauser: OverhauserSpec = field(default_factory=OverhauserSpec)
    grid: GridSpec | None = None
    channels: tuple[str, ...] = ("cav", "x", "y", "total")
    seed: int = 0


_MODEL_FLOAT_KEYS = (
    "J_ee", "J_hh", "J_eh", "delta0", "delta1", "delta2",
    "two_hbar_Gamma_cav", "two_hbar_Gamma_spon",
    "two_hbar_gamma_phase_e", "two_hbar_gamma_phase_h",
    "two_hbar_P", "two_hbar_g", "theta_cav", "delta_omega_BX",
    "B_Nx", "B_Ny", "B_Nz", "g_e", "two_hbar_gamma_reso", "lambda_ref",
)

_KNOWN_KEYS = set(_MODEL_FLOAT_KEYS) | {
    "two_hbar_gamma_phase", "p_max",
    "omega_min", "omega_max", "omega_points", "channels",
    "sweep_parameter", "sweep_values",
    "overhauser_mode", "overhauser_rms_x", "overhauser_rms_y", "overhauser_rms_z",
    "overhauser_samples", "seed",
}


def _parse_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        yield lineno, key, value


def _to_float(lineno, key, value):
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key} expects a number, got {value!r}") from None


def _to_int(lineno, key, value):
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"line {lineno}: {key} expects an integer, got {value!r}") from None


def parse_config_text(text: str) -> RunConfig:
    entries: dict[str, tuple[int, str]] = {}
    for lineno, key, value in _parse_lines(text):
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(
                f"line {lineno}: duplicate key {key!r} (first set on line {entries[key][0]})"
            )
        entries[key] = (lineno, value)

    model_kwargs = {}
    for key in _MODEL_FLOAT_KEYS:
        if key in entries:
            lineno, value = entries[key]
            model_kwargs[key] = _to_float(lineno, key, value)
    if "p_max" in entries:
        lineno, value = entries["p_max"]
        model_kwargs["p_max"] = _to_int(lineno, "p_max", value)

    if "two_hbar_gamma_phase" in entries:
        lineno, value = entries["two_hbar_gamma_phase"]
        for clash in ("two_hbar_gamma_phase_e", "two_hbar_gamma_phase_h"):
            if clash in entries:
                raise ConfigError(
                    f"line {lineno}: two_hbar_gamma_phase conflicts with {clash} "
                    f"(line {entries[clash][0]}); set one or the other"
                )
        total = _to_float(lineno, "two_hbar_gamma_phase", value)
        model_kwargs["two_hbar_gamma_phase_e"] = 0.5 * total
        model_kwargs["two_hbar_gamma_phase_h"] = 0.5 * total

    try:
        params = ModelParams(**model_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    grid = None
    grid_keys = [k for k in ("omega_min", "omega_max", "omega_points") if k in entries]
    if grid_keys:
        if len(grid_keys) != 3:
            missing = sorted(set(("omega_min", "omega_max", "omega_points")) - set(grid_keys))
            raise ConfigError(f"grid needs omega_min, omega_max and omega_points; missing {missing}")
        grid = GridSpec(
            omega_min=_to_float(entries["omega_min"][0], "omega_min", entries["omega_min"][1]),
            omega_max=_to_float(entries["omega_max"][0], "omega_max", entries["omega_max"][1]),
            points=_to_int(entries["omega_points"][0], "omega_points", entries["omega_points"][1]),
        )

    channels = ("cav", "x", "y", "total")
    if "channels" in entries:
        lineno, value = entries["channels"]
        channels = tuple(c.strip() for c in value.split(",") if c.strip())
        for c in channels:
            if c not in CHANNEL_KEYS:
                raise ConfigError(f"line {lineno}: unknown channel {c!r}; expected {CHANNEL_KEYS}")
        if not channels:
            raise ConfigError(f"line {lineno}: channels list is empty")

    sweep = None
    if "sweep_parameter" in entries or "sweep_values" in entries:
        if "sweep_parameter" not in entries or "sweep_values" not in entries:
            raise ConfigError("sweep_parameter and sweep_values must be given together")
        lineno, value = entries["sweep_values"]
        try:
            values = tuple(float(v) for v in value.split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"line {lineno}: sweep_values expects comma-separated numbers") from None
        sweep = SweepSpec(parameter=entries["sweep_parameter"][1], values=values)

    oh_kwargs = {}
    if "overhauser_mode" in entries:
        oh_kwargs["mode"] = entries["overhauser_mode"][1]
    rms = [0.0, 0.0, 0.0]
    for i, key in enumerate(("overhauser_rms_x", "overhauser_rms_y", "overhauser_rms_z")):
        if key in entries:
            rms[i] = _to_float(entries[key][0], key, entries[key][1])
    if any(r != 0.0 for r in rms):
        oh_kwargs["rms_mT"] = tuple(rms)
    if "overhauser_samples" in entries:
        oh_kwargs["samples"] = _to_int(entries["overhauser_samples"][0], "overhauser_samples",
                                       entries["overhauser_samples"][1])
    overhauser = OverhauserSpec(**oh_kwargs)

    seed = 0
    if "seed" in entries:
        seed = _to_int(entries["seed"][0], "seed", entries["seed"][1])

    return RunConfig(
        params=params, sweep=sweep, overhauser=overhauser,
        grid=grid, channels=channels, seed=seed,
    )


def parse_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config_text(text)


def apply_sweep_value(params: ModelParams, parameter: str, value: float) -> ModelParams:
    """Model parameters for one sweep point.

    A B_N sweep applies `value` (mT) with equal magnitude on all three
    axes; the dephasing sweep splits the total equally between carriers.
    """
    if parameter == "delta_omega_BX":
        return params.replace(delta_omega_BX=value)
    if parameter == "two_hbar_gamma_phase":
        return params.replace(
            two_hbar_gamma_phase_e=0.5 * value, two_hbar_gamma_phase_h=0.5 * value
        )
    if parameter == "two_hbar_P":
        return params.replace(two_hbar_P=value)
    if parameter == "B_N":
        return params.replace(B_Nx=value, B_Ny=value, B_Nz=value)
    raise ConfigError(f"unknown sweep parameter {parameter!r}")
