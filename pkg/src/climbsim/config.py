"""YAML run configuration: strict schema, defaults, section builders.

Every simulation entry point reads one YAML file with optional sections
(`terrain`, `robot`, `tether`, `hop`, `climb`, `study`) plus a top-level
`seed`.  Unknown keys anywhere are rejected with their full path, so a
typo in a physics parameter fails loudly instead of silently running
the defaults.  Builders return the corresponding domain objects with
omitted fields filled from the dataclass defaults.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np
import yaml

from .climber import DEFAULT_TERRAIN, ClimbScenario, FailureInjection
from .dynamics import BODIES, RobotParams
from .errors import ConfigValidationError
from .study import TradeStudyConfig
from .terrain import TerrainParams
from .tether import TetherSpec

_TOP_KEYS = {"seed", "terrain", "robot", "tether", "hop", "climb", "study"}
_TERRAIN_KEYS = {
    "fractal_dim",
    "roughness_amp",
    "sample_length",
    "freq_scale",
    "ridge_count",
    "max_freq_index",
    "phase_seed",
    "extent",
    "spacing",
}
_ROBOT_KEYS = {
    "mass",
    "diameter",
    "thrust",
    "specific_impulse",
    "kp",
    "kd",
    "wheel_torque_limit",
    "propellant_budget",
}
_TETHER_KEYS = {"stiffness", "rest_length", "damping"}
_HOP_KEYS = {
    "body",
    "bodies",
    "height",
    "time",
    "displacement",
    "propellant",
    "calibrate",
    "control",
    "allow_extended_time",
    "dt",
}
_CLIMB_KEYS = {
    "n_robots",
    "hop_batch",
    "cycles",
    "hop_height",
    "hop_time",
    "column_spacing",
    "row_spacing",
    "approach_angle_deg",
    "body",
    "spines_per_robot",
    "propellant",
    "retry_limit",
    "settle_time",
    "dt",
    "initial_positions",
    "injections",
}
_INJECTION_KEYS = {"robot", "cycle", "kind"}
_STUDY_KEYS = {
    "trials",
    "threads",
    "hang_counts",
    "spine_min",
    "spine_max",
    "capacity_band",
    "robot_mass",
    "gravity",
    "per_contact_load",
    "hop_distance",
    "hop_time",
    "propellant_budget",
    "propellant_per_hop",
    "instrument_range",
    "robot_separation",
    "system_sizes",
    "hop_batches",
}


def _check_keys(section: dict, allowed: set, path: str) -> None:
    if not isinstance(section, dict):
        raise ConfigValidationError(f"{path}: expected a mapping")
    for key in section:
        if key not in allowed:
            raise ConfigValidationError(
                f"unknown key {path}.{key} (allowed: {', '.join(sorted(allowed))})"
            )


def _as_float(section, key, path):
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigValidationError(f"{path}.{key}: expected a number, got {value!r}")
    return float(value)


def _as_int(section, key, path):
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigValidationError(f"{path}.{key}: expected an integer, got {value!r}")
    return int(value)


def _as_bool(section, key, path):
    value = section[key]
    if not isinstance(value, bool):
        raise ConfigValidationError(f"{path}.{key}: expected true/false, got {value!r}")
    return value


def _as_str(section, key, path):
    value = section[key]
    if not isinstance(value, str):
        raise ConfigValidationError(f"{path}.{key}: expected a string, got {value!r}")
    return value


def _as_vector(section, key, path, length=3):
    value = section[key]
    if not isinstance(value, (list, tuple)) or len(value) != length:
        raise ConfigValidationError(
            f"{path}.{key}: expected a list of {length} numbers, got {value!r}"
        )
    out = []
    for i, item in enumerate(value):
        if isinstance(item, bool) or not isinstance(item, (int, float)):
            raise ConfigValidationError(
                f"{path}.{key}[{i}]: expected a number, got {item!r}"
            )
        out.append(float(item))
    return out


def _gain(section, key, path):
    value = section[key]
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    return tuple(_as_vector(section, key, path))


def load_config(path) -> tuple:
    """Parse and validate a YAML config file.

    Returns (config dict, sha256 of the raw file bytes).  An empty file
    means all defaults.
    """
    with open(path, "rb") as fh:
        raw = fh.read()
    digest = hashlib.sha256(raw).hexdigest()
    try:
        data = yaml.safe_load(raw)
    except yaml.YAMLError as exc:
        raise ConfigValidationError(f"{path}: not valid YAML ({exc})") from exc
    if data is None:
        data = {}
    _check_keys(data, _TOP_KEYS, "config")
    if "seed" in data:
        _as_int(data, "seed", "config")
    for name, allowed in (
        ("terrain", _TERRAIN_KEYS),
        ("robot", _ROBOT_KEYS),
        ("tether", _TETHER_KEYS),
        ("hop", _HOP_KEYS),
        ("climb", _CLIMB_KEYS),
        ("study", _STUDY_KEYS),
    ):
        if name in data:
            _check_keys(data[name], allowed, name)
    return data, digest


def config_seed(config: dict, override=None) -> int:
    if override is not None:
        return int(override)
    return int(config.get("seed", 0))


def _wrap(path, build):
    """Re-raise any domain validation error with the section path."""
    try:
        return build()
    except ConfigValidationError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigValidationError(f"{path}: {exc}") from exc


def build_terrain(config: dict, seed: int) -> tuple:
    """(TerrainParams, extent, spacing) from the `terrain` section."""
    section = dict(config.get("terrain", {}))
    extent = (
        _as_float(section, "extent", "terrain") if "extent" in section else 1.024e-2
    )
    spacing = (
        _as_float(section, "spacing", "terrain") if "spacing" in section else 8.0e-5
    )
    kwargs = {"phase_seed": seed}
    for key, getter in (
        ("fractal_dim", _as_float),
        ("roughness_amp", _as_float),
        ("sample_length", _as_float),
        ("freq_scale", _as_float),
        ("ridge_count", _as_int),
        ("max_freq_index", _as_int),
        ("phase_seed", _as_int),
    ):
        if key in section:
            kwargs[key] = getter(section, key, "terrain")
    params = _wrap("terrain", lambda: TerrainParams(**kwargs))
    if extent <= 0 or spacing <= 0:
        raise ConfigValidationError("terrain: extent and spacing must be > 0")
    return params, extent, spacing


def build_robot(config: dict) -> RobotParams:
    section = dict(config.get("robot", {}))
    kwargs = {}
    for key in ("mass", "diameter", "thrust", "specific_impulse",
                "wheel_torque_limit", "propellant_budget"):
        if key in section:
            kwargs[key] = _as_float(section, key, "robot")
    for key in ("kp", "kd"):
        if key in section:
            kwargs[key] = _gain(section, key, "robot")
    return _wrap("robot", lambda: RobotParams(**kwargs))


def build_tether(config: dict) -> TetherSpec:
    section = dict(config.get("tether", {}))
    kwargs = {}
    for key in ("stiffness", "rest_length", "damping"):
        if key in section:
            kwargs[key] = _as_float(section, key, "tether")
    return _wrap("tether", lambda: TetherSpec(**kwargs))


@dataclass(frozen=True)
class HopSettings:
    """Resolved `hop` section: what to fly and on which bodies."""

    body: str = "mars"
    bodies: tuple = ("mars", "moon", "ceres", "phobos")
    displacement: tuple = (0.0, 0.0, 1.27)
    height: float = 1.27
    hop_time: float = 1.5
    propellant: float = 0.05
    calibrate: bool = True
    control: str = "auto"
    allow_extended_time: bool = False
    dt: float = 1.0e-3


def build_hop(config: dict, robot: RobotParams) -> HopSettings:
    section = dict(config.get("hop", {}))
    kwargs = {}
    if "body" in section:
        kwargs["body"] = _as_str(section, "body", "hop")
    if "bodies" in section:
        value = section["bodies"]
        if not isinstance(value, (list, tuple)) or not value:
            raise ConfigValidationError("hop.bodies: expected a non-empty list")
        kwargs["bodies"] = tuple(str(b) for b in value)
    if "height" in section:
        kwargs["height"] = _as_float(section, "height", "hop")
        kwargs["displacement"] = (0.0, 0.0, kwargs["height"])
    if "displacement" in section:
        kwargs["displacement"] = tuple(_as_vector(section, "displacement", "hop"))
    if "time" in section:
        kwargs["hop_time"] = _as_float(section, "time", "hop")
    if "propellant" in section:
        kwargs["propellant"] = _as_float(section, "propellant", "hop")
    if "calibrate" in section:
        kwargs["calibrate"] = _as_bool(section, "calibrate", "hop")
    if "control" in section:
        kwargs["control"] = _as_str(section, "control", "hop")
    if "allow_extended_time" in section:
        kwargs["allow_extended_time"] = _as_bool(section, "allow_extended_time", "hop")
    if "dt" in section:
        kwargs["dt"] = _as_float(section, "dt", "hop")
    settings = HopSettings(**kwargs)
    for name in (settings.body,) + settings.bodies:
        if name not in BODIES:
            raise ConfigValidationError(
                f"hop: unknown body {name!r}; known: {sorted(BODIES)}"
            )
    if settings.hop_time <= 0 or settings.dt <= 0:
        raise ConfigValidationError("hop: time and dt must be > 0")
    if settings.propellant <= 0:
        raise ConfigValidationError("hop: propellant must be > 0")
    if settings.control not in ("auto", "rate", "attitude"):
        raise ConfigValidationError(
            f"hop.control: expected auto|rate|attitude, got {settings.control!r}"
        )
    if not settings.calibrate and robot.thrust <= 0.0:
        raise ConfigValidationError(
            "hop: robot.thrust is 0 and hop.calibrate is false; "
            "a zero-thrust vehicle cannot fly"
        )
    return settings


def build_scenario(config: dict, seed: int) -> ClimbScenario:
    section = dict(config.get("climb", {}))
    robot = build_robot(config)
    tether_kwargs = {"damping": 25.0}
    tether_section = dict(config.get("tether", {}))
    for key in ("stiffness", "rest_length", "damping"):
        if key in tether_section:
            tether_kwargs[key] = _as_float(tether_section, key, "tether")
    tether = _wrap("tether", lambda: TetherSpec(**tether_kwargs))

    kwargs = {"seed": seed, "robot": robot, "tether": tether}
    if "terrain" in config:
        terrain, extent, spacing = build_terrain(config, seed)
        kwargs["terrain"] = terrain
        kwargs["patch_extent"] = extent
        kwargs["patch_spacing"] = spacing
    int_keys = ("n_robots", "hop_batch", "spines_per_robot", "retry_limit")
    float_keys = (
        "hop_height",
        "hop_time",
        "column_spacing",
        "row_spacing",
        "approach_angle_deg",
        "propellant",
        "settle_time",
        "dt",
    )
    for key in int_keys:
        if key in section:
            kwargs[key] = _as_int(section, key, "climb")
    for key in float_keys:
        if key in section:
            kwargs[key] = _as_float(section, key, "climb")
    if "cycles" in section:
        kwargs["n_cycles"] = _as_int(section, "cycles", "climb")
    if "body" in section:
        kwargs["body"] = _as_str(section, "body", "climb")
    if "initial_positions" in section:
        value = section["initial_positions"]
        if not isinstance(value, (list, tuple)):
            raise ConfigValidationError("climb.initial_positions: expected a list")
        kwargs["initial_positions"] = tuple(
            tuple(_as_vector({"p": p}, "p", f"climb.initial_positions[{i}]"))
            for i, p in enumerate(value)
        )
    if "injections" in section:
        value = section["injections"]
        if not isinstance(value, (list, tuple)):
            raise ConfigValidationError("climb.injections: expected a list")
        injections = []
        for i, entry in enumerate(value):
            path = f"climb.injections[{i}]"
            _check_keys(entry, _INJECTION_KEYS, path)
            if "robot" not in entry or "cycle" not in entry:
                raise ConfigValidationError(f"{path}: needs robot and cycle")
            injections.append(
                FailureInjection(
                    robot=_as_int(entry, "robot", path),
                    cycle=_as_int(entry, "cycle", path),
                    kind=str(entry.get("kind", "grip")),
                )
            )
        kwargs["injections"] = tuple(injections)
    return _wrap("climb", lambda: ClimbScenario(**kwargs))


@dataclass(frozen=True)
class StudySettings:
    """Resolved `study` section: trade config plus sweep controls."""

    trade: TradeStudyConfig = field(default_factory=TradeStudyConfig)
    trials: int = 100_000
    threads: int = 1
    hang_counts: tuple = (1, 2)
    spine_min: int = 4
    spine_max: int = 30
    capacity_band: tuple = (1.0, 2.0)
    hop_batches: tuple = (1, 2)


def build_study(config: dict, trials=None, threads=None) -> StudySettings:
    section = dict(config.get("study", {}))
    trade_kwargs = {}
    for key in (
        "robot_mass",
        "gravity",
        "per_contact_load",
        "hop_distance",
        "hop_time",
        "propellant_budget",
        "propellant_per_hop",
        "instrument_range",
        "robot_separation",
    ):
        if key in section:
            trade_kwargs[key] = _as_float(section, key, "study")
    if "system_sizes" in section:
        value = section["system_sizes"]
        if not isinstance(value, (list, tuple)) or not value:
            raise ConfigValidationError("study.system_sizes: expected a non-empty list")
        trade_kwargs["system_sizes"] = tuple(int(n) for n in value)
    kwargs = {}
    if "trials" in section:
        kwargs["trials"] = _as_int(section, "trials", "study")
    if "threads" in section:
        kwargs["threads"] = _as_int(section, "threads", "study")
    if trials is not None:
        kwargs["trials"] = int(trials)
    if threads is not None:
        kwargs["threads"] = int(threads)
    if "hang_counts" in section:
        value = section["hang_counts"]
        if not isinstance(value, (list, tuple)) or not value:
            raise ConfigValidationError("study.hang_counts: expected a non-empty list")
        kwargs["hang_counts"] = tuple(int(n) for n in value)
    if "hop_batches" in section:
        value = section["hop_batches"]
        if not isinstance(value, (list, tuple)) or not value:
            raise ConfigValidationError("study.hop_batches: expected a non-empty list")
        kwargs["hop_batches"] = tuple(int(n) for n in value)
    for key in ("spine_min", "spine_max"):
        if key in section:
            kwargs[key] = _as_int(section, key, "study")
    if "capacity_band" in section:
        band = _as_vector(section, "capacity_band", "study", length=2)
        if band[0] <= 0 or band[1] <= band[0]:
            raise ConfigValidationError(
                "study.capacity_band: expected [low, high] with 0 < low < high"
            )
        kwargs["capacity_band"] = tuple(band)
    settings = StudySettings(
        trade=_wrap("study", lambda: TradeStudyConfig(**trade_kwargs)), **kwargs
    )
    if settings.trials < 1:
        raise ConfigValidationError("study.trials must be >= 1")
    if settings.threads < 1:
        raise ConfigValidationError("study.threads must be >= 1")
    if not 1 <= settings.spine_min <= settings.spine_max:
        raise ConfigValidationError("study: need 1 <= spine_min <= spine_max")
    if any(h < 1 for h in settings.hang_counts):
        raise ConfigValidationError("study.hang_counts must all be >= 1")
    if any(b < 1 for b in settings.hop_batches):
        raise ConfigValidationError("study.hop_batches must all be >= 1")
    return settings
