"""Scenario configuration: one INI file describes motor, rover, body and run.

The format is flat key = value pairs grouped in sections ([motor],
[hopper], [environment], [controller], [run]), all values in SI units and
angles in degrees.  A packaged default scenario with the Itokawa constants
backs every load, so user files only need the keys they change.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .control import DesignSpec
from .errors import ValidationError
from .hopdyn import Environment, HopperConfig
from .motor import MotorParams

DEFAULT_SCENARIO = "itokawa.ini"
CONFIG_ENV_VAR = "HOPPERSIM_CONFIG"


@dataclass(frozen=True)
class RunConfig:
    """Fully validated scenario: components plus run-level settings."""

    motor: MotorParams
    hopper: HopperConfig
    env: Environment
    controller: DesignSpec
    sample_time: float
    supply_voltage: float
    output_dir: str
    seed: int

    def __post_init__(self):
        if not (self.sample_time > 0.0):
            raise ValidationError("sample_time must be positive")
        if not (self.supply_voltage > 0.0):
            raise ValidationError("supply_voltage must be positive")


def _read_parser(path: str | Path | None) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    default_text = resources.files("hoppersim.data").joinpath(DEFAULT_SCENARIO).read_text()
    parser.read_string(default_text)
    if path is not None:
        with open(path, "r", encoding="utf-8") as handle:
            parser.read_file(handle)
    return parser


def _floats(section: configparser.SectionProxy, *keys: str) -> list[float]:
    values = []
    for key in keys:
        raw = section.get(key)
        if raw is None:
            raise ValidationError(f"missing config key {section.name}.{key}")
        try:
            values.append(float(raw))
        except ValueError as exc:
            raise ValidationError(f"config key {section.name}.{key} is not a number: {raw!r}") from exc
    return values


def _motor_from(parser: configparser.ConfigParser) -> MotorParams:
    J, b, K, L, R = _floats(
        parser["motor"], "inertia_J", "friction_b", "emf_K", "inductance_L", "resistance_R"
    )
    return MotorParams(J, b, K, L, R)


def _hopper_from(parser: configparser.ConfigParser) -> HopperConfig:
    alpha, l, mp, Ip, If, mf = _floats(
        parser["hopper"],
        "half_spike_angle_alpha",
        "spike_length_l",
        "platform_mass_mp",
        "platform_inertia_Ip",
        "flywheel_inertia_If",
        "flywheel_mass_mf",
    )
    return HopperConfig(alpha, l, mp, Ip, If, mf)


def _environment_from(parser: configparser.ConfigParser) -> Environment:
    g, beta, escape = _floats(parser["environment"], "gravity_g", "slope_beta", "escape_velocity")
    return Environment(g, beta, escape)


def load_motor_params(path: str | Path | None = None) -> MotorParams:
    return _motor_from(_read_parser(path))


def load_hopper_config(path: str | Path | None = None) -> HopperConfig:
    return _hopper_from(_read_parser(path))


def load_environment(path: str | Path | None = None) -> Environment:
    return _environment_from(_read_parser(path))


def load_config(path: str | Path | None = None) -> RunConfig:
    """Load a full scenario; missing keys fall back to the packaged default."""
    parser = _read_parser(path)
    overshoot, settling, sample_time, supply = _floats(
        parser["controller"], "overshoot_pct", "settling_time", "sample_time", "supply_voltage"
    )
    run = parser["run"]
    try:
        seed = int(run.get("seed", "0"))
    except ValueError as exc:
        raise ValidationError(f"config key run.seed is not an integer: {run.get('seed')!r}") from exc
    return RunConfig(
        motor=_motor_from(parser),
        hopper=_hopper_from(parser),
        env=_environment_from(parser),
        controller=DesignSpec(overshoot, settling),
        sample_time=sample_time,
        supply_voltage=supply,
        output_dir=run.get("output_dir", "."),
        seed=seed,
    )
