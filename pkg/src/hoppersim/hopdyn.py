"""2D leverage and launch physics of the cubic hopper.

The rover is a cube pivoting on a spike edge.  Spinning the internal
flywheel up slowly and braking it transfers angular momentum to the
chassis, which pivots and leaves the ground.  The geometry is set by half
the spike opening angle (alpha) and the surface slope (beta), both in
degrees at every interface here; radians are only used internally.

Core relations:

    tau_min = m_p g l sin(alpha + beta)          minimum torque to tip
    eta     = I_f / (I_p + m_p l^2)              energy transfer ratio
    v_h     = eta l w_f                          launch speed
    d_h     = v_h^2 sin(2 theta_h) / g           flat-plane range
    theta_h = alpha + beta                       instant braking
    theta_h = alpha + beta - eta I_f w_f^2 / (2 tau)   braking over time
    tau * dt = I_f w_f                           average braking torque

A finite braking time deflects the launch angle downward, which is how the
hopper reaches 45 degrees on uphill slopes.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

from .errors import GeometryError, OverBrakedError, ValidationError

# Warn when the average braking torque is within this factor of the gravity
# torque, where dropping the gravity term from the pivot dynamics (and with
# it the closed-form deflection) stops being accurate.
TORQUE_APPROX_FACTOR = 100.0


@dataclass(frozen=True)
class HopperConfig:
    """Geometry and inertia of the cubic rover."""

    half_spike_angle_alpha: float  # degrees
    spike_length_l: float  # m
    platform_mass_mp: float  # kg
    platform_inertia_Ip: float  # kg m^2
    flywheel_inertia_If: float  # kg m^2
    flywheel_mass_mf: float  # kg

    def __post_init__(self):
        for name in (
            "half_spike_angle_alpha",
            "spike_length_l",
            "platform_mass_mp",
            "platform_inertia_Ip",
            "flywheel_inertia_If",
            "flywheel_mass_mf",
        ):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValidationError(f"hopper parameter {name} must be strictly positive")
        if not self.half_spike_angle_alpha < 90.0:
            raise ValidationError("half_spike_angle_alpha must lie in (0, 90) degrees")
        if not self.flywheel_inertia_If < self.platform_inertia_Ip:
            raise ValidationError("flywheel inertia must be smaller than platform inertia")


@dataclass(frozen=True)
class Environment:
    """Target-body surface conditions."""

    gravity_g: float  # m/s^2
    slope_beta: float  # degrees, positive uphill
    escape_velocity: float  # m/s

    def __post_init__(self):
        if not (math.isfinite(self.gravity_g) and self.gravity_g > 0.0):
            raise ValidationError("gravity_g must be strictly positive")
        if not -90.0 <= self.slope_beta <= 90.0:
            raise ValidationError("slope_beta must lie in [-90, 90] degrees")
        if not (self.escape_velocity > 0.0):
            raise ValidationError("escape_velocity must be strictly positive")

    def with_slope(self, slope_beta: float) -> "Environment":
        return replace(self, slope_beta=slope_beta)


@dataclass(frozen=True)
class LaunchState:
    """Ballistic initial condition: speed (m/s) and angle above horizontal (degrees)."""

    speed_vh: float
    angle_theta_h: float

    def __post_init__(self):
        if self.speed_vh < 0.0:
            raise ValidationError("launch speed must be non-negative")


def min_torque(cfg: HopperConfig, env: Environment) -> float:
    """Smallest flywheel torque that starts tipping the resting cube."""
    total = cfg.half_spike_angle_alpha + env.slope_beta
    if total >= 180.0:
        raise GeometryError("spike angle plus slope leaves no upright rest pose")
    return cfg.platform_mass_mp * env.gravity_g * cfg.spike_length_l * math.sin(math.radians(total))


def energy_ratio(cfg: HopperConfig) -> float:
    """Fraction of flywheel momentum transferred to the platform pivot."""
    return cfg.flywheel_inertia_If / (
        cfg.platform_inertia_Ip + cfg.platform_mass_mp * cfg.spike_length_l**2
    )


def hop_velocity(cfg: HopperConfig, omega_f: float) -> float:
    """Launch speed produced by stopping the flywheel from omega_f (rad/s)."""
    if omega_f < 0.0:
        raise ValidationError("omega_f must be non-negative")
    return energy_ratio(cfg) * cfg.spike_length_l * omega_f


def launch_angle_instant(cfg: HopperConfig, env: Environment) -> float:
    """Launch angle in degrees for an instantaneous flywheel stop."""
    angle = cfg.half_spike_angle_alpha + env.slope_beta
    if not 0.0 < angle < 90.0:
        raise GeometryError(f"launch angle {angle:.1f} deg is outside (0, 90): no ballistic hop")
    return angle


def launch_deflection(cfg: HopperConfig, omega_f: float, delta_t: float) -> float:
    """Angle in degrees by which braking over delta_t lowers the launch angle.

    Equals eta * omega_f * delta_t / 2, the closed form obtained by
    substituting the average torque I_f omega_f / delta_t into the
    torque-deflection relation.
    """
    return math.degrees(0.5 * energy_ratio(cfg) * omega_f * delta_t)


def launch_angle_braked(
    cfg: HopperConfig, env: Environment, omega_f: float, brake_torque: float
) -> float:
    """Launch angle in degrees when the flywheel is braked at constant torque."""
    if not (brake_torque > 0.0):
        raise ValidationError("brake_torque must be positive")
    geometric = cfg.half_spike_angle_alpha + env.slope_beta
    gravity_torque = (
        cfg.platform_mass_mp * env.gravity_g * cfg.spike_length_l * math.sin(math.radians(geometric))
    )
    if brake_torque < TORQUE_APPROX_FACTOR * gravity_torque:
        warnings.warn(
            "brake torque is not far above the gravity torque; "
            "the constant-torque deflection approximation degrades",
            stacklevel=2,
        )
    deflection = math.degrees(
        energy_ratio(cfg) * cfg.flywheel_inertia_If * omega_f**2 / (2.0 * brake_torque)
    )
    if deflection >= geometric:
        raise OverBrakedError(
            f"deflection {deflection:.2f} deg cancels the geometric angle {geometric:.2f} deg"
        )
    return geometric - deflection


def brake_torque_from_time(cfg: HopperConfig, omega_f: float, delta_t: float) -> float:
    """Average braking torque delivering the flywheel momentum in delta_t.

    delta_t = 0 denotes an instantaneous stop and returns infinity as the
    sentinel; callers take the instant-brake launch-angle path.
    """
    if delta_t < 0.0:
        raise ValidationError("delta_t must be non-negative")
    if delta_t == 0.0:
        return math.inf
    return cfg.flywheel_inertia_If * omega_f / delta_t


def hop_distance(launch: LaunchState, env: Environment) -> float:
    """Projectile range over a flat landing plane."""
    if not 0.0 < launch.angle_theta_h < 90.0:
        raise GeometryError("launch angle must lie in (0, 90) degrees")
    return launch.speed_vh**2 * math.sin(math.radians(2.0 * launch.angle_theta_h)) / env.gravity_g


def flywheel_speed_instant(distance: float, cfg: HopperConfig, env: Environment) -> float:
    """Flywheel speed (rad/s) covering `distance` with an instantaneous stop."""
    if distance < 0.0:
        raise ValidationError("distance must be non-negative")
    total = cfg.half_spike_angle_alpha + env.slope_beta
    if not 0.0 < total < 90.0:
        raise GeometryError(f"launch angle {total:.1f} deg admits no instant-brake solution")
    eta = energy_ratio(cfg)
    return math.sqrt(
        distance
        * env.gravity_g
        / (eta**2 * cfg.spike_length_l**2 * math.sin(math.radians(2.0 * total)))
    )


def leverage_acceleration(
    cfg: HopperConfig,
    env: Environment,
    theta: float,
    tau: float,
    approximate: bool = False,
) -> float:
    """Angular acceleration of the pivoting platform at angle theta (degrees).

    The exact form keeps the gravity torque m_p g l sin(theta); the
    approximate form drops it, valid while the braking torque dominates.
    """
    pivot_inertia = cfg.platform_inertia_Ip + cfg.platform_mass_mp * cfg.spike_length_l**2
    if approximate:
        return -tau / pivot_inertia
    gravity = (
        cfg.platform_mass_mp * env.gravity_g * cfg.spike_length_l * math.sin(math.radians(theta))
    )
    return (gravity - tau) / pivot_inertia
