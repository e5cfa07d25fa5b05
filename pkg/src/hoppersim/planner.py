"""Inverse maneuver planning: from target distance to flywheel commands.

Given a target hop distance and the surface slope, the planner solves for
the flywheel speed and braking time in closed form.  Range is maximized at
a 45 degree launch angle, so on uphill slopes the planner brakes over a
finite time to deflect the geometric angle (alpha + beta) down to 45; on
flat or downhill slopes no deflection can raise the angle, so the plan is
an instantaneous stop at the geometric angle.  A configurable safety
margin on the body's escape velocity rejects plans that would fly off.

Multi-hop missions split long traverses into hops no longer than a chosen
maximum and, when replanning is enabled, re-target every remaining hop
from the realized landing positions.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateSlopeError, EscapeVelocityError, ValidationError
from .hopdyn import (
    Environment,
    HopperConfig,
    LaunchState,
    brake_torque_from_time,
    energy_ratio,
    hop_distance,
    min_torque,
)

BEST_LAUNCH_ANGLE = 45.0  # degrees; maximizes sin(2 theta)

DEFAULT_SAFETY_FACTOR = 0.9
DEFAULT_DISTANCE_CAP = 1e4  # m; reported when escape velocity is unbounded


@dataclass(frozen=True)
class JumpPlan:
    """Solved single-hop maneuver."""

    target_distance: float  # m
    omega_f: float  # rad/s
    delta_t: float  # s
    brake_torque: float | None  # N m; None for an instantaneous stop
    launch_angle: float  # degrees
    launch_speed: float  # m/s
    speedup_time: float  # s
    fly_time: float  # s
    predicted_distance: float  # m

    def to_document(self) -> dict:
        """JSON-shaped plan document, SI units plus degrees."""
        return {
            "target_distance_m": self.target_distance,
            "omega_f_rad_s": self.omega_f,
            "delta_t_s": self.delta_t,
            "brake_torque_Nm": self.brake_torque,
            "launch_angle_deg": self.launch_angle,
            "launch_speed_m_s": self.launch_speed,
            "speedup_time_s": self.speedup_time,
            "fly_time_s": self.fly_time,
            "predicted_distance_m": self.predicted_distance,
        }


@dataclass(frozen=True)
class MissionPlan:
    """Static multi-hop split of a long traverse."""

    total_distance: float  # m
    tolerance: float  # m
    hops: tuple[JumpPlan, ...]
    replan_after_each_landing: bool = True

    def to_document(self) -> dict:
        return {
            "total_distance_m": self.total_distance,
            "tolerance_m": self.tolerance,
            "replan_after_each_landing": self.replan_after_each_landing,
            "hops": [hop.to_document() for hop in self.hops],
        }


@dataclass(frozen=True)
class HopResult:
    """One executed hop of a mission: the plan and the realized distance."""

    plan: JumpPlan
    realized_distance: float  # m, magnitude along the hop direction
    direction: int  # +1 toward the goal, -1 back toward it after overshoot


@dataclass(frozen=True)
class MissionResult:
    """Outcome of executing a mission with replanning."""

    total_target: float
    tolerance: float
    hops: tuple[HopResult, ...]
    final_position: float
    within_tolerance: bool

    @property
    def residual(self) -> float:
        return self.total_target - self.final_position

    @property
    def relative_error_pct(self) -> float:
        return abs(self.residual) / abs(self.total_target) * 100.0


def plan_jump(
    target_distance: float,
    cfg: HopperConfig,
    env: Environment,
    spin_fraction: float = 1.0,
    safety_factor: float = DEFAULT_SAFETY_FACTOR,
    enforce_escape: bool = True,
) -> JumpPlan:
    """Solve the maneuver reaching target_distance on the given slope.

    Uphill (geometric angle above 45 deg) the braking time deflects the
    launch to exactly 45 deg; otherwise the stop is instantaneous at the
    geometric angle.  spin_fraction scales the spin-up torque as a fraction
    of the tipping threshold (it must not exceed 1, or the rover would tip
    during spin-up).

    Raises EscapeVelocityError when the required launch speed reaches
    safety_factor * escape velocity, and DegenerateSlopeError when the
    slope cancels the spike geometry.
    """
    if not (target_distance > 0.0 and math.isfinite(target_distance)):
        raise ValidationError(f"target distance must be positive, got {target_distance!r}")
    if not 0.0 < spin_fraction <= 1.0:
        raise ValidationError("spin_fraction must lie in (0, 1]")
    geometric = cfg.half_spike_angle_alpha + env.slope_beta
    if geometric <= 0.0:
        raise DegenerateSlopeError(
            f"slope {env.slope_beta} deg cancels the spike half-angle; no launch possible"
        )
    theta = min(BEST_LAUNCH_ANGLE, geometric)
    theta_rad = math.radians(theta)
    launch_speed = math.sqrt(target_distance * env.gravity_g / math.sin(2.0 * theta_rad))
    if enforce_escape:
        limit = safety_factor * env.escape_velocity
        if launch_speed >= limit:
            safe = max_safe_distance(cfg, env, safety_factor=safety_factor)
            raise EscapeVelocityError(
                f"launch speed {launch_speed:.4g} m/s reaches {safety_factor:g} of escape "
                f"velocity; largest safe distance is {safe:.4g} m",
                max_safe_distance=safe,
            )
    eta = energy_ratio(cfg)
    omega_f = launch_speed / (eta * cfg.spike_length_l)
    deflection = geometric - theta
    if deflection > 0.0:
        delta_t = 2.0 * math.radians(deflection) / (eta * omega_f)
        brake_torque = brake_torque_from_time(cfg, omega_f, delta_t)
    else:
        delta_t = 0.0
        brake_torque = None
    speedup_time = cfg.flywheel_inertia_If * omega_f / (spin_fraction * min_torque(cfg, env))
    fly_time = 2.0 * launch_speed * math.sin(theta_rad) / env.gravity_g
    predicted = hop_distance(LaunchState(launch_speed, theta), env)
    return JumpPlan(
        target_distance=target_distance,
        omega_f=omega_f,
        delta_t=delta_t,
        brake_torque=brake_torque,
        launch_angle=theta,
        launch_speed=launch_speed,
        speedup_time=speedup_time,
        fly_time=fly_time,
        predicted_distance=predicted,
    )


def max_safe_distance(
    cfg: HopperConfig,
    env: Environment,
    safety_factor: float = DEFAULT_SAFETY_FACTOR,
    distance_cap: float = DEFAULT_DISTANCE_CAP,
) -> float:
    """Largest plannable distance whose launch speed stays under the guard."""
    geometric = cfg.half_spike_angle_alpha + env.slope_beta
    if geometric <= 0.0:
        raise DegenerateSlopeError("slope cancels the spike half-angle")
    theta = min(BEST_LAUNCH_ANGLE, geometric)
    v_max = safety_factor * env.escape_velocity
    if not math.isfinite(v_max):
        return distance_cap
    d = v_max**2 * math.sin(math.radians(2.0 * theta)) / env.gravity_g
    return min(d, distance_cap)


def plan_mission(
    total_distance: float,
    tolerance: float,
    cfg: HopperConfig,
    env: Environment,
    max_hop: float,
    replan_after_each_landing: bool = True,
    spin_fraction: float = 1.0,
    safety_factor: float = DEFAULT_SAFETY_FACTOR,
) -> MissionPlan:
    """Greedy split of a long traverse into hops of at most max_hop meters."""
    if not (total_distance > 0.0):
        raise ValidationError("total_distance must be positive")
    if not (tolerance > 0.0):
        raise ValidationError("tolerance must be positive")
    if not (0.0 < max_hop <= max_safe_distance(cfg, env, safety_factor=safety_factor)):
        raise ValidationError("max_hop must be positive and within the escape-safe distance")
    targets = split_targets(total_distance, max_hop)
    hops = tuple(
        plan_jump(t, cfg, env, spin_fraction=spin_fraction, safety_factor=safety_factor)
        for t in targets
    )
    return MissionPlan(total_distance, tolerance, hops, replan_after_each_landing)


def run_mission(
    total_distance: float,
    tolerance: float,
    cfg: HopperConfig,
    env: Environment,
    execute_hop: Callable[[JumpPlan, Environment, int], float],
    max_hop: float,
    max_hops: int = 16,
    spin_fraction: float = 1.0,
    safety_factor: float = DEFAULT_SAFETY_FACTOR,
) -> MissionResult:
    """Execute a mission, re-targeting every hop from the realized position.

    execute_hop(plan, hop_env, index) performs one hop and returns the
    realized distance along the hop direction; the loop keeps hopping
    (backwards after an overshoot, with the slope sign flipped) until the
    residual is within tolerance or max_hops is exhausted, which only warns.
    """
    if not (total_distance > 0.0):
        raise ValidationError("total_distance must be positive")
    if not (tolerance > 0.0):
        raise ValidationError("tolerance must be positive")
    position = 0.0
    results: list[HopResult] = []
    for index in range(max_hops):
        residual = total_distance - position
        if abs(residual) <= tolerance:
            break
        direction = 1 if residual > 0 else -1
        hop_env = env if direction > 0 else env.with_slope(-env.slope_beta)
        target = min(abs(residual), max_hop)
        plan = plan_jump(
            target, cfg, hop_env, spin_fraction=spin_fraction, safety_factor=safety_factor
        )
        realized = execute_hop(plan, hop_env, index)
        position += direction * realized
        results.append(HopResult(plan, realized, direction))
    final_residual = total_distance - position
    within = abs(final_residual) <= tolerance
    if not within:
        warnings.warn(
            f"mission stopped after {len(results)} hops with residual "
            f"{final_residual:.3g} m above the {tolerance:.3g} m tolerance",
            stacklevel=2,
        )
    return MissionResult(total_distance, tolerance, tuple(results), position, within)


@dataclass(frozen=True, eq=False)
class TorqueSweep:
    """Launch angle and range as functions of the average braking torque."""

    torques: np.ndarray  # N m, ascending
    angles: np.ndarray  # degrees (non-ballistic samples keep their raw value)
    distances: np.ndarray  # m (zero where no ballistic hop exists)
    argmax_torque: float
    max_distance: float
    argmax_angle: float


def sweep_brake_torque(
    cfg: HopperConfig,
    env: Environment,
    omega_f: float,
    torque_range: tuple[float, float] = (1e-2, 1e1),
    points: int = 200,
) -> TorqueSweep:
    """Log-spaced sweep of hop range versus average braking torque.

    The launch speed is fixed by omega_f; only the launch angle varies with
    the torque, so the range peaks where the deflected angle crosses 45
    degrees.  Samples whose angle leaves (0, 90) score zero distance.
    """
    lo, hi = torque_range
    if not (0.0 < lo < hi):
        raise ValidationError("torque_range must be positive and increasing")
    if points < 2:
        raise ValidationError("at least two sweep points are required")
    if omega_f <= 0.0:
        raise ValidationError("omega_f must be positive")
    taus = np.geomspace(lo, hi, points)
    eta = energy_ratio(cfg)
    geometric = cfg.half_spike_angle_alpha + env.slope_beta
    deflection = np.degrees(eta * cfg.flywheel_inertia_If * omega_f**2 / (2.0 * taus))
    angles = geometric - deflection
    speed = eta * cfg.spike_length_l * omega_f
    valid = (angles > 0.0) & (angles < 90.0)
    distances = np.where(
        valid, speed**2 * np.sin(np.radians(2.0 * angles)) / env.gravity_g, 0.0
    )
    best = int(np.argmax(distances))
    return TorqueSweep(
        torques=taus,
        angles=angles,
        distances=distances,
        argmax_torque=float(taus[best]),
        max_distance=float(distances[best]),
        argmax_angle=float(angles[best]),
    )


def write_sweep_csv(sweep: TorqueSweep, stream) -> None:
    stream.write(
        f"# argmax: tau_Nm={sweep.argmax_torque!r} d_m={sweep.max_distance!r} "
        f"theta_deg={sweep.argmax_angle!r}\n"
    )
    stream.write("tau_Nm,theta_deg,d_m\n")
    for tau, theta, d in zip(sweep.torques, sweep.angles, sweep.distances):
        stream.write(f"{float(tau)!r},{float(theta)!r},{float(d)!r}\n")


def write_plan_json(plan: JumpPlan, stream) -> None:
    json.dump(plan.to_document(), stream, indent=2)
    stream.write("\n")


def mission_document(plan: MissionPlan, result: MissionResult | None = None) -> dict:
    doc = plan.to_document()
    if result is not None:
        doc["executed_hops"] = [
            {
                "target_m": hop.plan.target_distance,
                "realized_m": hop.realized_distance,
                "direction": hop.direction,
            }
            for hop in result.hops
        ]
        doc["final_position_m"] = result.final_position
        doc["residual_m"] = result.residual
        doc["within_tolerance"] = result.within_tolerance
        doc["relative_error_pct"] = result.relative_error_pct
    return doc


def split_targets(total_distance: float, max_hop: float) -> Sequence[float]:
    """Greedy hop targets without planning each hop (introspection helper)."""
    targets: list[float] = []
    remaining = total_distance
    while remaining > 1e-12:
        hop = min(max_hop, remaining)
        targets.append(hop)
        remaining -= hop
    return targets
