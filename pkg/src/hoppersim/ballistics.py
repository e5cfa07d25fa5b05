"""Ballistic flight under uniform micro-gravity and jump replay scoring.

Flights are integrated with a fixed-step fourth-order scheme (exact for
drag-free parabolic motion) and the touchdown is located by linear
interpolation of the sign change in height.  A replay converts a realized
braking result (spin speed, braking time) into launch conditions through
the leverage relations and scores the landing against the planned target.
Monte-Carlo replays perturb the commanded values inside the spread
observed between commanded and measured braking runs on the bench
prototype, standing in for repeated hardware experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .control import BrakeResponse, relative_error
from .errors import GeometryError, ValidationError
from .hopdyn import Environment, HopperConfig, LaunchState, hop_velocity, launch_deflection

# Integration steps per flight; keeps the interpolated touchdown well below
# the 1e-6 relative agreement required against the closed-form range.
FLIGHT_STEPS = 2048

DEFAULT_TOLERANCE_FRACTION = 0.10


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled ballistic arc from liftoff to touchdown."""

    samples: np.ndarray  # (N, 3) columns t, x, y
    launch: LaunchState
    landing_distance: float  # m
    fly_time: float  # s

    @property
    def times(self) -> np.ndarray:
        return self.samples[:, 0]

    @property
    def x(self) -> np.ndarray:
        return self.samples[:, 1]

    @property
    def y(self) -> np.ndarray:
        return self.samples[:, 2]

    def write_csv(self, stream) -> None:
        stream.write("t_s,x_m,y_m\n")
        for t, x, y in self.samples:
            stream.write(f"{float(t)!r},{float(x)!r},{float(y)!r}\n")


@dataclass(frozen=True)
class JumpOutcome:
    """Score of one realized jump against its target."""

    target: float  # m
    realized: float  # m
    within_tolerance: bool
    relative_error_pct: float
    over_braked: bool = False


@dataclass(frozen=True)
class LandingStats:
    """Aggregate of repeated jumps at one target distance."""

    target: float  # m
    mean_distance: float  # m
    std_deviation: float  # m, population
    relative_error_pct: float  # of the mean


def simulate_flight(launch: LaunchState, env: Environment) -> Trajectory:
    """Integrate the drag-free flight from liftoff back to ground level."""
    if launch.speed_vh == 0.0:
        samples = np.zeros((1, 3))
        return Trajectory(samples, launch, 0.0, 0.0)
    if not 0.0 < launch.angle_theta_h < 90.0:
        raise GeometryError("launch angle must lie in (0, 90) degrees")
    g = env.gravity_g
    theta = math.radians(launch.angle_theta_h)
    vx = launch.speed_vh * math.cos(theta)
    vy = launch.speed_vh * math.sin(theta)
    est_fly_time = 2.0 * vy / g
    h = est_fly_time / FLIGHT_STEPS
    t, x, y = 0.0, 0.0, 0.0
    rows = [(t, x, y)]

    def derivative(state):
        _x, _y, s_vx, s_vy = state
        return s_vx, s_vy, 0.0, -g

    state = (x, y, vx, vy)
    for _ in range(2 * FLIGHT_STEPS):
        k1 = derivative(state)
        k2 = derivative(tuple(s + 0.5 * h * k for s, k in zip(state, k1)))
        k3 = derivative(tuple(s + 0.5 * h * k for s, k in zip(state, k2)))
        k4 = derivative(tuple(s + h * k for s, k in zip(state, k3)))
        new_state = tuple(
            s + h / 6.0 * (a + 2.0 * b + 2.0 * c + d)
            for s, a, b, c, d in zip(state, k1, k2, k3, k4)
        )
        t_new = t + h
        x_new, y_new = new_state[0], new_state[1]
        if y_new < 0.0:
            frac = y / (y - y_new)
            t_land = t + frac * (t_new - t)
            x_land = x + frac * (x_new - x)
            rows.append((t_land, x_land, 0.0))
            samples = np.array(rows)
            return Trajectory(samples, launch, x_land, t_land)
        t, x, y = t_new, x_new, y_new
        state = new_state
        rows.append((t, x, y))
    raise GeometryError("flight never returned to the surface")


def replay_realization(
    omega_f: float,
    delta_t: float,
    cfg: HopperConfig,
    env: Environment,
    target: float,
    tolerance_fraction: float = DEFAULT_TOLERANCE_FRACTION,
) -> JumpOutcome:
    """Score the jump produced by a realized (spin speed, braking time) pair."""
    if not (omega_f > 0.0):
        raise ValidationError("realized omega_f must be positive")
    if delta_t < 0.0:
        raise ValidationError("realized delta_t must be non-negative")
    if not (target > 0.0):
        raise ValidationError("target distance must be positive")
    geometric = cfg.half_spike_angle_alpha + env.slope_beta
    angle = geometric - launch_deflection(cfg, omega_f, delta_t)
    if angle <= 0.0:
        return JumpOutcome(target, 0.0, False, 100.0, over_braked=True)
    if angle >= 90.0:
        raise GeometryError(f"launch angle {angle:.1f} deg is not ballistic")
    speed = hop_velocity(cfg, omega_f)
    trajectory = simulate_flight(LaunchState(speed, angle), env)
    realized = trajectory.landing_distance
    return JumpOutcome(
        target=target,
        realized=realized,
        within_tolerance=abs(realized - target) <= tolerance_fraction * target,
        relative_error_pct=relative_error(target, realized),
    )


def replay_brake(
    response: BrakeResponse,
    cfg: HopperConfig,
    env: Environment,
    target: float,
    tolerance_fraction: float = DEFAULT_TOLERANCE_FRACTION,
) -> JumpOutcome:
    """Score the jump produced by a simulated or measured braking response."""
    return replay_realization(
        response.initial_omega,
        response.achieved_delta_t,
        cfg,
        env,
        target,
        tolerance_fraction=tolerance_fraction,
    )


def aggregate(outcomes: Sequence[JumpOutcome]) -> LandingStats:
    """Mean, population standard deviation, and error of the mean."""
    if not outcomes:
        raise ValidationError("cannot aggregate an empty outcome list")
    targets = {outcome.target for outcome in outcomes}
    if len(targets) != 1:
        raise ValidationError("outcomes mix different targets")
    target = outcomes[0].target
    realized = np.array([outcome.realized for outcome in outcomes])
    mean = float(np.mean(realized))
    std = float(np.std(realized))
    return LandingStats(target, mean, std, relative_error(target, mean))


@dataclass(frozen=True)
class PerturbationModel:
    """Commanded-vs-realized braking spread for Monte-Carlo replay.

    omega_fraction bounds the relative spin-speed deviation; braking-time
    deviations are absolute, with ramped stops jittered symmetrically and
    commanded instant stops realized as a short positive lapse (a physical
    wheel cannot stop in zero time).  Defaults envelope the deviations
    measured on the bench prototype in its trackable speed range.
    """

    omega_fraction: float = 0.043
    ramp_delta_t_abs: float = 0.12
    instant_delta_t_max: float = 0.16

    def sample(self, rng: np.random.Generator, omega_f: float, delta_t: float) -> tuple[float, float]:
        """One realized (omega_f, delta_t) pair; draws two variates always."""
        omega_jitter = rng.uniform(-self.omega_fraction, self.omega_fraction)
        time_jitter = rng.uniform(-1.0, 1.0)
        realized_omega = omega_f * (1.0 + omega_jitter)
        if delta_t > 0.0:
            realized_delta_t = max(0.0, delta_t + time_jitter * self.ramp_delta_t_abs)
        else:
            realized_delta_t = 0.5 * (time_jitter + 1.0) * self.instant_delta_t_max
        return realized_omega, realized_delta_t


def monte_carlo_outcomes(
    target: float,
    omega_f: float,
    delta_t: float,
    cfg: HopperConfig,
    env: Environment,
    repetitions: int,
    rng: np.random.Generator,
    perturbation: PerturbationModel | None = None,
    tolerance_fraction: float = DEFAULT_TOLERANCE_FRACTION,
) -> list[JumpOutcome]:
    """Replay a planned maneuver `repetitions` times under perturbation."""
    if repetitions < 1:
        raise ValidationError("repetitions must be at least 1")
    model = perturbation if perturbation is not None else PerturbationModel()
    outcomes = []
    for _ in range(repetitions):
        realized_omega, realized_delta_t = model.sample(rng, omega_f, delta_t)
        outcomes.append(
            replay_realization(
                realized_omega,
                realized_delta_t,
                cfg,
                env,
                target,
                tolerance_fraction=tolerance_fraction,
            )
        )
    return outcomes


def write_outcomes_csv(outcomes: Iterable[JumpOutcome], stream) -> None:
    stream.write("rep,target_m,realized_m,rel_err_pct,within_tolerance,over_braked\n")
    for index, outcome in enumerate(outcomes):
        stream.write(
            f"{index},{float(outcome.target)!r},{float(outcome.realized)!r},"
            f"{float(outcome.relative_error_pct)!r},{outcome.within_tolerance},{outcome.over_braked}\n"
        )


def write_stats_csv(stats: Iterable[LandingStats], stream) -> None:
    stream.write("target_m,mean_m,std_m,rel_err_pct\n")
    for row in stats:
        stream.write(
            f"{float(row.target)!r},{float(row.mean_distance)!r},"
            f"{float(row.std_deviation)!r},{float(row.relative_error_pct)!r}\n"
        )
