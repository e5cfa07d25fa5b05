"""Command-line front end for planning, braking, jumping and missions.

Every command reads one scenario file (or the packaged Itokawa default),
writes CSV/JSON artifacts into the output directory and prints a short
summary.  Outputs are fully determined by (config, seed, arguments).

Exit codes: 0 success, 2 validation error, 3 escape-velocity violation,
4 solver non-convergence, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import ballistics, control, motor, planner
from .config import CONFIG_ENV_VAR, RunConfig, load_config
from .errors import (
    EscapeVelocityError,
    HopperSimError,
    NonConvergenceError,
    ValidationError,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_ESCAPE = 3
EXIT_NONCONVERGENCE = 4
EXIT_IO = 5

TABLE_DISTANCES = (5.0, 10.0, 30.0, 50.0, 70.0, 100.0)
TABLE_SLOPES = tuple(float(b) for b in range(-30, 35, 5))


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config or os.environ.get(CONFIG_ENV_VAR))
        out_dir = Path(args.out if args.out is not None else config.output_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        seed = args.seed if args.seed is not None else config.seed
        args.handler(args, config, out_dir, seed)
        return EXIT_OK
    except EscapeVelocityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ESCAPE
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (ValidationError, HopperSimError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hoppersim",
        description="Plan and simulate flywheel-actuated hops on low-gravity bodies.",
    )
    parser.add_argument("--config", help=f"scenario file (default: ${CONFIG_ENV_VAR} or built-in)")
    parser.add_argument("--out", help="output directory (default: from config)")
    parser.add_argument("--seed", type=int, help="random seed override")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="solve one hop maneuver")
    p.add_argument("--d", type=float, required=True, help="target distance, m")
    p.add_argument("--beta", type=float, help="surface slope, degrees")
    p.set_defaults(handler=cmd_plan)

    p = sub.add_parser("brake", help="simulate controlled flywheel braking")
    p.add_argument("--omega", type=float, required=True, help="initial flywheel speed, rad/s")
    p.add_argument("--delta-t", type=float, required=True, help="commanded braking time, s")
    p.set_defaults(handler=cmd_brake)

    p = sub.add_parser("jump", help="Monte-Carlo jump repetitions and statistics")
    p.add_argument("--d", type=float, required=True, help="target distance, m")
    p.add_argument("--beta", type=float, help="surface slope, degrees")
    p.add_argument("--reps", type=int, default=14, help="number of repetitions")
    p.set_defaults(handler=cmd_jump)

    p = sub.add_parser("sweep", help="hop range versus braking torque")
    p.add_argument("--omega", type=float, required=True, help="flywheel speed, rad/s")
    p.add_argument("--beta", type=float, help="surface slope, degrees")
    p.add_argument("--tau-min", type=float, default=1e-2, help="lowest torque, N m")
    p.add_argument("--tau-max", type=float, default=1e1, help="highest torque, N m")
    p.add_argument("--points", type=int, default=200, help="sweep samples")
    p.set_defaults(handler=cmd_sweep)

    p = sub.add_parser("mission", help="multi-hop traverse with replanning")
    p.add_argument("--total", type=float, required=True, help="total distance, m")
    p.add_argument("--tol", type=float, required=True, help="landing tolerance, m")
    p.add_argument("--beta", type=float, help="surface slope, degrees")
    p.add_argument("--max-hop", type=float, default=100.0, help="longest single hop, m")
    p.set_defaults(handler=cmd_mission)

    p = sub.add_parser("tables", help="maneuver parameter grid over distances")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--beta", type=float, help="single surface slope, degrees")
    group.add_argument("--all-slopes", action="store_true", help="grid over -30..30 deg in 5 deg steps")
    p.set_defaults(handler=cmd_tables)

    return parser


def _env_for(args, config: RunConfig):
    if getattr(args, "beta", None) is not None:
        return config.env.with_slope(args.beta)
    return config.env


def cmd_plan(args, config: RunConfig, out_dir: Path, seed: int) -> None:
    env = _env_for(args, config)
    plan = planner.plan_jump(args.d, config.hopper, env)
    path = out_dir / "plan.json"
    with open(path, "w", encoding="utf-8") as stream:
        planner.write_plan_json(plan, stream)
    print(f"plan written to {path}")
    print(
        f"d = {plan.target_distance:.4g} m  beta = {env.slope_beta:.4g} deg  "
        f"omega_f = {plan.omega_f:.4g} rad/s  delta_t = {plan.delta_t:.4g} s"
    )
    print(
        f"launch: {plan.launch_speed * 100:.4g} cm/s at {plan.launch_angle:.4g} deg  "
        f"spin-up {plan.speedup_time:.4g} s  flight {plan.fly_time:.4g} s"
    )


def _designed_controller(config: RunConfig):
    continuous = motor.build_continuous(config.motor)
    discrete = motor.discretize(continuous, config.sample_time)
    gains = control.design_brake_controller(discrete, config.controller)
    return discrete, gains


def cmd_brake(args, config: RunConfig, out_dir: Path, seed: int) -> None:
    discrete, gains = _designed_controller(config)
    if args.omega == 0.0:
        print("zero initial speed: empty maneuver")
        response = control.BrakeResponse(
            np.zeros(1), np.zeros(1), np.zeros(1), achieved_delta_t=0.0, initial_omega=0.0
        )
    else:
        response = control.simulate_brake(
            discrete,
            gains,
            args.omega,
            args.delta_t,
            supply_voltage=config.supply_voltage,
        )
    csv_path = out_dir / "brake.csv"
    with open(csv_path, "w", encoding="utf-8") as stream:
        response.write_csv(stream)
    design_path = out_dir / "brake_design.txt"
    with open(design_path, "w", encoding="utf-8") as stream:
        stream.write(control.controller_summary(gains, discrete, config.controller))
    print(f"time series written to {csv_path}; design summary to {design_path}")
    print(
        f"commanded delta_t = {args.delta_t:.4g} s  achieved = {response.achieved_delta_t:.4g} s  "
        f"final omega = {response.omega[-1]:.4g} rad/s"
    )


def cmd_jump(args, config: RunConfig, out_dir: Path, seed: int) -> None:
    if args.reps < 1:
        raise ValidationError("--reps must be at least 1")
    env = _env_for(args, config)
    plan = planner.plan_jump(args.d, config.hopper, env)
    rng = np.random.default_rng(seed)
    outcomes = ballistics.monte_carlo_outcomes(
        plan.target_distance,
        plan.omega_f,
        plan.delta_t,
        config.hopper,
        env,
        args.reps,
        rng,
    )
    stats = ballistics.aggregate(outcomes)
    outcomes_path = out_dir / "jump_outcomes.csv"
    with open(outcomes_path, "w", encoding="utf-8") as stream:
        ballistics.write_outcomes_csv(outcomes, stream)
    stats_path = out_dir / "jump_stats.csv"
    with open(stats_path, "w", encoding="utf-8") as stream:
        ballistics.write_stats_csv([stats], stream)
    print(f"outcomes written to {outcomes_path}; stats to {stats_path}")
    print(
        f"target {stats.target:.4g} m: mean {stats.mean_distance:.4g} m  "
        f"std {stats.std_deviation:.4g} m  error {stats.relative_error_pct:.4g}%"
    )


def cmd_sweep(args, config: RunConfig, out_dir: Path, seed: int) -> None:
    env = _env_for(args, config)
    sweep = planner.sweep_brake_torque(
        config.hopper, env, args.omega, torque_range=(args.tau_min, args.tau_max), points=args.points
    )
    path = out_dir / "sweep.csv"
    with open(path, "w", encoding="utf-8") as stream:
        planner.write_sweep_csv(sweep, stream)
    print(f"sweep written to {path}")
    print(
        f"max distance {sweep.max_distance:.4g} m at tau = {sweep.argmax_torque:.4g} N m "
        f"(theta = {sweep.argmax_angle:.4g} deg)"
    )


def cmd_mission(args, config: RunConfig, out_dir: Path, seed: int) -> None:
    env = _env_for(args, config)
    rng = np.random.default_rng(seed)
    perturbation = ballistics.PerturbationModel()

    def execute(plan, hop_env, index):
        omega, delta_t = perturbation.sample(rng, plan.omega_f, plan.delta_t)
        outcome = ballistics.replay_realization(
            omega, delta_t, config.hopper, hop_env, plan.target_distance
        )
        return outcome.realized

    mission = planner.plan_mission(args.total, args.tol, config.hopper, env, args.max_hop)
    result = planner.run_mission(
        args.total, args.tol, config.hopper, env, execute, max_hop=args.max_hop
    )
    json_path = out_dir / "mission.json"
    with open(json_path, "w", encoding="utf-8") as stream:
        json.dump(planner.mission_document(mission, result), stream, indent=2)
        stream.write("\n")
    csv_path = out_dir / "mission_hops.csv"
    with open(csv_path, "w", encoding="utf-8") as stream:
        stream.write("hop,target_m,realized_m,direction,cumulative_m\n")
        cumulative = 0.0
        for index, hop in enumerate(result.hops):
            cumulative += hop.direction * hop.realized_distance
            stream.write(
                f"{index},{hop.plan.target_distance!r},{hop.realized_distance!r},"
                f"{hop.direction},{cumulative!r}\n"
            )
    print(f"mission written to {json_path}; hop log to {csv_path}")
    print(
        f"{len(result.hops)} hops, final position {result.final_position:.4g} m "
        f"of {result.total_target:.4g} m (error {result.relative_error_pct:.4g}%)"
    )


def cmd_tables(args, config: RunConfig, out_dir: Path, seed: int) -> None:
    if args.all_slopes:
        slopes = TABLE_SLOPES
    elif args.beta is not None:
        slopes = (args.beta,)
    else:
        slopes = (config.env.slope_beta,)
    path = out_dir / "tables.csv"
    with open(path, "w", encoding="utf-8") as stream:
        stream.write(
            "beta_deg,target_m,omega_f_rad_s,speedup_time_s,delta_t_s,"
            "launch_speed_m_s,launch_angle_deg,fly_time_s,escape_ok\n"
        )
        for beta in slopes:
            env = config.env.with_slope(beta)
            limit = planner.DEFAULT_SAFETY_FACTOR * env.escape_velocity
            for distance in TABLE_DISTANCES:
                plan = planner.plan_jump(distance, config.hopper, env, enforce_escape=False)
                stream.write(
                    f"{beta!r},{distance!r},{plan.omega_f!r},{plan.speedup_time!r},"
                    f"{plan.delta_t!r},{plan.launch_speed!r},{plan.launch_angle!r},"
                    f"{plan.fly_time!r},{plan.launch_speed < limit}\n"
                )
    print(f"tables written to {path} ({len(slopes)} slope(s) x {len(TABLE_DISTANCES)} distances)")


if __name__ == "__main__":
    raise SystemExit(main())
