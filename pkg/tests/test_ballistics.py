"""Flight integration, replay scoring and Monte-Carlo statistics tests."""

import io
import math

import numpy as np
import pytest

from hoppersim.ballistics import (
    PerturbationModel,
    aggregate,
    monte_carlo_outcomes,
    replay_brake,
    replay_realization,
    simulate_flight,
    write_outcomes_csv,
    write_stats_csv,
)
from hoppersim.control import BrakeResponse
from hoppersim.errors import ValidationError
from hoppersim.hopdyn import Environment, HopperConfig, LaunchState
from hoppersim.planner import plan_jump

CUBE = HopperConfig(45.0, 0.071, 1.5, 2.5e-3, 3.42e-5, 0.076)
ITOKAWA = Environment(77e-6, 0.0, 0.1128)

REALIZED_RUNS = [
    # omega rad/s, delta_t s, beta deg, target m, reported landing m
    (62.83, 0.06, 0.0, 5.0, 3.00),
    (104.51, 0.86, 10.0, 10.0, 8.29),
    (195.3, 0.30, 5.0, 30.0, 28.96),
    (207.97, 1.31, 30.0, 30.0, 32.62),
    (260.02, 0.79, 20.0, 50.0, 51.35),
    (400.13, 0.16, -15.0, 100.0, 89.59),
]


def closed_form_range(speed, angle_deg, g):
    return speed**2 * math.sin(math.radians(2.0 * angle_deg)) / g


class TestSimulateFlight:
    def test_reference_flight(self):
        traj = simulate_flight(LaunchState(0.062, 45.0), ITOKAWA)
        assert traj.landing_distance == pytest.approx(49.92, rel=1e-3)
        assert traj.fly_time == pytest.approx(1139.0, rel=1e-2)

    def test_matches_closed_form(self):
        for speed, angle in [(0.02, 30.0), (0.062, 45.0), (0.0877, 60.0), (0.01, 80.0)]:
            traj = simulate_flight(LaunchState(speed, angle), ITOKAWA)
            expected_d = closed_form_range(speed, angle, ITOKAWA.gravity_g)
            expected_t = 2.0 * speed * math.sin(math.radians(angle)) / ITOKAWA.gravity_g
            assert traj.landing_distance == pytest.approx(expected_d, rel=1e-6)
            assert traj.fly_time == pytest.approx(expected_t, rel=1e-6)

    def test_degenerate_launch(self):
        traj = simulate_flight(LaunchState(0.0, 45.0), ITOKAWA)
        assert traj.samples.shape == (1, 3)
        assert traj.landing_distance == 0.0
        assert traj.fly_time == 0.0

    def test_starts_at_origin_and_stays_above_ground(self):
        traj = simulate_flight(LaunchState(0.05, 40.0), ITOKAWA)
        np.testing.assert_array_equal(traj.samples[0], [0.0, 0.0, 0.0])
        assert np.all(traj.y >= 0.0)
        assert traj.x[-1] == traj.landing_distance
        assert traj.samples.shape[0] >= 1000

    def test_energy_conserved(self):
        launch = LaunchState(0.0877, 45.0)
        traj = simulate_flight(launch, ITOKAWA)
        theta = math.radians(launch.angle_theta_h)
        vx = launch.speed_vh * math.cos(theta)
        vy0 = launch.speed_vh * math.sin(theta)
        g = ITOKAWA.gravity_g
        vy = vy0 - g * traj.times
        energy = 0.5 * (vx**2 + vy**2) + g * traj.y
        reference = 0.5 * launch.speed_vh**2
        assert np.max(np.abs(energy - reference)) <= 1e-9 * reference

    def test_ascent_descent_symmetry_and_apex(self):
        launch = LaunchState(0.062, 45.0)
        traj = simulate_flight(launch, ITOKAWA)
        g = ITOKAWA.gravity_g
        vy0 = launch.speed_vh * math.sin(math.radians(launch.angle_theta_h))
        apex_time = vy0 / g
        assert traj.fly_time == pytest.approx(2.0 * apex_time, rel=1e-6)
        assert np.max(traj.y) == pytest.approx(vy0**2 / (2.0 * g), rel=1e-6)


class TestReplay:
    @pytest.mark.parametrize("omega,delta_t,beta,target,reported", REALIZED_RUNS)
    def test_realized_runs(self, omega, delta_t, beta, target, reported):
        outcome = replay_realization(omega, delta_t, CUBE, ITOKAWA.with_slope(beta), target)
        assert outcome.realized == pytest.approx(reported, rel=0.025)
        assert not outcome.over_braked

    def test_reference_run_scores(self):
        outcome = replay_realization(260.02, 0.79, CUBE, ITOKAWA.with_slope(20.0), 50.0)
        assert outcome.realized == pytest.approx(51.14, rel=1e-3)
        assert outcome.within_tolerance
        assert outcome.relative_error_pct == pytest.approx(2.28, abs=0.05)

    def test_exact_plan_replay_has_zero_error(self):
        env = ITOKAWA.with_slope(20.0)
        plan = plan_jump(50.0, CUBE, env)
        outcome = replay_realization(plan.omega_f, plan.delta_t, CUBE, env, plan.target_distance)
        assert outcome.relative_error_pct < 1e-4
        assert outcome.within_tolerance

    def test_over_braked_flag(self):
        outcome = replay_realization(400.0, 3.0, CUBE, ITOKAWA, 50.0)
        assert outcome.over_braked
        assert outcome.realized == 0.0
        assert not outcome.within_tolerance

    def test_brake_response_adapter(self):
        response = BrakeResponse(
            times=np.array([0.0, 0.79]),
            omega=np.array([260.02, 0.0]),
            voltage=np.array([0.0, 0.0]),
            achieved_delta_t=0.79,
            initial_omega=260.02,
        )
        via_response = replay_brake(response, CUBE, ITOKAWA.with_slope(20.0), 50.0)
        direct = replay_realization(260.02, 0.79, CUBE, ITOKAWA.with_slope(20.0), 50.0)
        assert via_response == direct

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValidationError):
            replay_realization(0.0, 0.1, CUBE, ITOKAWA, 50.0)
        with pytest.raises(ValidationError):
            replay_realization(100.0, -0.1, CUBE, ITOKAWA, 50.0)
        with pytest.raises(ValidationError):
            replay_realization(100.0, 0.1, CUBE, ITOKAWA, 0.0)


class TestAggregate:
    def test_known_sample(self):
        outcomes = [
            replay_realization(w, 0.0, CUBE, ITOKAWA, 50.0) for w in (250.0, 257.0, 263.0)
        ]
        stats = aggregate(outcomes)
        realized = np.array([o.realized for o in outcomes])
        assert stats.mean_distance == pytest.approx(float(np.mean(realized)))
        assert stats.std_deviation == pytest.approx(float(np.std(realized)))
        assert stats.relative_error_pct == pytest.approx(
            abs(50.0 - np.mean(realized)) / 50.0 * 100.0
        )

    def test_single_outcome_has_zero_spread(self):
        stats = aggregate([replay_realization(257.0, 0.0, CUBE, ITOKAWA, 50.0)])
        assert stats.std_deviation == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            aggregate([])

    def test_mixed_targets_rejected(self):
        outcomes = [
            replay_realization(257.0, 0.0, CUBE, ITOKAWA, 50.0),
            replay_realization(100.0, 0.0, CUBE, ITOKAWA, 10.0),
        ]
        with pytest.raises(ValidationError):
            aggregate(outcomes)


class TestPerturbationModel:
    def test_bounds_respected(self):
        model = PerturbationModel()
        rng = np.random.default_rng(5)
        for _ in range(500):
            omega, delta_t = model.sample(rng, 300.0, 0.8)
            assert abs(omega / 300.0 - 1.0) <= model.omega_fraction
            assert 0.0 <= delta_t <= 0.8 + model.ramp_delta_t_abs

    def test_instant_commands_get_short_positive_lapse(self):
        model = PerturbationModel()
        rng = np.random.default_rng(6)
        lapses = [model.sample(rng, 300.0, 0.0)[1] for _ in range(500)]
        assert min(lapses) >= 0.0
        assert max(lapses) <= model.instant_delta_t_max
        assert max(lapses) > 0.0


class TestMonteCarlo:
    def test_deterministic_under_seed(self):
        env = ITOKAWA.with_slope(15.0)
        plan = plan_jump(50.0, CUBE, env)
        a = monte_carlo_outcomes(50.0, plan.omega_f, plan.delta_t, CUBE, env, 14, np.random.default_rng(9))
        b = monte_carlo_outcomes(50.0, plan.omega_f, plan.delta_t, CUBE, env, 14, np.random.default_rng(9))
        assert a == b

    def test_mean_near_target_for_long_hop(self):
        plan = plan_jump(50.0, CUBE, ITOKAWA)
        outcomes = monte_carlo_outcomes(
            50.0, plan.omega_f, plan.delta_t, CUBE, ITOKAWA, 14, np.random.default_rng(0)
        )
        stats = aggregate(outcomes)
        assert stats.relative_error_pct < 10.0

    def test_rejects_zero_reps(self):
        with pytest.raises(ValidationError):
            monte_carlo_outcomes(50.0, 250.0, 0.0, CUBE, ITOKAWA, 0, np.random.default_rng(0))


def test_csv_writers():
    outcomes = [replay_realization(257.0, 0.0, CUBE, ITOKAWA, 50.0)]
    stream = io.StringIO()
    write_outcomes_csv(outcomes, stream)
    lines = stream.getvalue().strip().splitlines()
    assert lines[0] == "rep,target_m,realized_m,rel_err_pct,within_tolerance,over_braked"
    assert len(lines) == 2

    stream = io.StringIO()
    write_stats_csv([aggregate(outcomes)], stream)
    lines = stream.getvalue().strip().splitlines()
    assert lines[0] == "target_m,mean_m,std_m,rel_err_pct"
    assert len(lines) == 2

    traj = simulate_flight(LaunchState(0.02, 45.0), ITOKAWA)
    stream = io.StringIO()
    traj.write_csv(stream)
    lines = stream.getvalue().strip().splitlines()
    assert lines[0] == "t_s,x_m,y_m"
    assert len(lines) == traj.samples.shape[0] + 1
