"""Planning and simulation toolkit for flywheel-actuated hopping rovers."""

from .ballistics import (
    JumpOutcome,
    LandingStats,
    PerturbationModel,
    Trajectory,
    aggregate,
    monte_carlo_outcomes,
    replay_brake,
    replay_realization,
    simulate_flight,
)
from .config import RunConfig, load_config, load_environment, load_hopper_config, load_motor_params
from .control import (
    BrakeResponse,
    ControllerGains,
    DesignSpec,
    ackermann,
    design_brake_controller,
    feedforward_gain,
    poles_from_spec,
    relative_error,
    simulate_brake,
)
from .errors import (
    DegenerateDesignError,
    DegenerateSlopeError,
    EscapeVelocityError,
    GeometryError,
    HopperSimError,
    NonConvergenceError,
    NumericError,
    OverBrakedError,
    UncontrollableSystemError,
    ValidationError,
)
from .hopdyn import (
    Environment,
    HopperConfig,
    LaunchState,
    brake_torque_from_time,
    energy_ratio,
    flywheel_speed_instant,
    hop_distance,
    hop_velocity,
    launch_angle_braked,
    launch_angle_instant,
    launch_deflection,
    leverage_acceleration,
    min_torque,
)
from .motor import (
    LinearStateModel,
    MotorParams,
    MotorState,
    build_continuous,
    dc_gain,
    discretize,
    step_continuous,
    transfer_function,
)
from .planner import (
    HopResult,
    JumpPlan,
    MissionPlan,
    MissionResult,
    TorqueSweep,
    max_safe_distance,
    plan_jump,
    plan_mission,
    run_mission,
    sweep_brake_torque,
)

__version__ = "0.1.0"
