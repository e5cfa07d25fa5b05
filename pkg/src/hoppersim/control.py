"""State-feedback braking controller design and closed-loop simulation.

Flywheel braking is done electrically: the motor voltage is inverted under
closed-loop control so the wheel speed follows a reference that falls from
the spin speed to zero in a prescribed time.  The control law is

    u = -K x + G r

with K placed by Ackermann's formula from a second-order (overshoot,
settling time) specification and G chosen so the closed loop has unit DC
gain from reference to speed.  Design functions work on both continuous
and discrete models; the braking simulation runs on the discrete one.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDesignError,
    NonConvergenceError,
    UncontrollableSystemError,
    ValidationError,
)
from .motor import CONTINUOUS, DISCRETE, LinearStateModel

# Samples the speed must stay inside the stop band before the braking
# simulation declares the wheel stopped (debounces the threshold crossing).
STOP_DWELL_SAMPLES = 50


@dataclass(frozen=True)
class DesignSpec:
    """Closed-loop step-response targets: percent overshoot and settling time."""

    overshoot_pct: float = 0.0
    settling_time: float = 0.1

    def __post_init__(self):
        if not (0.0 <= self.overshoot_pct < 100.0):
            raise ValidationError("overshoot_pct must lie in [0, 100)")
        if not (self.settling_time > 0.0):
            raise ValidationError("settling_time must be positive")


@dataclass(frozen=True, eq=False)
class ControllerGains:
    """Feedback row vector K and feedforward scalar G for one model domain."""

    feedback_K: np.ndarray
    feedforward_G: float
    domain: str

    def __post_init__(self):
        K = np.array(self.feedback_K, dtype=float).reshape(1, 2)
        K.flags.writeable = False
        object.__setattr__(self, "feedback_K", K)
        if self.domain not in (CONTINUOUS, DISCRETE):
            raise ValidationError("gain domain must be continuous or discrete")


@dataclass(frozen=True, eq=False)
class BrakeResponse:
    """Time series of one braking maneuver at the controller sample time."""

    times: np.ndarray
    omega: np.ndarray
    voltage: np.ndarray
    achieved_delta_t: float
    initial_omega: float

    def write_csv(self, stream: io.TextIOBase) -> None:
        stream.write("time_s,omega_rad_s,voltage_V\n")
        for t, w, u in zip(self.times, self.omega, self.voltage):
            stream.write(f"{float(t)!r},{float(w)!r},{float(u)!r}\n")


def poles_from_spec(spec: DesignSpec) -> tuple[complex, complex]:
    """Continuous pole pair for a second-order response meeting the spec.

    Damping comes from inverting the overshoot relation
    OS = 100*exp(-pi*zeta/sqrt(1 - zeta^2)); critically damped (zeta = 1)
    is used for overshoot at or below 0.1%.  The natural frequency uses the
    2% settling criterion wn = 4/(zeta*St).
    """
    if spec.overshoot_pct <= 0.1:
        zeta = 1.0
    else:
        log_ratio = math.log(100.0 / spec.overshoot_pct)
        zeta = log_ratio / math.sqrt(math.pi**2 + log_ratio**2)
    wn = 4.0 / (zeta * spec.settling_time)
    if zeta >= 1.0:
        radical = wn * math.sqrt(max(zeta * zeta - 1.0, 0.0))
        return complex(-zeta * wn + radical), complex(-zeta * wn - radical)
    imag = wn * math.sqrt(1.0 - zeta * zeta)
    return complex(-zeta * wn, imag), complex(-zeta * wn, -imag)


def controllability_matrix(model: LinearStateModel) -> np.ndarray:
    B = model.input_matrix
    return np.hstack([B, model.system_matrix @ B])


def ackermann(model: LinearStateModel, desired_poles) -> np.ndarray:
    """Feedback row K placing the closed-loop eigenvalues at desired_poles.

    Poles are given in the model's own domain (s-plane for continuous,
    z-plane for discrete); complex poles must come as conjugate pairs.
    Unlike generic placement routines this handles repeated poles, which
    the critically damped braking design requires.
    """
    poles = np.atleast_1d(np.asarray(desired_poles, dtype=complex))
    if poles.shape != (2,):
        raise ValidationError("exactly two desired poles are required")
    ctrb = controllability_matrix(model)
    A = model.system_matrix
    det = ctrb[0, 0] * ctrb[1, 1] - ctrb[0, 1] * ctrb[1, 0]
    scale = np.linalg.norm(ctrb, np.inf) ** 2
    if abs(det) <= 1e-12 * max(scale, 1e-30):
        raise UncontrollableSystemError("controllability matrix is singular")
    coeffs = np.real(np.poly(poles))  # x^2 + c1 x + c0, real by conjugacy
    char_of_A = A @ A + coeffs[1] * A + coeffs[2] * np.eye(2)
    selector = np.linalg.solve(ctrb.T, np.array([0.0, 1.0]))
    return (selector @ char_of_A).reshape(1, 2)


def feedforward_gain(model: LinearStateModel, feedback_K: np.ndarray) -> float:
    """Reference scaling G that gives unit DC gain from reference to output.

    Continuous: G = (C (-A + B K)^-1 B)^-1.
    Discrete:   G = (H (I - Phi + Gamma K)^-1 Gamma)^-1.
    """
    K = np.asarray(feedback_K, dtype=float).reshape(1, 2)
    A, B, C = model.system_matrix, model.input_matrix, model.output_matrix
    if model.kind == CONTINUOUS:
        M = -A + B @ K
    else:
        M = np.eye(2) - A + B @ K
    try:
        inner = (C @ np.linalg.solve(M, B))[0, 0]
    except np.linalg.LinAlgError as exc:
        raise DegenerateDesignError("closed-loop DC map is singular") from exc
    if inner == 0.0 or not math.isfinite(inner):
        raise DegenerateDesignError("closed-loop DC gain is zero or non-finite")
    return 1.0 / inner


def design_brake_controller(model: LinearStateModel, spec: DesignSpec) -> ControllerGains:
    """Full design pipeline: spec -> poles -> Ackermann -> feedforward.

    For a discrete model the continuous poles are mapped through
    z = exp(s * T) before placement.
    """
    poles = poles_from_spec(spec)
    if model.kind == DISCRETE:
        poles = tuple(np.exp(p * model.sample_time) for p in poles)
    K = ackermann(model, poles)
    G = feedforward_gain(model, K)
    gains = ControllerGains(K, G, model.kind)
    closed = model.system_matrix - model.input_matrix @ gains.feedback_K
    eigs = np.linalg.eigvals(closed)
    stable = np.all(np.abs(eigs) < 1.0) if model.kind == DISCRETE else np.all(eigs.real < 0.0)
    if not stable:
        raise DegenerateDesignError(f"designed closed loop is unstable: eigenvalues {eigs}")
    return gains


def simulate_brake(
    model: LinearStateModel,
    gains: ControllerGains,
    initial_omega: float,
    target_delta_t: float,
    supply_voltage: float = 24.0,
    stop_threshold: float = 1.0,
    initial_current: float | None = None,
) -> BrakeResponse:
    """Simulate closed-loop braking of the flywheel from spin speed to rest.

    The reference ramps linearly from initial_omega to zero over
    target_delta_t (a step to zero when target_delta_t is 0) and the
    command is clamped to +/- supply_voltage.  The run ends once |omega|
    has stayed below stop_threshold for STOP_DWELL_SAMPLES consecutive
    samples; achieved_delta_t is the start of that dwell.

    Parameters
    ----------
    model : discrete LinearStateModel
    gains : ControllerGains in the discrete domain
    initial_omega : spin speed at brake onset, rad/s (>= 0)
    target_delta_t : commanded braking time, s (>= 0)
    supply_voltage : command saturation bound, V
    stop_threshold : |omega| band regarded as stopped, rad/s
    initial_current : armature current at onset; defaults to the
        steady-spin equilibrium so braking starts from a settled state.

    Raises
    ------
    NonConvergenceError
        if the wheel has not stopped within 10 * max(target_delta_t, 1 s);
        signals an infeasible braking demand.
    """
    if model.kind != DISCRETE:
        raise ValidationError("simulate_brake expects a discrete model")
    if gains.domain != DISCRETE:
        raise ValidationError("simulate_brake expects discrete-domain gains")
    if initial_omega < 0.0:
        raise ValidationError("initial_omega must be non-negative")
    if target_delta_t < 0.0:
        raise ValidationError("target_delta_t must be non-negative")
    if not (supply_voltage > 0.0):
        raise ValidationError("supply_voltage must be positive")

    dt = model.sample_time
    p11, p12 = model.system_matrix[0]
    p21, p22 = model.system_matrix[1]
    g1, g2 = model.input_matrix[:, 0]
    k1, k2 = gains.feedback_K[0]
    G = gains.feedforward_G

    if initial_current is None:
        current = _steady_spin_current(model, initial_omega)
    else:
        current = initial_current

    w = initial_omega
    times: list[float] = []
    omegas: list[float] = []
    voltages: list[float] = []
    dwell = 0
    dwell_start = 0.0
    max_steps = int(math.ceil(10.0 * max(target_delta_t, 1.0) / dt)) + 1
    for step in range(max_steps):
        t = step * dt
        if target_delta_t > 0.0:
            reference = initial_omega * max(0.0, 1.0 - t / target_delta_t)
        else:
            reference = 0.0
        u = -(k1 * w + k2 * current) + G * reference
        u = min(supply_voltage, max(-supply_voltage, u))
        times.append(t)
        omegas.append(w)
        voltages.append(u)
        if abs(w) < stop_threshold:
            if dwell == 0:
                dwell_start = t
            dwell += 1
            if dwell >= STOP_DWELL_SAMPLES:
                return BrakeResponse(
                    np.array(times), np.array(omegas), np.array(voltages), dwell_start, initial_omega
                )
        else:
            dwell = 0
        w, current = (
            p11 * w + p12 * current + g1 * u,
            p21 * w + p22 * current + g2 * u,
        )
    raise NonConvergenceError(
        f"wheel not stopped after {max_steps * dt:.2f} s; braking demand is infeasible"
    )


def _steady_spin_current(model: LinearStateModel, omega: float) -> float:
    """Current holding the wheel at constant omega under some constant voltage."""
    Phi, Gamma = model.system_matrix, model.input_matrix
    lhs = np.array([[Phi[0, 1], Gamma[0, 0]], [Phi[1, 1] - 1.0, Gamma[1, 0]]])
    rhs = np.array([-(Phi[0, 0] - 1.0) * omega, -Phi[1, 0] * omega])
    try:
        current, _voltage = np.linalg.solve(lhs, rhs)
    except np.linalg.LinAlgError:
        return 0.0
    return float(current)


def relative_error(expected: float, actual: float) -> float:
    """Percent deviation |expected - actual| / |expected| * 100."""
    if expected == 0.0:
        raise ValidationError("relative error is undefined for zero expected value")
    return abs(expected - actual) / abs(expected) * 100.0


def controller_summary(gains: ControllerGains, model: LinearStateModel, spec: DesignSpec) -> str:
    """Plain-text design summary (gains, poles, sample time)."""
    closed = model.system_matrix - model.input_matrix @ gains.feedback_K
    eigs = np.sort_complex(np.linalg.eigvals(closed))
    lines = [
        f"domain = {gains.domain}",
        f"feedback_K = [{gains.feedback_K[0, 0]:.6g}, {gains.feedback_K[0, 1]:.6g}]",
        f"feedforward_G = {gains.feedforward_G:.6g}",
        f"closed_loop_poles = [{eigs[0]:.6g}, {eigs[1]:.6g}]",
        f"overshoot_pct = {spec.overshoot_pct:.6g}",
        f"settling_time_s = {spec.settling_time:.6g}",
    ]
    if model.sample_time is not None:
        lines.append(f"sample_time_s = {model.sample_time:.6g}")
    return "\n".join(lines) + "\n"
