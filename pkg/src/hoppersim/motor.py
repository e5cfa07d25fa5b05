"""DC motor + flywheel electromechanical model.

The actuator is a brushed DC motor spinning an inertial wheel.  With the
angular speed w (rad/s) and armature current i (A) as states and the
terminal voltage v as input, the continuous dynamics are

    dw/dt = (-b*w + K*i) / J
    di/dt = (-K*w - R*i + v) / L
    y     = w

where J is the rotor+flywheel inertia, b the viscous friction, K the
back-EMF / torque constant, L the winding inductance and R the winding
resistance.  The same model is exposed as its transfer function

    w(s)/V(s) = K / ((R + L*s)(J*s + b) + K^2)

and as an exact zero-order-hold discrete equivalent for digital control.
All functions here are pure; model objects are immutable and safe to share
across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericError, ValidationError

CONTINUOUS = "continuous"
DISCRETE = "discrete"

# Substep size for the reference integrator, as a fraction of the system
# norm: |A|*h <= _RK4_NORM_STEP keeps the local truncation error far below
# the 1e-6 agreement required against the closed-form discretization.
_RK4_NORM_STEP = 0.02


@dataclass(frozen=True)
class MotorParams:
    """Electrical and mechanical constants of the flywheel motor (SI units)."""

    inertia_J: float
    friction_b: float
    emf_K: float
    inductance_L: float
    resistance_R: float

    def __post_init__(self):
        for name in ("inertia_J", "friction_b", "emf_K", "inductance_L", "resistance_R"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValidationError(f"motor parameter {name} must be strictly positive, got {value!r}")


@dataclass(frozen=True)
class MotorState:
    """Instantaneous motor state: angular speed (rad/s) and current (A)."""

    omega: float
    current: float

    def __post_init__(self):
        if not (math.isfinite(self.omega) and math.isfinite(self.current)):
            raise ValidationError("motor state values must be finite")


@dataclass(frozen=True, eq=False)
class LinearStateModel:
    """2-state, 1-input, 1-output linear system, continuous or discrete.

    For a continuous model the matrices are (A, B, C) of dx/dt = A x + B v,
    y = C x.  For a discrete model they are the zero-order-hold equivalents
    (Phi, Gamma, H) of x[k+1] = Phi x[k] + Gamma v[k], y = H x[k], together
    with the sample time.
    """

    kind: str
    system_matrix: np.ndarray
    input_matrix: np.ndarray
    output_matrix: np.ndarray
    sample_time: float | None = None

    def __post_init__(self):
        if self.kind not in (CONTINUOUS, DISCRETE):
            raise ValidationError(f"model kind must be {CONTINUOUS!r} or {DISCRETE!r}")
        for name, shape in (("system_matrix", (2, 2)), ("input_matrix", (2, 1)), ("output_matrix", (1, 2))):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != shape:
                raise ValidationError(f"{name} must have shape {shape}, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise NumericError(f"{name} contains non-finite entries")
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if self.kind == DISCRETE:
            if self.sample_time is None or not (self.sample_time > 0.0):
                raise ValidationError("discrete model requires sample_time > 0")
        elif self.sample_time is not None:
            raise ValidationError("continuous model must not carry a sample_time")

    @property
    def is_discrete(self) -> bool:
        return self.kind == DISCRETE


def build_continuous(params: MotorParams) -> LinearStateModel:
    """Assemble the continuous state-space model from motor constants."""
    J, b, K = params.inertia_J, params.friction_b, params.emf_K
    L, R = params.inductance_L, params.resistance_R
    A = np.array([[-b / J, K / J], [-K / L, -R / L]])
    B = np.array([[0.0], [1.0 / L]])
    C = np.array([[1.0, 0.0]])
    return LinearStateModel(CONTINUOUS, A, B, C)


def transfer_function(params: MotorParams) -> tuple[tuple[float], tuple[float, float, float]]:
    """Speed-per-voltage transfer function as (numerator, denominator).

    Coefficients are ordered highest power of s first.  The denominator is
    the expansion of (R + L*s)(J*s + b) + K^2.
    """
    J, b, K = params.inertia_J, params.friction_b, params.emf_K
    L, R = params.inductance_L, params.resistance_R
    num = (K,)
    den = (L * J, L * b + R * J, R * b + K * K)
    return num, den


def dc_gain(params: MotorParams) -> float:
    """Steady-state speed per volt, the s = 0 limit of the transfer function."""
    num, den = transfer_function(params)
    return num[0] / den[-1]


def _expm_2x2(M: np.ndarray) -> np.ndarray:
    """Matrix exponential of a real 2x2 matrix.

    Closed form: split M = mu*I + D with D trace-free, so D^2 = q*I and
    exp(M) = exp(mu) * (cosh(s)*I + sinh(s)/s * D) with s = sqrt(q) (the
    trig pair when q < 0).  Falls back to a scaled-and-squared series when
    the eigenvalues are nearly defective and the closed form loses accuracy.
    """
    trace = M[0, 0] + M[1, 1]
    mu = 0.5 * trace
    D = M - mu * np.eye(2)
    q = D[0, 0] * D[0, 0] + D[0, 1] * D[1, 0]
    # 4q is the characteristic discriminant; near zero means a repeated root.
    if abs(4.0 * q) <= 1e-12 * max(trace * trace, 1e-30):
        return _expm_series(M)
    if q > 0.0:
        s = math.sqrt(q)
        c0, c1 = math.cosh(s), math.sinh(s) / s
    else:
        s = math.sqrt(-q)
        c0, c1 = math.cos(s), math.sin(s) / s
    result = math.exp(mu) * (c0 * np.eye(2) + c1 * D)
    if not np.all(np.isfinite(result)):
        raise NumericError("matrix exponential overflowed")
    return result


def _expm_series(M: np.ndarray) -> np.ndarray:
    """Scaling-and-squaring Taylor series exponential (defective-case path)."""
    scale = max(0, int(math.ceil(math.log2(max(np.linalg.norm(M, np.inf), 1e-300) / 0.5))))
    Ms = M / (2.0**scale)
    E = np.eye(2)
    term = np.eye(2)
    for k in range(1, 24):
        term = term @ Ms / k
        E = E + term
    for _ in range(scale):
        E = E @ E
    return E


def _integral_expm(A: np.ndarray, horizon: float) -> np.ndarray:
    """Psi = integral of exp(A*s) ds over [0, horizon], by series + doubling.

    Valid for any A, including singular; used when the A-solve shortcut for
    the input matrix would be ill-conditioned.
    """
    scale = max(0, int(math.ceil(math.log2(max(np.linalg.norm(A * horizon, np.inf), 1e-300) / 0.5))))
    h = horizon / (2.0**scale)
    Ah = A * h
    E = np.eye(2)
    P = np.eye(2) * h
    term = np.eye(2)
    for k in range(1, 24):
        term = term @ Ah / k
        E = E + term
        P = P + term * (h / (k + 1))
    for _ in range(scale):
        P = P + E @ P
        E = E @ E
    return P


def discretize(model: LinearStateModel, sample_time: float) -> LinearStateModel:
    """Exact zero-order-hold equivalent of a continuous model.

    Phi = exp(A*T), Gamma = (integral of exp(A*s) ds) B, H = C.  The input
    is assumed held constant between samples, matching a PWM-driven motor.
    """
    if model.kind != CONTINUOUS:
        raise ValidationError("discretize expects a continuous model")
    if not (sample_time > 0.0 and math.isfinite(sample_time)):
        raise ValidationError(f"sample_time must be positive, got {sample_time!r}")
    A = model.system_matrix
    B = model.input_matrix
    Phi = _expm_2x2(A * sample_time)
    det_A = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    norm_A = np.linalg.norm(A, np.inf)
    if abs(det_A) > 1e-9 * max(1.0, norm_A * norm_A) and norm_A * sample_time > 1e-2:
        Gamma = np.linalg.solve(A, (Phi - np.eye(2)) @ B)
    else:
        Gamma = _integral_expm(A, sample_time) @ B
    if not (np.all(np.isfinite(Phi)) and np.all(np.isfinite(Gamma))):
        raise NumericError("discretization produced non-finite matrices")
    return LinearStateModel(DISCRETE, Phi, Gamma, model.output_matrix, sample_time)


def step_continuous(model: LinearStateModel, state: MotorState, voltage: float, dt: float) -> MotorState:
    """Advance the continuous model by dt with the voltage held constant.

    Classic fourth-order Runge-Kutta with substeps sized to the system
    norm; serves as the independent oracle for the ZOH discretization and
    for closed-loop checks.
    """
    if model.kind != CONTINUOUS:
        raise ValidationError("step_continuous expects a continuous model")
    if not (dt > 0.0):
        raise ValidationError("dt must be positive")
    A = model.system_matrix
    B = model.input_matrix
    a11, a12 = A[0, 0], A[0, 1]
    a21, a22 = A[1, 0], A[1, 1]
    b1, b2 = B[0, 0] * voltage, B[1, 0] * voltage
    n = max(1, math.ceil(np.linalg.norm(A, np.inf) * dt / _RK4_NORM_STEP))
    h = dt / n
    w, c = state.omega, state.current

    def f(x, y):
        return a11 * x + a12 * y + b1, a21 * x + a22 * y + b2

    for _ in range(n):
        k1w, k1c = f(w, c)
        k2w, k2c = f(w + 0.5 * h * k1w, c + 0.5 * h * k1c)
        k3w, k3c = f(w + 0.5 * h * k2w, c + 0.5 * h * k2c)
        k4w, k4c = f(w + h * k3w, c + h * k3c)
        w += h / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
        c += h / 6.0 * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
    return MotorState(w, c)
