"""Exception hierarchy shared by all hoppersim modules."""


class HopperSimError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(HopperSimError):
    """An input value violates a documented invariant."""


class NumericError(HopperSimError):
    """A computation produced non-finite or meaningless values."""


class UncontrollableSystemError(HopperSimError):
    """State feedback cannot be designed: controllability matrix is singular."""


class DegenerateDesignError(HopperSimError):
    """Feedforward gain is undefined (singular closed-loop DC map)."""


class NonConvergenceError(HopperSimError):
    """A simulation or solver failed to reach its stopping condition."""


class GeometryError(HopperSimError):
    """Hop geometry does not permit a ballistic launch."""


class OverBrakedError(GeometryError):
    """Braking deflects the launch angle to zero or below."""


class DegenerateSlopeError(GeometryError):
    """Surface slope cancels the spike geometry; no hop is possible."""


class EscapeVelocityError(HopperSimError):
    """Planned launch speed exceeds the allowed fraction of escape velocity.

    Carries the largest distance that still satisfies the guard so callers
    can report a usable bound.
    """

    def __init__(self, message: str, max_safe_distance: float):
        super().__init__(message)
        self.max_safe_distance = max_safe_distance
