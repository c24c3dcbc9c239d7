"""Exception types shared across the package."""


class QubitSMEError(Exception):
    """Base class for package errors."""


class InvalidStateError(QubitSMEError):
    """A state/operator argument violates its preconditions."""


class InvalidInputError(QubitSMEError):
    """A field-input description is unusable (e.g. vanishing cat norm)."""


class DegenerateJumpError(QubitSMEError):
    """A jump was requested at a state that cannot emit (rate <= 0)."""


class StepTooLargeError(QubitSMEError):
    """The jump probability nu*dt reached 1; the step size is unusable."""


class DivergenceError(QubitSMEError):
    """The integrated state became non-finite."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"state diverged at step {step}")


class GridMismatchError(QubitSMEError):
    """Trajectory records do not share a common time grid."""


class ConfigError(QubitSMEError):
    """A scenario configuration failed validation."""
