"""Exception hierarchy for pulseforge."""


class PulseforgeError(Exception):
    """Base class for all pulseforge errors."""


class InvariantViolation(PulseforgeError, ValueError):
    """A value failed one of its structural invariants (norm, Hermiticity, PSD, unitarity)."""


class AmplitudeCapError(PulseforgeError, ValueError):
    """A pulse envelope or schedule sample exceeds the unit magnitude cap."""


class IntegrationAccuracyError(PulseforgeError, RuntimeError):
    """The integrator's norm drift exceeded tolerance; raise the substep count."""


class DivergenceError(PulseforgeError, RuntimeError):
    """Training loss ran away from its initial value for too many consecutive epochs."""


class GradientEvaluationError(PulseforgeError, RuntimeError):
    """A finite-difference probe produced a non-finite loss."""


class ExperimentSpecError(PulseforgeError, ValueError):
    """An experiment spec file failed validation.

    The message names the offending field.
    """
