"""Exception hierarchy.

Every numerical refusal raises a subclass of :class:`ComputationError` so the
CLI can map it to a single exit status.
"""


class ToaError(Exception):
    """Base class for all package errors."""


class ComputationError(ToaError, ValueError):
    pass


class GridCoverageError(ComputationError):
    pass


class NormUnderflowError(ComputationError):
    pass


class PhaseUndefinedError(ComputationError):
    pass


class NyquistError(ComputationError):
    """The momentum grid cannot resolve the oscillatory integrand."""


class GridCapError(ComputationError):
    """The grid needed for a scenario exceeds the node cap."""


class DirectionMismatchError(ComputationError):
    pass


class NoStationaryPointError(ComputationError):
    pass


class DegenerateStationaryPointError(ComputationError):
    pass


class WindowInadequateError(ComputationError):
    """A time window misses too much of the arrival distribution."""


class DivergenceGuardError(ComputationError):
    """Amplitude does not vanish fast enough near p = 0 for m/P to be safe."""


class SupportCoverageError(ComputationError):
    pass


class ConditionNotSatisfiedError(ComputationError):
    pass


class ConfigError(ToaError, ValueError):
    """Invalid scenario configuration; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        self.line = line
        self.field = field
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
