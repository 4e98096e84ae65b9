"""Exception types shared across the package.

Configuration-style failures derive from ValueError so they behave like
ordinary argument errors; numerical failures derive from RuntimeError.
The CLI maps ConfigError/ParameterError to exit code 2 and
NumericalError to exit code 3.
"""


class ParameterError(ValueError):
    """A physical parameter violates its constraints (e.g. mass <= 0)."""


class ConfigError(ValueError):
    """A run configuration is malformed or inconsistent."""


class AlignmentError(ValueError):
    """Two series that must share time stamps do not."""


class NumericalError(RuntimeError):
    """Base class for failures of the numerical schemes."""


class InstabilityError(NumericalError):
    """The wave-equation step lost normalization; reduce dt."""


class WidthCollapseError(NumericalError):
    """The packet width reached the collapse floor during integration."""

    def __init__(self, time: float):
        super().__init__(f"packet width fell to the collapse floor at t={time:.6g}")
        self.time = time


class PhaseUnwrapError(NumericalError):
    """The phase could not be unwrapped on the high-density region."""


class BoundaryTouchError(NumericalError):
    """The packet reached the edge of the periodic domain; enlarge it."""
