"""Exception types raised by skomap."""


class SkomapError(Exception):
    """Base class for all skomap errors."""


class PathDomainError(SkomapError, ValueError):
    """Raised when a path operation is asked for something outside its domain.

    Covers evaluation outside [0, horizon], infinite values where finite ones
    are required, NaN inputs and malformed grids.
    """


class GridMismatchError(SkomapError, ValueError):
    """Raised when two paths that must share a grid do not."""


class BoundaryOrderError(SkomapError, ValueError):
    """Raised when a boundary pair violates lower <= upper."""

    def __init__(self, time: float, lower: float, upper: float, message: str = None):
        self.time = time
        self.lower = lower
        self.upper = upper
        if message is None:
            message = f"lower boundary {lower!r} exceeds upper boundary {upper!r} at t={time!r}"
        super().__init__(message)


class CsvFormatError(SkomapError, ValueError):
    """Raised when a path CSV cannot be parsed."""

    def __init__(self, line: int, reason: str, source: str = None):
        self.line = line
        self.reason = reason
        self.source = source
        where = f"{source}:{line}" if source else f"line {line}"
        super().__init__(f"{where}: {reason}")


class SolverConsistencyError(SkomapError, RuntimeError):
    """Raised when a solver output leaves [lower, upper] beyond tolerance."""

    def __init__(self, time: float, excess: float):
        self.time = time
        self.excess = excess
        super().__init__(
            f"constrained path leaves the interval by {excess:.3g} at t={time!r}; "
            "input grid or values are corrupt"
        )


class HypothesisError(SkomapError, ValueError):
    """Raised when a comparison check is called outside its hypotheses."""


class ConfigError(SkomapError, ValueError):
    """Raised when an experiment config fails validation."""

    def __init__(self, pointer: str, message: str):
        self.pointer = pointer or "/"
        super().__init__(f"{self.pointer}: {message}")
