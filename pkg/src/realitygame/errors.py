"""Exception types raised across the package."""


class RealityGameError(Exception):
    """Base class for all errors raised by realitygame."""


class ZeroPool(RealityGameError):
    """The realized outcome received no wager, so there is nothing to split.

    When raised from a simulation run, ``trajectory`` holds the partial record
    up to (not including) the failing toss.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory


class DomainError(RealityGameError, ValueError):
    pass


class NotDifferentiable(RealityGameError, ValueError):
    pass


class UnstableFixedPoint(RealityGameError, ValueError):
    pass


class NonPositiveData(RealityGameError, ValueError):
    pass


class DegenerateAllZero(RealityGameError, ValueError):
    pass


class EmptySeries(RealityGameError, ValueError):
    pass


class ParseError(RealityGameError, ValueError):
    def __init__(self, message, line, column=1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(RealityGameError, ValueError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
