"""Exception hierarchy.

``ConfigError`` subclasses map to CLI exit code 2, ``NumericalError``
subclasses to exit code 3.
"""
from __future__ import annotations


class PoincareShapeError(Exception):
    """Base class for all package errors."""


class ConfigError(PoincareShapeError):
    """Malformed input file or invalid parameter."""


class NumericalError(PoincareShapeError):
    """A computation could not be carried out to the requested standard."""


class ImmersionFailure(NumericalError):
    pass


class AxisIntersection(NumericalError):
    pass


class SingularFrame(NumericalError):
    pass


class AxisProximity(NumericalError):
    pass


class IncompatibleDatum(NumericalError):
    pass


class IllConditioned(NumericalError):
    pass


class TooCloseToBoundary(NumericalError):
    pass


class CirculationDrift(NumericalError):
    pass


class NotTransverse(NumericalError):
    pass


class StepFailure(NumericalError):
    pass


class NotLinearized(NumericalError):
    pass


class NonzeroAverage(NumericalError):
    pass


class SmallDivisorOverflow(NumericalError):
    pass


class NotDiophantineUpTo(NumericalError):
    """Raised with the first denominator ``q`` at which the bound fails."""

    def __init__(self, q: int, message: str | None = None):
        self.q = int(q)
        super().__init__(message or f"diophantine bound violated at q = {self.q}")
