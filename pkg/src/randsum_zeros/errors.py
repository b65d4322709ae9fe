"""Exception hierarchy shared by every module."""
from __future__ import annotations


class RandsumError(Exception):
    """Base class for all package errors."""


class ValidationError(RandsumError, ValueError):
    """A value is well-formed but violates an invariant."""


class ParseError(RandsumError, ValueError):
    """A configuration document is malformed; ``path`` names the offending key."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class DegreeTooLarge(RandsumError, OverflowError):
    """Basis values overflow double precision even after log-space scaling."""


class AllZero(RandsumError, ArithmeticError):
    """Every basis function vanishes at the point; kernels are undefined."""


class NotOnAxis(RandsumError, ValueError):
    """A real-axis quantity was requested at a point that is not real."""


class OnVanishingSet(RandsumError, ValueError):
    """The point lies inside the numerical band around the set where D0 = 0."""


class NumericalInconsistency(RandsumError, ArithmeticError):
    """A quantity that must be non-negative came out clearly negative."""


class UnsupportedFamily(RandsumError, ValueError):
    """The operation is only defined for particular basis families."""


class ContourTooCloseToAxis(RandsumError, ValueError):
    """A contour side runs inside the axis band."""


class SingularPivot(RandsumError, ArithmeticError):
    """A Cholesky pivot that must be positive underflowed."""


class NoConvergence(RandsumError, ArithmeticError):
    """The simultaneous root iteration did not settle within the sweep cap."""


class UnstableFamily(RandsumError, ArithmeticError):
    """Too many Monte Carlo trials failed to converge."""


class TooFewTrials(RandsumError, ValueError):
    """No histogram cell has enough expected mass to be compared."""


class OutputWriteError(RandsumError, OSError):
    """Writing an output artifact failed."""
