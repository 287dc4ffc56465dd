"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class MinkError(Exception):
    """Base class. ``s`` carries the arc-length where the failure happened, if any."""

    def __init__(self, message: str, s: float | None = None):
        if s is not None:
            message = f"{message} (at s={s:.17g})"
        super().__init__(message)
        self.s = s


class NearNullVector(MinkError):
    pass


class NotOrthonormal(MinkError):
    def __init__(self, message: str, worst: float, s: float | None = None):
        super().__init__(f"{message}; worst residual {worst:.3e}", s)
        self.worst = worst


class BadSignature(MinkError):
    pass


class OutOfDomain(MinkError):
    pass


class NotUnitSpeed(MinkError):
    pass


class CausalCharacterChange(MinkError):
    pass


class VanishingCurvature(MinkError):
    pass


class NullFrameLeg(MinkError):
    pass


class DegenerateDenominator(MinkError):
    pass


class ZeroAngularMomentumComponent(MinkError):
    pass


class ConstraintViolatedAtStart(MinkError):
    pass


class IntegratorBlowup(MinkError):
    pass


class NoConsistentVector(MinkError):
    pass
