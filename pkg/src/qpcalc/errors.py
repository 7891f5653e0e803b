"""Exception hierarchy.

Every error carries a stable ``error_kind`` (the class name) and, where one
exists, the measured violation magnitude in ``value``. The CLI serializes
both fields verbatim.
"""

from __future__ import annotations

from typing import Any


class QPCalcError(Exception):
    """Base class for all validation and physics errors."""

    def __init__(self, message: str, value: Any = None, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.value = value
        self.details = details

    @property
    def error_kind(self) -> str:
        return type(self).__name__

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"error_kind": self.error_kind, "message": self.message}
        if self.value is not None:
            out["value"] = self.value
        out.update(self.details)
        return out


class ValidationError(QPCalcError):
    pass


class NotSquare(ValidationError):
    pass


class NonFinite(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class NotUnitTrace(ValidationError):
    pass


class NotPositive(ValidationError):
    pass


class NotIdempotent(ValidationError):
    pass


class NotOrthonormal(ValidationError):
    pass


class NotOrthogonal(ValidationError):
    pass


class NotComplete(ValidationError):
    pass


class NotRankOne(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class NonRealTrace(QPCalcError):
    pass


class ProbabilityOutOfRange(QPCalcError):
    pass


class ZeroProbabilityBranch(QPCalcError):
    pass


class MarginalityViolation(QPCalcError):
    pass


class DegenerateOverlap(QPCalcError):
    pass


class ReconstructionNotPhysical(QPCalcError):
    pass


class WitnessNotFound(QPCalcError):
    pass


class BoundViolation(QPCalcError):
    pass
