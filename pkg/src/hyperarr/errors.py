"""Error hierarchy.

Every error carries a machine-readable ``code`` (the class name) and an
optional ``context`` mapping.  :class:`ValidationError` subclasses signal bad
user input (CLI exit code 2); :class:`InternalError` subclasses signal that a
mathematical identity which must hold has been violated, i.e. a bug (exit 1).
"""

from __future__ import annotations

from typing import Any


class HyperArrError(Exception):
    """Base class for all errors raised by this package."""

    def __init__(self, message: str = "", **context: Any) -> None:
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__
        self.context = context

    @property
    def code(self) -> str:
        return self.__class__.__name__

    def to_json(self) -> dict[str, Any]:
        return {"code": self.code, "message": self.message, "context": _jsonable(self.context)}


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return str(obj)


class ValidationError(HyperArrError):
    """Invalid input or unmet precondition."""


class InternalError(HyperArrError):
    """A structural identity failed; always indicates a bug."""


# --- exact-field -----------------------------------------------------------
class DivisionByZero(ValidationError, ZeroDivisionError):
    pass


class FieldMismatch(ValidationError):
    pass


# --- arrangement ----------------------------------------------------------
class ZeroCovector(ValidationError):
    pass


class DuplicateHyperplane(ValidationError):
    pass


class FlatNotInLattice(ValidationError):
    pass


class UnknownBuiltin(ValidationError):
    pass


class BadParams(ValidationError):
    pass


# --- lattice-building -----------------------------------------------------
class NotABuildingSet(ValidationError):
    pass


class FlatNotInBuildingSet(ValidationError):
    pass


class ClosureFailed(InternalError):
    pass


# --- nested ---------------------------------------------------------------
class NotAChain(InternalError):
    pass


class NoAdaptedBasis(InternalError):
    pass


# --- modularity -----------------------------------------------------------
class NoComplement(ValidationError):
    pass


class NotAComplement(ValidationError):
    pass


# --- charts ---------------------------------------------------------------
class NotAdapted(ValidationError):
    pass


class NoMAdaptedBasis(InternalError):
    pass


class NotEnoughGModular(ValidationError):
    pass


class PoleOrderExceeded(ValidationError):
    pass


# --- bar-holonomy ---------------------------------------------------------
class DualityMismatch(InternalError):
    pass


class RelationNotPreserved(InternalError):
    pass


class PoleOutsideArrangement(ValidationError):
    pass


# --- numeric-periods ------------------------------------------------------
class PathTooCloseToSingularity(ValidationError):
    pass


class TruncationTooLarge(ValidationError):
    pass


class FitUnstable(ValidationError):
    pass


class DivergentIndex(ValidationError):
    pass


class BadResidue(ValidationError):
    pass
