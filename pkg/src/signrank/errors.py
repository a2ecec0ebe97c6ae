"""Exception hierarchy shared by every module."""

from __future__ import annotations


class SignRankError(Exception):
    """Base class for all library errors."""


class FieldMismatch(SignRankError):
    pass


class ParseError(SignRankError, ValueError):
    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ShapeMismatch(SignRankError, ValueError):
    pass


class ZeroScalar(SignRankError, ValueError):
    pass


class NotRational(SignRankError, ValueError):
    def __init__(self, positions: list[tuple[int, int]]):
        super().__init__(f"entries are not rational at {positions}")
        self.positions = positions


class StructuralError(SignRankError, ValueError):
    pass


class PreconditionViolated(SignRankError, ValueError):
    pass


class RoundingExhausted(SignRankError, RuntimeError):
    pass


class SamplingExhausted(SignRankError, RuntimeError):
    pass


class InstanceTooLarge(SignRankError, ValueError):
    pass


class AxiomViolation(SignRankError, ValueError):
    pass


class RepresentationMismatch(SignRankError, ValueError):
    def __init__(self, message: str, subset: tuple[int, ...] | None = None):
        super().__init__(message)
        self.subset = subset


class InternalVerificationFailed(SignRankError, RuntimeError):
    pass
