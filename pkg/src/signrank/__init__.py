"""Rational realizations of sign patterns with large rank.

Given a matrix over Q or a real quadratic field whose rank is at least its
term rank minus two, :func:`realize` builds a rational matrix with exactly
the same sign pattern and rank.  :mod:`signrank.matroid` produces patterns
just below that bound whose minimum-rank realizations need irrational
entries.
"""

from .errors import (
    AxiomViolation,
    FieldMismatch,
    InstanceTooLarge,
    InternalVerificationFailed,
    NotRational,
    ParseError,
    PreconditionViolated,
    RepresentationMismatch,
    RoundingExhausted,
    SamplingExhausted,
    ShapeMismatch,
    SignRankError,
    StructuralError,
    ZeroScalar,
)
from .linalg import ExactMatrix, kernel, rank
from .patterns import SignPattern, block_decompose, sign_of, term_rank
from .matroid import Matroid, Representation, kapranov_search, load_fixture, optimality_witness
from .realization import RoundingSchedule, realize
from .scalars import FieldTag, Q, Scalar, Sign, floor_scaled, sign

__version__ = "0.1.0"

__all__ = [
    "AxiomViolation",
    "ExactMatrix",
    "FieldMismatch",
    "FieldTag",
    "InstanceTooLarge",
    "InternalVerificationFailed",
    "Matroid",
    "NotRational",
    "ParseError",
    "PreconditionViolated",
    "Q",
    "Representation",
    "RepresentationMismatch",
    "RoundingExhausted",
    "RoundingSchedule",
    "SamplingExhausted",
    "Scalar",
    "ShapeMismatch",
    "Sign",
    "SignPattern",
    "SignRankError",
    "StructuralError",
    "ZeroScalar",
    "block_decompose",
    "floor_scaled",
    "kapranov_search",
    "kernel",
    "load_fixture",
    "optimality_witness",
    "rank",
    "realize",
    "sign",
    "sign_of",
    "term_rank",
]
