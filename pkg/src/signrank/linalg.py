"""Dense exact linear algebra over a single :class:`FieldTag`.

All routines eliminate with exact fractions and pick the first nonzero
pivot in column order, so every result is reproducible bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import (
    NotRational,
    ParseError,
    ShapeMismatch,
    StructuralError,
    ZeroScalar,
)
from .scalars import FieldTag, Q, Scalar, Sign, format_scalar, parse_field, parse_scalar, sign

__all__ = [
    "ExactMatrix",
    "KernelBasis",
    "assemble_block",
    "embed_rationals",
    "kernel",
    "rank",
    "restrict_to_rationals",
    "rref",
    "scale_line",
    "solve_with_free",
]

ROW = "row"
COLUMN = "column"
RIGHT = "right"
LEFT = "left"


def _to_scalar(x, field: FieldTag) -> Scalar:
    if isinstance(x, Scalar):
        return x.to_field(field) if x.field != field else x
    return Scalar(field, x)


class ExactMatrix:
    """Immutable dense matrix whose entries all live in ``field``."""

    __slots__ = ("field", "rows", "cols", "entries", "_rank")

    def __init__(self, field: FieldTag, entries: Iterable[Iterable], cols: int | None = None):
        grid = tuple(tuple(_to_scalar(x, field) for x in row) for row in entries)
        if cols is None:
            cols = len(grid[0]) if grid else 0
        for row in grid:
            if len(row) != cols:
                raise ShapeMismatch("ragged matrix rows")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "rows", len(grid))
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", grid)
        object.__setattr__(self, "_rank", None)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    @classmethod
    def zeros(cls, field: FieldTag, m: int, n: int) -> "ExactMatrix":
        z = field.zero()
        return cls(field, [[z] * n for _ in range(m)], cols=n)

    @classmethod
    def identity(cls, field: FieldTag, n: int) -> "ExactMatrix":
        return cls(field, [[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> tuple[Scalar, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[Scalar, ...]:
        return tuple(row[j] for row in self.entries)

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return (
            self.field == other.field
            and self.shape == other.shape
            and self.entries == other.entries
        )

    def __hash__(self):
        return hash((self.field, self.shape, self.entries))

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in row) for row in self.entries)
        return f"ExactMatrix({self.field}, {self.rows}x{self.cols}, [{body}])"

    # -- structure ------------------------------------------------------
    def transpose(self) -> "ExactMatrix":
        return ExactMatrix(self.field, zip(*self.entries), cols=self.rows) if self.rows else \
            ExactMatrix(self.field, [[] for _ in range(self.cols)], cols=0)

    @property
    def T(self) -> "ExactMatrix":
        return self.transpose()

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix(
            self.field, [[self.entries[i][j] for j in cols] for i in rows], cols=len(cols)
        )

    def permute(self, row_perm: Sequence[int], col_perm: Sequence[int]) -> "ExactMatrix":
        """Row ``k`` of the result is row ``row_perm[k]`` of ``self`` (same for columns)."""
        return self.submatrix(row_perm, col_perm)

    def replace(self, i: int, j: int, value) -> "ExactMatrix":
        grid = [list(r) for r in self.entries]
        grid[i][j] = _to_scalar(value, self.field)
        return ExactMatrix(self.field, grid, cols=self.cols)

    def map(self, fn) -> "ExactMatrix":
        return ExactMatrix(self.field, [[fn(x) for x in row] for row in self.entries], cols=self.cols)

    def vstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.cols or self.field != other.field:
            raise ShapeMismatch("vstack needs equal column counts and fields")
        return ExactMatrix(self.field, self.entries + other.entries, cols=self.cols)

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ShapeMismatch(f"cannot multiply {self.shape} by {other.shape}")
        z = self.field.zero()
        cols = other.column
        out = []
        for row in self.entries:
            out.append([sum((x * y for x, y in zip(row, cols(j))), z) for j in range(other.cols)])
        return ExactMatrix(self.field, out, cols=other.cols)

    def apply(self, v: Sequence[Scalar]) -> list[Scalar]:
        """Return ``self @ v`` for a column vector ``v``."""
        z = self.field.zero()
        return [sum((x * y for x, y in zip(row, v)), z) for row in self.entries]

    def apply_left(self, v: Sequence[Scalar]) -> list[Scalar]:
        """Return ``v^T @ self``."""
        z = self.field.zero()
        return [sum((v[i] * self.entries[i][j] for i in range(self.rows)), z) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return not any(x for row in self.entries for x in row)

    def is_rational(self) -> bool:
        return all(not x.b for row in self.entries for x in row)

    def support(self) -> list[tuple[int, int]]:
        return [(i, j) for i, row in enumerate(self.entries) for j, x in enumerate(row) if x]

    def signs(self) -> tuple[tuple[Sign, ...], ...]:
        return tuple(tuple(sign(x) for x in row) for row in self.entries)

    def rank(self) -> int:
        if self._rank is None:
            object.__setattr__(self, "_rank", _rank_of(self))
        return self._rank

    # -- serialization --------------------------------------------------
    def to_dict(self) -> dict:
        return {
            "field": str(self.field),
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[format_scalar(x) for x in row] for row in self.entries],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExactMatrix":
        try:
            field = parse_field(data["field"])
            m, n = int(data["rows"]), int(data["cols"])
            raw = data["entries"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed matrix document: {exc}") from exc
        if len(raw) != m or any(len(r) != n for r in raw):
            raise ParseError(f"entries do not match declared shape {m}x{n}")
        grid = [[parse_scalar(x, field) for x in row] for row in raw]
        return cls(field, grid, cols=n)

    @classmethod
    def from_json(cls, text: str) -> "ExactMatrix":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.pos) from exc
        return cls.from_dict(data)


def _working_rows(A: ExactMatrix) -> list[list]:
    # plain Fractions are several times faster than Scalar when nothing is irrational
    if A.is_rational():
        return [[x.a for x in row] for row in A.entries]
    return [list(row) for row in A.entries]


def _from_working(field: FieldTag, x) -> Scalar:
    if isinstance(x, Fraction):
        return Scalar._raw(field, x, Fraction(0))
    return x


def _eliminate(rows: list[list], ncols: int, reduce: bool) -> list[int]:
    """In-place Gaussian elimination; returns pivot columns."""
    pivots: list[int] = []
    r = 0
    m = len(rows)
    for c in range(ncols):
        if r == m:
            break
        p = next((i for i in range(r, m) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        pivot_row = rows[r]
        if reduce:
            inv = 1 / pivot_row[c]
            for k in range(c, ncols):
                pivot_row[k] = pivot_row[k] * inv
            targets = (i for i in range(m) if i != r)
        else:
            targets = range(r + 1, m)
        for i in targets:
            f = rows[i][c]
            if not f:
                continue
            if not reduce:
                f = f / pivot_row[c]
            row_i = rows[i]
            for k in range(c, ncols):
                if pivot_row[k]:
                    row_i[k] = row_i[k] - f * pivot_row[k]
        pivots.append(c)
        r += 1
    return pivots


def _rank_of(A: ExactMatrix) -> int:
    if A.rows == 0 or A.cols == 0:
        return 0
    rows = _working_rows(A)
    if A.rows > A.cols:
        rows = [list(col) for col in zip(*rows)]
        return len(_eliminate(rows, A.rows, reduce=False))
    return len(_eliminate(rows, A.cols, reduce=False))


def rank(A: ExactMatrix) -> int:
    """Rank of ``A`` computed by exact elimination."""
    return A.rank()


def rref(A: ExactMatrix) -> tuple[ExactMatrix, list[int]]:
    """Reduced row echelon form and its pivot columns."""
    rows = _working_rows(A)
    pivots = _eliminate(rows, A.cols, reduce=True)
    grid = [[_from_working(A.field, x) for x in row] for row in rows]
    return ExactMatrix(A.field, grid, cols=A.cols), pivots


@dataclass(frozen=True)
class KernelBasis:
    side: str
    vectors: tuple[tuple[Scalar, ...], ...]

    def __len__(self):
        return len(self.vectors)

    def as_columns(self, field: FieldTag, length: int) -> ExactMatrix:
        """The basis as an ``length x k`` matrix, one vector per column."""
        if not self.vectors:
            return ExactMatrix(field, [[] for _ in range(length)], cols=0)
        return ExactMatrix(field, zip(*self.vectors), cols=len(self.vectors))


def _right_kernel_rows(A: ExactMatrix) -> list[list[Scalar]]:
    R, pivots = rref(A)
    n = A.cols
    zero, one = A.field.zero(), A.field.one()
    pivset = set(pivots)
    vecs = []
    for f in range(n):
        if f in pivset:
            continue
        v = [zero] * n
        v[f] = one
        for i, p in enumerate(pivots):
            v[p] = -R.entries[i][f]
        vecs.append(v)
    return vecs


def kernel(A: ExactMatrix, side: str = RIGHT) -> KernelBasis:
    """Kernel basis in reduced echelon form.

    Each basis vector has a leading 1 at a distinct coordinate and zeros at
    the other vectors' leading coordinates.  ``side="left"`` returns vectors
    ``v`` with ``v^T A = 0``.
    """
    if side not in (RIGHT, LEFT):
        raise ValueError(f"side must be {RIGHT!r} or {LEFT!r}")
    M = A if side == RIGHT else A.transpose()
    vecs = _right_kernel_rows(M)
    if vecs:
        E, _ = rref(ExactMatrix(A.field, vecs, cols=M.cols))
        vecs = [list(row) for row in E.entries]
    for v in vecs:
        if any(M.apply(v)):
            raise AssertionError("kernel vector failed exact verification")
    return KernelBasis(side, tuple(tuple(v) for v in vecs))


def solve_with_free(
    C: ExactMatrix,
    free_assignment: Mapping[int, Scalar],
    unknown_support: Iterable[int],
    pivots: Sequence[int] | None = None,
) -> list[Scalar]:
    """Solve ``x^T C = 0`` for ``x`` supported on ``unknown_support``.

    Pivot unknowns are determined by elimination on the transpose of
    ``C`` restricted to the support rows, unless ``pivots`` is given
    explicitly (it must then index an invertible square subsystem).  Every
    non-pivot unknown takes its value from ``free_assignment``.
    """
    support = sorted(set(unknown_support))
    field = C.field
    zero = field.zero()
    Ct = C.submatrix(support, range(C.cols)).transpose()  # s x |support|
    if pivots is None:
        _, local = rref(Ct)
        pivot_ids = [support[k] for k in local]
    else:
        pivot_ids = list(pivots)
        if not set(pivot_ids) <= set(support):
            raise StructuralError("pivots must lie inside the unknown support")
    free_ids = [j for j in support if j not in set(pivot_ids)]
    covered = set(free_assignment)
    if covered & set(pivot_ids):
        raise StructuralError(f"free assignment covers pivot coordinates {sorted(covered & set(pivot_ids))}")
    missing = [j for j in free_ids if j not in covered]
    if missing:
        raise StructuralError(f"no value supplied for free coordinates {missing}")

    x = [zero] * C.rows
    for j in free_ids:
        x[j] = _to_scalar(free_assignment[j], field)
    if pivot_ids:
        # P^T y = -F^T x_free, with P the pivot rows of C and F the free rows
        k = len(pivot_ids)
        rhs = [zero] * C.cols
        for j in free_ids:
            xj = x[j]
            if xj:
                rhs = [r - xj * c for r, c in zip(rhs, C.entries[j])]
        aug = [[C.entries[p][col] for p in pivot_ids] + [rhs[col]] for col in range(C.cols)]
        aug_m = ExactMatrix(field, aug, cols=k + 1)
        R, piv = rref(aug_m)
        if piv[:k] != list(range(k)) or (len(piv) > k):
            raise StructuralError("pivot subsystem is singular or inconsistent")
        for t, p in enumerate(pivot_ids):
            x[p] = R.entries[t][k]
    if any(C.apply_left(x)):
        raise AssertionError("solve_with_free produced a non-solution")
    return x


def scale_line(A: ExactMatrix, index: int, which: str, lam) -> ExactMatrix:
    lam = _to_scalar(lam, A.field)
    if not lam:
        raise ZeroScalar("cannot scale a line by zero")
    grid = [list(r) for r in A.entries]
    if which == ROW:
        grid[index] = [x * lam for x in grid[index]]
    elif which == COLUMN:
        for row in grid:
            row[index] = row[index] * lam
    else:
        raise ValueError(f"which must be {ROW!r} or {COLUMN!r}")
    return ExactMatrix(A.field, grid, cols=A.cols)


def assemble_block(W: ExactMatrix, C: ExactMatrix, D: ExactMatrix) -> ExactMatrix:
    """Return ``[[W, C], [D, 0]]``."""
    if not (W.field == C.field == D.field):
        raise ShapeMismatch("blocks live in different fields")
    if W.rows != C.rows or W.cols != D.cols:
        raise ShapeMismatch(f"incompatible blocks W{W.shape} C{C.shape} D{D.shape}")
    z = W.field.zero()
    top = [list(w) + list(c) for w, c in zip(W.entries, C.entries)]
    bottom = [list(d) + [z] * C.cols for d in D.entries]
    return ExactMatrix(W.field, top + bottom, cols=W.cols + C.cols)


def embed_rationals(A: ExactMatrix, field: FieldTag) -> ExactMatrix:
    if not A.field.is_rational:
        raise ValueError("embed_rationals expects a matrix over Q")
    return ExactMatrix(field, [[Scalar._raw(field, x.a, x.b) for x in row] for row in A.entries], cols=A.cols)


def restrict_to_rationals(A: ExactMatrix) -> ExactMatrix:
    bad = [(i, j) for i, row in enumerate(A.entries) for j, x in enumerate(row) if x.b]
    if bad:
        raise NotRational(bad)
    return ExactMatrix(Q, [[Scalar._raw(Q, x.a, x.b) for x in row] for row in A.entries], cols=A.cols)
