"""Matroids given by basis lists, cocircuit matrices and Kapranov-rank search.

Matroids are stored extensionally over the ground set ``{1, ..., n}``
(``n <= 12``) and everything else is derived by enumeration.  The pieces
combine in :func:`optimality_witness`: the cocircuit matrix of the dual of a
rank-3 matroid that is representable over Q(sqrt d) but not over Q gives a
sign pattern of term rank above ``rank + 2`` whose minimum-rank
realizations cannot be rational.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterable, Mapping, Sequence

from .errors import (
    AxiomViolation,
    InstanceTooLarge,
    InternalVerificationFailed,
    ParseError,
    PreconditionViolated,
    RepresentationMismatch,
)
from .linalg import LEFT, ExactMatrix, kernel, rref
from .patterns import SignPattern, bounded_fractions, sign_of, spanning_forest, term_rank
from .scalars import FieldTag, Q, Scalar, format_scalar, parse_field, parse_scalar

__all__ = [
    "FIXTURES",
    "load_fixture",
    "Matroid",
    "Representation",
    "SearchResult",
    "cocircuit_matrix",
    "cocircuit_realization",
    "dual_representation",
    "kapranov_search",
    "optimality_witness",
    "validate_representation",
]

MAX_GROUND = 12
MAX_CANDIDATES = 10**7


@dataclass(frozen=True)
class Matroid:
    ground: int
    bases: frozenset[frozenset[int]]

    def __init__(self, ground: int, bases: Iterable[Iterable[int]]):
        object.__setattr__(self, "ground", int(ground))
        object.__setattr__(self, "bases", frozenset(frozenset(b) for b in bases))

    @classmethod
    def uniform(cls, r: int, n: int) -> "Matroid":
        return cls(n, itertools.combinations(range(1, n + 1), r))

    @classmethod
    def from_vectors(cls, rep: "Representation") -> "Matroid":
        """Matroid whose bases are the r-subsets of independent vectors."""
        n, r = len(rep.vectors), rep.dim
        bases = [T for T in itertools.combinations(range(1, n + 1), r) if _independent(rep, T)]
        return cls(n, bases)

    @property
    def elements(self) -> range:
        return range(1, self.ground + 1)

    def rank(self) -> int:
        return len(next(iter(self.bases))) if self.bases else 0

    def validate(self) -> None:
        """Raise :class:`AxiomViolation` unless the basis axioms hold."""
        if self.ground > MAX_GROUND:
            raise InstanceTooLarge(f"ground set larger than {MAX_GROUND}")
        if not self.bases:
            raise AxiomViolation("the basis family is empty")
        for B in self.bases:
            if not B <= set(self.elements):
                raise AxiomViolation(f"basis {sorted(B)} leaves the ground set")
        sizes = {len(B) for B in self.bases}
        if len(sizes) > 1:
            raise AxiomViolation(f"bases have different cardinalities {sorted(sizes)}")
        for A in self.bases:
            for B in self.bases:
                for a in A - B:
                    if not any((A - {a}) | {b} in self.bases for b in B - A):
                        raise AxiomViolation(
                            f"exchange fails for A={sorted(A)}, B={sorted(B)}, a={a}"
                        )

    def is_valid(self) -> bool:
        try:
            self.validate()
        except AxiomViolation:
            return False
        return True

    def dual(self) -> "Matroid":
        E = frozenset(self.elements)
        return Matroid(self.ground, (E - B for B in self.bases))

    def is_independent(self, T: Iterable[int]) -> bool:
        T = frozenset(T)
        return any(T <= B for B in self.bases)

    def circuits(self) -> frozenset[frozenset[int]]:
        """Minimal dependent sets, found by enumeration in increasing size."""
        if self.ground > MAX_GROUND:
            raise InstanceTooLarge(f"ground set larger than {MAX_GROUND}")
        found: list[frozenset[int]] = []
        for k in range(1, self.rank() + 2):
            for T in itertools.combinations(self.elements, k):
                T = frozenset(T)
                if self.is_independent(T):
                    continue
                if any(c <= T for c in found):
                    continue
                found.append(T)
        return frozenset(found)

    def cocircuits(self) -> frozenset[frozenset[int]]:
        return self.dual().circuits()

    def loops(self) -> list[int]:
        return [e for e in self.elements if not any(e in B for B in self.bases)]

    def to_dict(self) -> dict:
        return {"ground": self.ground, "bases": sorted(sorted(B) for B in self.bases)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "Matroid":
        try:
            return cls(int(data["ground"]), [[int(e) for e in B] for B in data["bases"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed matroid document: {exc}") from exc


FIXTURES = ("U12", "U13", "U23", "U34", "golden9")


def load_fixture(name: str) -> tuple[Matroid, Representation]:
    """A shipped matroid together with its representation."""
    if name not in FIXTURES:
        raise ValueError(f"unknown fixture {name!r}; choose from {', '.join(FIXTURES)}")
    data = resources.files("signrank") / "data"
    M = Matroid.from_dict(json.loads((data / f"{name}.matroid.json").read_text()))
    rep = Representation.from_dict(json.loads((data / f"{name}.rep.json").read_text()))
    return M, rep


def _sorted_sets(sets: Iterable[frozenset[int]]) -> list[tuple[int, ...]]:
    return sorted(tuple(sorted(s)) for s in sets)


@dataclass(frozen=True)
class Representation:
    """Vectors in ``field**dim``, one per ground element (element ``e`` is ``vectors[e-1]``)."""

    field: FieldTag
    dim: int
    vectors: tuple[tuple[Scalar, ...], ...]

    def __init__(self, field: FieldTag, dim: int, vectors: Iterable[Iterable]):
        vecs = tuple(
            tuple(x if isinstance(x, Scalar) else Scalar(field, x) for x in v) for v in vectors
        )
        if any(len(v) != dim for v in vecs):
            raise ValueError("every vector must have length dim")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "vectors", vecs)

    def matrix(self) -> ExactMatrix:
        """The ``dim x n`` matrix with the vectors as columns."""
        if not self.vectors:
            return ExactMatrix(self.field, [[] for _ in range(self.dim)], cols=0)
        return ExactMatrix(self.field, zip(*self.vectors), cols=len(self.vectors))

    def to_dict(self) -> dict:
        return {
            "field": str(self.field),
            "dim": self.dim,
            "vectors": [[format_scalar(x) for x in v] for v in self.vectors],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "Representation":
        try:
            field = parse_field(data["field"])
            dim = int(data["dim"])
            vecs = [[parse_scalar(x, field) for x in v] for v in data["vectors"]]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed representation document: {exc}") from exc
        if any(len(v) != dim for v in vecs):
            raise ParseError("representation vector length differs from dim")
        return cls(field, dim, vecs)


def _independent(rep: Representation, T: Sequence[int]) -> bool:
    if not T:
        return True
    M = ExactMatrix(rep.field, [rep.vectors[e - 1] for e in T], cols=rep.dim)
    return M.rank() == len(T)


def validate_representation(M: Matroid, rep: Representation) -> None:
    """Raise :class:`RepresentationMismatch` unless ``rep`` represents ``M``."""
    if M.ground > MAX_GROUND:
        raise InstanceTooLarge(f"ground set larger than {MAX_GROUND}")
    if len(rep.vectors) != M.ground:
        raise RepresentationMismatch(f"{len(rep.vectors)} vectors for {M.ground} elements")
    r = M.rank()
    if rep.matrix().rank() != r:
        raise RepresentationMismatch(f"vectors span rank {rep.matrix().rank()}, matroid rank {r}")
    for T in itertools.combinations(M.elements, r):
        if _independent(rep, T) != (frozenset(T) in M.bases):
            kind = "independent" if _independent(rep, T) else "dependent"
            raise RepresentationMismatch(f"subset {list(T)} is {kind} but basis membership disagrees", T)


def dual_representation(M: Matroid, rep: Representation) -> Representation:
    """Representation of ``M.dual()`` from one of ``M``.

    Row-reduce to ``[I_r | A]`` after moving a basis to the front and return
    ``[-A^T | I_{n-r}]`` with the column order restored.
    """
    validate_representation(M, rep)
    n, r = M.ground, M.rank()
    K = rep.field
    R, pivots = rref(rep.matrix())
    R = R.submatrix(range(r), range(n))
    nonpivots = [j for j in range(n) if j not in set(pivots)]
    # R restricted to pivot columns is already the identity
    vectors: list[list[Scalar] | None] = [None] * n
    for a, j in enumerate(pivots):
        vectors[j] = [-R.entries[a][c] for c in nonpivots]
    for b, j in enumerate(nonpivots):
        vectors[j] = [K.one() if c == b else K.zero() for c in range(n - r)]
    out = Representation(K, n - r, vectors)
    try:
        validate_representation(M.dual(), out)
    except RepresentationMismatch as exc:
        raise InternalVerificationFailed(f"dual representation is invalid: {exc}") from exc
    return out


def cocircuit_matrix(M: Matroid) -> ExactMatrix:
    """0/1 matrix: rows are elements, columns are cocircuits in lexicographic order."""
    cocs = _sorted_sets(M.cocircuits())
    grid = [[int(e in c) for c in cocs] for e in M.elements]
    return ExactMatrix(Q, grid, cols=len(cocs))


def _first_one(v: Sequence[Scalar]) -> list[Scalar]:
    lead = next(x for x in v if x)
    return [x / lead for x in v]


def cocircuit_realization(M: Matroid, rep: Representation) -> ExactMatrix:
    """Matrix over ``rep.field`` with support equal to the cocircuit matrix and rank ``rank(M)``.

    The column for a cocircuit ``C*`` lists ``f . v_e`` over all elements,
    where ``f`` is the normal of the hyperplane spanned by ``E - C*``.
    """
    validate_representation(M, rep)
    if M.loops():
        raise PreconditionViolated(f"matroid has loops {M.loops()}")
    r = M.rank()
    cocs = _sorted_sets(M.cocircuits())
    cols = []
    for c in cocs:
        hyper = [e for e in M.elements if e not in c]
        H = ExactMatrix(rep.field, [rep.vectors[e - 1] for e in hyper], cols=rep.dim).transpose() \
            if hyper else ExactMatrix(rep.field, [[] for _ in range(rep.dim)], cols=0)
        normals = kernel(H, LEFT).vectors
        if len(normals) != 1:
            raise InternalVerificationFailed(f"complement of cocircuit {c} is not a hyperplane")
        f = _first_one(normals[0])
        cols.append([sum((fi * vi for fi, vi in zip(f, v)), rep.field.zero()) for v in rep.vectors])
    R = ExactMatrix(rep.field, zip(*cols), cols=len(cols)) if cols else \
        ExactMatrix(rep.field, [[] for _ in range(M.ground)], cols=0)
    pattern = cocircuit_matrix(M)
    if any(bool(x) != bool(y) for rx, ry in zip(R.entries, pattern.entries) for x, y in zip(rx, ry)):
        raise InternalVerificationFailed("realization support differs from the cocircuit matrix")
    if R.rank() != r:
        raise InternalVerificationFailed(f"realization has rank {R.rank()}, expected {r}")
    return R


# ---------------------------------------------------------------------------
# bounded Kapranov-rank search


@dataclass(frozen=True)
class SearchResult:
    found: bool
    matrix: ExactMatrix | None
    candidates: int
    explored: int
    seconds: float
    bound: int
    target_rank: int

    def to_dict(self) -> dict:
        return {
            "result": "Found" if self.found else "NotFoundWithinBounds",
            "matrix": self.matrix.to_dict() if self.matrix is not None else None,
            "candidates": self.candidates,
            "explored": self.explored,
            "seconds": round(self.seconds, 3),
            "bound": self.bound,
            "target_rank": self.target_rank,
            "note": None if self.found else "bounded search: evidence, not a proof of non-existence",
        }


def _reduce_raw(basis: list, row: list) -> list:
    row = list(row)
    for c, b in basis:
        f = row[c]
        if f:
            row = [x - f * y for x, y in zip(row, b)]
    return row


def _rref_in_place(rows: list[list], ncols: int) -> list[int]:
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if p is None:
            continue
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def _reduce_against(basis: list[tuple[int, list]], row: list) -> list | None:
    """Reduce ``row`` against an echelon ``basis``; None if it becomes zero."""
    row = list(row)
    for c, b in basis:
        f = row[c]
        if f:
            row = [x - f * y for x, y in zip(row, b)]
    lead = next((c for c, x in enumerate(row) if x), None)
    if lead is None:
        return None
    inv = 1 / row[lead]
    return [lead, [x * inv for x in row]]


def kapranov_search(
    B: ExactMatrix | SignPattern,
    target_rank: int,
    field: FieldTag = Q,
    denominator_bound: int = 2,
    normalize: bool = True,
    fixed: Mapping[tuple[int, int], Fraction] | None = None,
    max_candidates: int = MAX_CANDIDATES,
) -> SearchResult:
    """Search for a matrix of rank ``<= target_rank`` whose zero set is that of ``B``.

    Support entries range over ``+-a/b`` with ``1 <= a, b <= denominator_bound``.
    With ``normalize`` a spanning forest of the support is pinned to 1,
    which loses nothing because row and column scalings preserve both
    rank and zero set.  ``fixed`` pins further entries to given nonzero
    rationals.

    The search is exhaustive over that grid.  Rows are filled one at a
    time; once the rows chosen so far span ``target_rank`` dimensions, each
    further row must lie in their span, so it is solved for rather than
    enumerated.  Enumeration order is fixed, so the witness returned is
    deterministic.

    ``max_candidates`` caps the size of the grid (after pinning); larger
    instances raise :class:`InstanceTooLarge` before any work is done.
    """
    if not field.is_rational:
        raise PreconditionViolated("kapranov_search enumerates rational entries only")
    grid = B.grid if isinstance(B, SignPattern) else B.entries
    m = len(grid)
    n = B.cols
    support = [(i, j) for i in range(m) for j in range(n) if grid[i][j]]
    fixed = dict(fixed or {})
    pinned: dict[tuple[int, int], Fraction] = {}
    if normalize:
        for pos in spanning_forest([p for p in support if p not in fixed]):
            pinned[pos] = Fraction(1)
    for pos, val in fixed.items():
        if pos not in support or not val:
            raise PreconditionViolated(f"fixed position {pos} must be a nonzero support entry")
        pinned[pos] = Fraction(val)
    free = [p for p in support if p not in pinned]
    pos_values = bounded_fractions(denominator_bound)
    values = [v for x in pos_values for v in (x, -x)]
    candidates = len(values) ** len(free)
    if candidates > max_candidates:
        raise InstanceTooLarge(f"{candidates} candidates exceed the limit of {max_candidates}")

    start = time.perf_counter()
    if target_rank < 0:
        return SearchResult(False, None, candidates, 0, 0.0, denominator_bound, target_rank)

    free_by_row: list[list[int]] = [[] for _ in range(m)]
    for i, j in free:
        free_by_row[i].append(j)
    base_rows = [[pinned.get((i, j), Fraction(0)) for j in range(n)] for i in range(m)]
    # rows with few free entries first: the span fills up early and later rows get solved
    order = sorted(range(m), key=lambda i: (len(free_by_row[i]), i))
    value_set = set(values)
    explored = 0
    solution: dict[int, list[Fraction]] | None = None

    def rows_in_span(i: int, basis: list):
        """Every admissible row ``i`` lying in the span of ``basis``."""
        nonlocal explored
        cols = free_by_row[i]
        r0 = _reduce_raw(basis, base_rows[i])
        units = [_reduce_raw(basis, [Fraction(int(c == j)) for c in range(n)]) for j in cols]
        # units @ x = -r0, one equation per coordinate
        aug = [[u[c] for u in units] + [-r0[c]] for c in range(n)]
        k = len(cols)
        piv = _rref_in_place(aug, k + 1)
        if k in piv:
            return
        free_vars = [v for v in range(k) if v not in piv]
        for combo in itertools.product(values, repeat=len(free_vars)):
            explored += 1
            x = [Fraction(0)] * k
            for v, val in zip(free_vars, combo):
                x[v] = val
            ok = True
            for a, pv in enumerate(piv):
                val = aug[a][k] - sum(aug[a][v] * x[v] for v in free_vars)
                if val not in value_set:
                    ok = False
                    break
                x[pv] = val
            if ok:
                row = list(base_rows[i])
                for j, val in zip(cols, x):
                    row[j] = val
                yield row

    def fill(depth: int, basis: list, rows: dict) -> bool:
        nonlocal solution
        if depth == m:
            solution = dict(rows)
            return True
        i = order[depth]
        if len(basis) >= target_rank:
            candidates_i = ((row, basis) for row in rows_in_span(i, basis))
        else:
            candidates_i = _extend_all(i, basis)
        for row, nb in candidates_i:
            rows[i] = row
            if fill(depth + 1, nb, rows):
                return True
            del rows[i]
        return False

    def _extend_all(i: int, basis: list):
        nonlocal explored
        cols = free_by_row[i]
        for combo in itertools.product(values, repeat=len(cols)):
            explored += 1
            row = list(base_rows[i])
            for j, v in zip(cols, combo):
                row[j] = v
            red = _reduce_against(basis, row)
            yield row, (basis if red is None else basis + [tuple(red)])

    fill(0, [], {})
    seconds = time.perf_counter() - start
    if solution is None:
        return SearchResult(False, None, candidates, explored, seconds, denominator_bound, target_rank)
    X = ExactMatrix(field, [[Scalar(field, x) for x in solution[i]] for i in range(m)], cols=n)
    if X.rank() > target_rank or any(bool(x) != bool(g) for rx, rg in zip(X.entries, grid) for x, g in zip(rx, rg)):
        raise InternalVerificationFailed("search witness failed verification")
    return SearchResult(True, X, candidates, explored, seconds, denominator_bound, target_rank)


# ---------------------------------------------------------------------------
# optimality witness


@dataclass
class WitnessReport:
    pattern: SignPattern
    realization: ExactMatrix
    dual: Matroid
    dual_rep: Representation
    rank: int
    term_rank: int
    search: SearchResult | None

    @property
    def gap(self) -> int:
        return self.term_rank - self.rank

    def to_dict(self) -> dict:
        return {
            "rows": self.realization.rows,
            "cols": self.realization.cols,
            "rank": self.rank,
            "term_rank": self.term_rank,
            "gap": self.gap,
            "pattern": self.pattern.to_dict(),
            "realization": self.realization.to_dict(),
            "dual": self.dual.to_dict(),
            "dual_representation": self.dual_rep.to_dict(),
            "search": self.search.to_dict() if self.search is not None else None,
        }


def optimality_witness(
    M3: Matroid,
    rep: Representation,
    search_bound: int | None = None,
    search_columns: Sequence[int] | None = None,
    max_candidates: int = MAX_CANDIDATES,
) -> WitnessReport:
    """Sign pattern realizable at rank ``n - 3`` over ``rep.field``.

    The pattern is that of the cocircuit realization of the dual of
    ``M3``.  When ``M3`` is not representable over Q, no rational matrix
    with this pattern has rank ``n - 3``; the optional bounded search over
    Q (restricted to ``search_columns`` when given) only gathers evidence
    for that.  Wide restrictions are searched in transposed form, which
    has the same minimum rank and usually prunes much earlier.
    """
    if M3.rank() != 3:
        raise PreconditionViolated(f"expected a rank-3 matroid, got rank {M3.rank()}")
    validate_representation(M3, rep)
    Md = M3.dual()
    rep_d = dual_representation(M3, rep)
    R = cocircuit_realization(Md, rep_d)
    S = sign_of(R)
    t = term_rank(S)[0]
    search = None
    if search_bound is not None:
        cols = list(search_columns) if search_columns is not None else list(range(R.cols))
        sub = S.submatrix(range(R.rows), cols)
        if sub.cols > sub.rows:
            sub = sub.transpose()
        search = kapranov_search(sub, R.rank(), Q, search_bound, max_candidates=max_candidates)
    return WitnessReport(S, R, Md, rep_d, R.rank(), t, search)
