"""Rational matrices with a prescribed sign pattern and rank.

The entry point is :func:`realize`: given ``A`` over Q or Q(sqrt d) whose
rank ``r`` is at least ``term_rank - 2``, it returns a rational matrix with
exactly the sign pattern and rank of ``A``.  The building blocks are

* :func:`corank2_realize` / :func:`corank1_realize` -- round a kernel basis
  at scale ``N`` and re-solve every row against the rounded kernel;
* :func:`block_rank_condition` -- the single bilinear condition deciding
  the rank of ``[[W, C], [D, 0]]`` when ``C`` and ``D`` have corank one;
* :func:`gap2_realize` -- the ``r == t - 2`` case built on the König
  block form ``[[B, C], [D, 0]]``;
* :func:`pattern_rank_adjust` -- walk entries towards a generic matrix to
  hit any rank between the current one and the term rank.

Every returned matrix has been re-verified exactly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

from .errors import (
    InternalVerificationFailed,
    PreconditionViolated,
    RoundingExhausted,
    SamplingExhausted,
    StructuralError,
)
from .linalg import (
    LEFT,
    RIGHT,
    ExactMatrix,
    assemble_block,
    kernel,
    rref,
    solve_with_free,
)
from .patterns import LineCover, Matching, SignPattern, block_decompose, sign_of, term_rank
from .scalars import FieldTag, Q, Scalar, Sign, floor_scaled, sign

__all__ = [
    "RealizationReport",
    "RoundingSchedule",
    "Trace",
    "block_rank_condition",
    "corank1_realize",
    "corank2_realize",
    "generic_realize",
    "pattern_rank_adjust",
    "rationalize_kernel_constrained",
    "realize",
    "gap2_realize",
]

BELOW_BOUND_MESSAGE = (
    "rank below t-2: a rational matrix with this sign pattern and rank need not exist"
)


@dataclass(frozen=True)
class RoundingSchedule:
    """Scales ``N = 2**k`` tried in order, ``k`` from start to max inclusive."""

    start_exponent: int = 4
    max_exponent: int = 64

    def __post_init__(self):
        if self.start_exponent > self.max_exponent:
            raise ValueError("start_exponent must not exceed max_exponent")
        if self.start_exponent < 0:
            raise ValueError("start_exponent must be nonnegative")

    def exponents(self) -> range:
        return range(self.start_exponent, self.max_exponent + 1)


DEFAULT_SCHEDULE = RoundingSchedule()


@dataclass
class Trace:
    """Stages executed by a realization and the exponent each rounding accepted."""

    stages: list[str] = dc_field(default_factory=list)
    exponents: dict[str, list[int]] = dc_field(default_factory=dict)

    def stage(self, name: str) -> None:
        self.stages.append(name)

    def accepted(self, name: str, k: int) -> None:
        self.exponents.setdefault(name, []).append(k)


def _trace(trace: Trace | None) -> Trace:
    return trace if trace is not None else Trace()


def _round(x: Scalar, N: int) -> Fraction:
    return Fraction(floor_scaled(x, N), N)


def _rational(grid, cols: int) -> ExactMatrix:
    return ExactMatrix(Q, [[Scalar._raw(Q, Fraction(x), Fraction(0)) for x in row] for row in grid], cols=cols)


def _as_q(x) -> Scalar:
    if isinstance(x, Scalar):
        if x.b:
            raise PreconditionViolated(f"{x} is not rational")
        return Scalar._raw(Q, x.a, x.b)
    return Scalar._raw(Q, Fraction(x), Fraction(0))


def _smallest_magnitude(A: ExactMatrix) -> float:
    vals = [abs(float(x)) for row in A.entries for x in row if x]
    return min(vals) if vals else 0.0


def _check_output(X: ExactMatrix, S: SignPattern, r: int, what: str) -> None:
    if not X.field.is_rational:
        raise InternalVerificationFailed(f"{what}: output is not over Q")
    if sign_of(X) != S:
        raise InternalVerificationFailed(f"{what}: sign pattern changed")
    if X.rank() != r:
        raise InternalVerificationFailed(f"{what}: rank {X.rank()} != {r}")


# ---------------------------------------------------------------------------
# kernel rounding


def _kernel_rounding_realize(
    A: ExactMatrix, corank: int, schedule: RoundingSchedule, trace: Trace | None, stage: str
) -> ExactMatrix:
    trace = _trace(trace)
    m, n = A.shape
    if A.rank() != n - corank:
        raise PreconditionViolated(f"{stage}: rank {A.rank()} != cols - {corank} = {n - corank}")
    trace.stage(stage)
    S = sign_of(A)
    if A.is_zero():
        trace.accepted(stage, schedule.start_exponent)
        return ExactMatrix.zeros(Q, m, n)

    basis = kernel(A).as_columns(A.field, n)  # n x corank
    # Scale kernel rows so the first basis column is 0/1.  This multiplies
    # column j of A by first[j]; negative factors flip that column's signs
    # and are undone on the output.
    first = basis.column(0)
    flips = {j for j, x in enumerate(first) if sign(x) is Sign.MINUS}
    Bn = ExactMatrix(
        A.field,
        [[x / first[j] for x in basis.row(j)] if first[j] else list(basis.row(j)) for j in range(n)],
        cols=corank,
    )
    An = ExactMatrix(
        A.field,
        [[x * first[j] if first[j] else x for j, x in enumerate(row)] for row in A.entries],
        cols=n,
    )
    Sn = sign_of(An)

    supports = [[j for j, x in enumerate(row) if x] for row in An.entries]
    support_ranks = []
    row_pivots = []
    for supp in supports:
        sub = Bn.submatrix(supp, range(corank))
        support_ranks.append(sub.rank())
        _, local = rref(sub.transpose())
        row_pivots.append([supp[k] for k in local])

    for k in schedule.exponents():
        N = 1 << k
        C = _rational([[_round(x, N) for x in row] for row in Bn.entries], corank)
        if C.rank() != corank:
            continue
        if any(
            C.submatrix(supp, range(corank)).rank() != sr
            for supp, sr in zip(supports, support_ranks)
        ):
            continue
        rows = []
        try:
            for i, (supp, piv) in enumerate(zip(supports, row_pivots)):
                pset = set(piv)
                free = {j: _as_q(_round(An.entries[i][j], N)) for j in supp if j not in pset}
                rows.append(solve_with_free(C, free, supp, pivots=piv))
        except StructuralError:
            continue
        X = ExactMatrix(Q, rows, cols=n)
        if sign_of(X) != Sn or X.rank() != n - corank:
            continue
        if any(any(v) for v in (X @ C).entries):
            raise InternalVerificationFailed(f"{stage}: X C != 0")
        trace.accepted(stage, k)
        if flips:
            X = ExactMatrix(
                Q, [[-x if j in flips else x for j, x in enumerate(row)] for row in X.entries], cols=n
            )
        _check_output(X, S, n - corank, stage)
        return X
    raise RoundingExhausted(
        f"{stage}: no accepting scale up to 2**{schedule.max_exponent}; "
        f"smallest entry magnitude {_smallest_magnitude(A):.3e}"
    )


def corank2_realize(A: ExactMatrix, schedule: RoundingSchedule = DEFAULT_SCHEDULE,
                    trace: Trace | None = None) -> ExactMatrix:
    """Rational matrix with the pattern of ``A`` and rank ``cols - 2``.

    ``A`` must have rank exactly ``cols - 2``.  Its two-dimensional kernel
    is rounded to a rational ``C`` at scale ``N``; each row is then solved
    against ``C`` on its own support with the free entries rounded from
    ``A``.  ``N`` doubles until the pattern and rank match.
    """
    return _kernel_rounding_realize(A, 2, schedule, trace, "corank2")


def corank1_realize(A: ExactMatrix, schedule: RoundingSchedule = DEFAULT_SCHEDULE,
                    trace: Trace | None = None) -> ExactMatrix:
    """One-kernel-vector analogue of :func:`corank2_realize`."""
    return _kernel_rounding_realize(A, 1, schedule, trace, "corank1")


# ---------------------------------------------------------------------------
# block rank condition


def block_rank_condition(C: ExactMatrix, D: ExactMatrix) -> tuple[list[Scalar], list[Scalar]]:
    """Vectors ``u, v`` with ``rank [[W, C], [D, 0]] = rank C + rank D + [u^T W v != 0]``.

    ``C`` is ``p x s`` of rank ``p - 1`` and ``D`` is ``r x q`` of rank
    ``q - 1``; ``u`` spans the left kernel of ``C`` and ``v`` the right
    kernel of ``D``.
    """
    p, q = C.rows, D.cols
    if C.rank() != p - 1:
        raise PreconditionViolated(f"C must have rank p-1 = {p - 1}, has {C.rank()}")
    if D.rank() != q - 1:
        raise PreconditionViolated(f"D must have rank q-1 = {q - 1}, has {D.rank()}")
    u = list(kernel(C, LEFT).vectors[0])
    v = list(kernel(D, RIGHT).vectors[0])
    return u, v


def bilinear(u: Sequence[Scalar], W: ExactMatrix, v: Sequence[Scalar]) -> Scalar:
    acc = W.field.zero()
    for i, ui in enumerate(u):
        if not ui:
            continue
        for j, vj in enumerate(v):
            if vj and W.entries[i][j]:
                acc = acc + ui * W.entries[i][j] * vj
    return acc


# ---------------------------------------------------------------------------
# rationalization under a fixed rational kernel vector


def rationalize_kernel_constrained(
    M: ExactMatrix,
    w: Sequence,
    side: str = RIGHT,
    schedule: RoundingSchedule = DEFAULT_SCHEDULE,
    trace: Trace | None = None,
) -> ExactMatrix:
    """Rational matrix with the pattern and rank of ``M`` still annihilated by ``w``.

    ``w`` is a nonzero rational vector with ``M w = 0`` (``side="right"``)
    or ``w^T M = 0`` (``side="left"``).
    """
    if side == LEFT:
        return rationalize_kernel_constrained(M.transpose(), w, RIGHT, schedule, trace).transpose()
    trace = _trace(trace)
    wq = [_as_q(x) for x in w]
    if len(wq) != M.cols or not any(wq):
        raise PreconditionViolated("w must be a nonzero vector of matching length")
    wf = [x.to_field(M.field) for x in wq]
    if any(M.apply(wf)):
        raise PreconditionViolated("w does not annihilate M")
    trace.stage("rationalize")
    S = sign_of(M)
    r = M.rank()
    wa = [x.a for x in wq]

    pivots = []
    for row in M.entries:
        cands = [j for j, x in enumerate(row) if x and wa[j]]
        pivots.append(max(cands, key=lambda j: (abs(wa[j]), -j)) if cands else None)

    for k in schedule.exponents():
        N = 1 << k
        grid = []
        for row, p in zip(M.entries, pivots):
            out = [_round(x, N) if x else Fraction(0) for x in row]
            if p is not None:
                out[p] = 0
                out[p] = -sum(out[j] * wa[j] for j in range(len(out))) / wa[p]
            grid.append(out)
        X = _rational(grid, M.cols)
        if sign_of(X) == S and X.rank() == r:
            if any(X.apply(wq)):
                raise InternalVerificationFailed("rationalized matrix lost its kernel vector")
            trace.accepted("rationalize", k)
            return X
    raise RoundingExhausted(
        f"rationalize: no accepting scale up to 2**{schedule.max_exponent}; "
        f"smallest entry magnitude {_smallest_magnitude(M):.3e}"
    )


# ---------------------------------------------------------------------------
# generic sampling and rank walks


def generic_realize(S: SignPattern, field: FieldTag = Q, seed: int = 0) -> ExactMatrix:
    """A matrix with pattern ``S`` whose rank equals the term rank of ``S``."""
    t = term_rank(S)[0]
    rng = random.Random(seed)
    for _ in range(100):
        grid = [
            [Fraction(int(s) * rng.randint(1, 1 << 16), 256) if s else Fraction(0) for s in row]
            for row in S.grid
        ]
        G = ExactMatrix(field, [[Scalar._raw(field, x, Fraction(0)) for x in row] for row in grid], cols=S.cols)
        if G.rank() == t:
            return G
    raise SamplingExhausted(f"no rank-{t} sample in 100 draws; pattern/term-rank bug?")


def pattern_rank_adjust(X: ExactMatrix, h: int, seed: int = 0, trace: Trace | None = None) -> ExactMatrix:
    """Same field and sign pattern as ``X``, rank exactly ``h``.

    Support entries of ``X`` are replaced one at a time, in row-major order,
    by those of a generic matrix of maximal rank; each replacement moves the
    rank by at most one, so the walk passes through every value up to the
    term rank.
    """
    S = sign_of(X)
    r = X.rank()
    t = term_rank(S)[0]
    if not r <= h <= t:
        raise PreconditionViolated(f"target rank {h} outside [{r}, {t}]")
    if r == h:
        return X
    if trace is not None:
        trace.stage("walk")
    G = generic_realize(S, X.field, seed)
    grid = [list(row) for row in X.entries]
    for i, j in S.support():
        grid[i][j] = G.entries[i][j]
        Y = ExactMatrix(X.field, grid, cols=X.cols)
        if Y.rank() == h:
            return Y
    raise AssertionError("rank walk missed its target")


# ---------------------------------------------------------------------------
# rank t-2


def _case_low_corank(B: ExactMatrix, C: ExactMatrix, D: ExactMatrix, t: int, schedule, seed, trace) -> ExactMatrix:
    """``rank D <= q - 2``: realize ``D`` alone at rank ``q - 2`` and fill the rest."""
    q = D.cols
    trace.stage("gap2-low-corank")
    D2 = pattern_rank_adjust(D, q - 2, seed, trace)
    Dq = corank2_realize(D2, schedule, trace)
    Bq = generic_realize(sign_of(B), Q, seed)
    Cq = generic_realize(sign_of(C), Q, seed + 1)
    Y = assemble_block(Bq, Cq, Dq)
    return pattern_rank_adjust(Y, t - 2, seed, trace)


def _case_exact_corank(B: ExactMatrix, C: ExactMatrix, D: ExactMatrix, t: int, schedule, trace) -> ExactMatrix:
    """``rank C = p - 1`` and ``rank D = q - 1``."""
    trace.stage("gap2-exact-corank")
    K = B.field
    u, v = block_rank_condition(C, D)
    # positive line scalings turning u, v into sign vectors
    rs = [abs(x) if x else K.one() for x in u]
    cs = [abs(x) if x else K.one() for x in v]
    us = [Scalar._raw(Q, Fraction(int(sign(x))), Fraction(0)) for x in u]
    vs = [Scalar._raw(Q, Fraction(int(sign(x))), Fraction(0)) for x in v]
    Bs = ExactMatrix(K, [[x * rs[i] * cs[j] for j, x in enumerate(row)] for i, row in enumerate(B.entries)], cols=B.cols)
    Cs = ExactMatrix(K, [[x * rs[i] for x in row] for i, row in enumerate(C.entries)], cols=C.cols)
    Ds = ExactMatrix(K, [[x * cs[j] for j, x in enumerate(row)] for row in D.entries], cols=D.cols)

    Cq = rationalize_kernel_constrained(Cs, us, LEFT, schedule, trace)
    Dq = rationalize_kernel_constrained(Ds, vs, RIGHT, schedule, trace)
    uq, vq = block_rank_condition(Cq, Dq)
    ua = [x.a for x in uq]
    va = [x.a for x in vq]

    cands = [(i, j) for i, j in sign_of(Bs).support() if ua[i] and va[j]]
    pivot = max(cands, key=lambda ij: abs(ua[ij[0]] * va[ij[1]])) if cands else None
    target = assemble_block(Bs, Cs, Ds)
    S = sign_of(target)
    for k in schedule.exponents():
        N = 1 << k
        grid = [[_round(x, N) if x else Fraction(0) for x in row] for row in Bs.entries]
        if pivot is not None:
            pi, pj = pivot
            grid[pi][pj] = Fraction(0)
            acc = sum(ua[i] * grid[i][j] * va[j] for i in range(len(ua)) for j in range(len(va)))
            grid[pi][pj] = -acc / (ua[pi] * va[pj])
        Bq = _rational(grid, B.cols)
        Y = assemble_block(Bq, Cq, Dq)
        if sign_of(Y) == S and Y.rank() == t - 2:
            trace.accepted("gap2-exact-corank", k)
            return Y
    raise RoundingExhausted(
        f"gap2: no accepting scale up to 2**{schedule.max_exponent}; "
        f"smallest entry magnitude {_smallest_magnitude(B):.3e}"
    )


def gap2_realize(A: ExactMatrix, schedule: RoundingSchedule = DEFAULT_SCHEDULE,
                      seed: int = 0, trace: Trace | None = None) -> ExactMatrix:
    """Rational realization of ``A`` when ``rank A == term_rank - 2``."""
    trace = _trace(trace)
    m, n = A.shape
    if A.is_zero():
        return ExactMatrix.zeros(Q, m, n)
    S = sign_of(A)
    t = term_rank(S)[0]
    if A.rank() != t - 2:
        raise PreconditionViolated(f"gap2_realize needs rank t-2 = {t - 2}, got {A.rank()}")
    trace.stage("gap2")
    dec = block_decompose(S)
    p, q = dec.p, dec.q
    P = A.permute(dec.row_perm, dec.col_perm)
    B = P.submatrix(range(p), range(q))
    C = P.submatrix(range(p), range(q, n))
    D = P.submatrix(range(p, m), range(q))

    if D.rank() < q - 1:
        Y = _case_low_corank(B, C, D, t, schedule, seed, trace)
    elif C.rank() < p - 1:
        Y = _case_low_corank(B.transpose(), D.transpose(), C.transpose(), t, schedule, seed, trace).transpose()
    else:
        Y = _case_exact_corank(B, C, D, t, schedule, trace)

    grid = [[None] * n for _ in range(m)]
    for a, i in enumerate(dec.row_perm):
        for b, j in enumerate(dec.col_perm):
            grid[i][j] = Y.entries[a][b]
    X = ExactMatrix(Q, grid, cols=n)
    _check_output(X, S, t - 2, "gap2")
    return X


# ---------------------------------------------------------------------------
# top level


@dataclass
class RealizationReport:
    field: FieldTag
    shape: tuple[int, int]
    rank: int
    term_rank: int
    matching: Matching
    cover: LineCover
    output: ExactMatrix
    trace: Trace
    pattern_equal: bool
    rank_equal: bool
    rational: bool

    @property
    def passed(self) -> bool:
        return self.pattern_equal and self.rank_equal and self.rational

    def to_dict(self) -> dict:
        return {
            "status": "Pass" if self.passed else "Fail",
            "input": {
                "field": str(self.field),
                "rows": self.shape[0],
                "cols": self.shape[1],
                "rank": self.rank,
                "term_rank": self.term_rank,
                "matching": [list(pq) for pq in self.matching.pairs],
                "cover": {
                    "rows": sorted(self.cover.row_set),
                    "cols": sorted(self.cover.col_set),
                },
            },
            "stages": list(self.trace.stages),
            "exponents": {k: list(v) for k, v in self.trace.exponents.items()},
            "verdict": {
                "pattern_equal": self.pattern_equal,
                "rank_equal": self.rank_equal,
                "rational": self.rational,
            },
            "output": self.output.to_dict(),
        }


def _pad_rows(A: ExactMatrix, target: int) -> ExactMatrix | None:
    """Append copies of rows of ``A`` until the term rank reaches ``target``."""
    cur = A
    t = term_rank(sign_of(cur))[0]
    candidates = sign_of(A).nonzero_rows()
    while t < target:
        for i in candidates:
            trial = cur.vstack(ExactMatrix(A.field, [A.row(i)], cols=A.cols))
            tt = term_rank(sign_of(trial))[0]
            if tt > t:
                cur, t = trial, tt
                break
        else:
            return None
    return cur


def _essential_realize(A: ExactMatrix, r: int, schedule, seed, trace) -> ExactMatrix:
    """Fallback for inputs whose nonzero core has corank at most one on some side."""
    S = sign_of(A)
    rows, cols = S.nonzero_rows(), S.nonzero_cols()
    E = A.submatrix(rows, cols)
    if len(cols) - r == 1:
        Eq = corank1_realize(E, schedule, trace)
    elif len(rows) - r == 1:
        Eq = corank1_realize(E.transpose(), schedule, trace).transpose()
    elif len(cols) == r or len(rows) == r:
        trace.stage("generic")
        Eq = pattern_rank_adjust(generic_realize(sign_of(E), Q, seed), r, seed, trace)
    else:
        raise AssertionError("padding failed although the core has corank >= 2 on both sides")
    grid = [[Fraction(0)] * A.cols for _ in range(A.rows)]
    for a, i in enumerate(rows):
        for b, j in enumerate(cols):
            grid[i][j] = Eq.entries[a][b].a
    return _rational(grid, A.cols)


def realize(A: ExactMatrix, schedule: RoundingSchedule = DEFAULT_SCHEDULE, seed: int = 0) -> RealizationReport:
    """Rational matrix with the sign pattern and rank of ``A``.

    Requires ``rank A >= term_rank - 2``; below that bound rational
    realizations can fail to exist and :class:`PreconditionViolated` is
    raised.
    """
    trace = Trace()
    S = sign_of(A)
    t, matching, cover = term_rank(S)
    r = A.rank()
    if r < t - 2:
        raise PreconditionViolated(BELOW_BOUND_MESSAGE)
    m, n = A.shape

    if A.is_zero():
        trace.stage("trivial")
        X = ExactMatrix.zeros(Q, m, n)
    elif r == t - 2:
        X = gap2_realize(A, schedule, seed, trace)
    else:
        X = None
        padded = _pad_rows(A, r + 2)
        if padded is not None:
            trace.stage("padding-rows")
            Xp = gap2_realize(padded, schedule, seed, trace)
            X = Xp.submatrix(range(m), range(n))
        else:
            padded = _pad_rows(A.transpose(), r + 2)
            if padded is not None:
                trace.stage("padding-cols")
                Xp = gap2_realize(padded, schedule, seed, trace).transpose()
                X = Xp.submatrix(range(m), range(n))
        if X is not None:
            X = pattern_rank_adjust(X, r, seed, trace)
        else:
            trace.stage("essential")
            X = _essential_realize(A, r, schedule, seed, trace)

    report = RealizationReport(
        field=A.field,
        shape=(m, n),
        rank=r,
        term_rank=t,
        matching=matching,
        cover=cover,
        output=X,
        trace=trace,
        pattern_equal=sign_of(X) == S,
        rank_equal=X.rank() == r,
        rational=X.field.is_rational and X.is_rational(),
    )
    if not report.passed:
        raise InternalVerificationFailed(f"realization failed verification: {report.to_dict()['verdict']}")
    return report
