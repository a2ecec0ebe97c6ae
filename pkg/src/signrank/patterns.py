"""Sign patterns, term rank and König covers."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import InstanceTooLarge, ParseError
from .linalg import ExactMatrix
from .scalars import FieldTag, Q, Scalar, Sign

__all__ = [
    "BlockDecomposition",
    "LineCover",
    "Matching",
    "SignPattern",
    "block_decompose",
    "brute_min_rank",
    "negate_lines",
    "sign_of",
    "spanning_forest",
    "term_rank",
]


@dataclass(frozen=True)
class SignPattern:
    grid: tuple[tuple[Sign, ...], ...]
    cols: int

    def __init__(self, grid: Iterable[Iterable], cols: int | None = None):
        g = tuple(tuple(s if isinstance(s, Sign) else Sign(s) for s in row) for row in grid)
        if cols is None:
            cols = len(g[0]) if g else 0
        if any(len(row) != cols for row in g):
            raise ValueError("ragged sign pattern")
        object.__setattr__(self, "grid", g)
        object.__setattr__(self, "cols", cols)

    @property
    def rows(self) -> int:
        return len(self.grid)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> Sign:
        return self.grid[ij[0]][ij[1]]

    def support(self) -> list[tuple[int, int]]:
        return [(i, j) for i, row in enumerate(self.grid) for j, s in enumerate(row) if s]

    def transpose(self) -> "SignPattern":
        return SignPattern(zip(*self.grid), cols=self.rows) if self.rows else SignPattern(
            [() for _ in range(self.cols)], cols=0
        )

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "SignPattern":
        return SignPattern([[self.grid[i][j] for j in cols] for i in rows], cols=len(cols))

    def nonzero_rows(self) -> list[int]:
        return [i for i, row in enumerate(self.grid) if any(row)]

    def nonzero_cols(self) -> list[int]:
        return [j for j in range(self.cols) if any(row[j] for row in self.grid)]

    @classmethod
    def parse(cls, lines: Sequence[str]) -> "SignPattern":
        return cls([[Sign.from_char(ch) for ch in line] for line in lines])

    def strings(self) -> list[str]:
        return ["".join(s.char for s in row) for row in self.grid]

    def __str__(self):
        return "\n".join(self.strings())

    def to_dict(self) -> dict:
        return {"rows": self.rows, "cols": self.cols, "pattern": self.strings()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: Mapping) -> "SignPattern":
        try:
            m, n, lines = int(data["rows"]), int(data["cols"]), data["pattern"]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed pattern document: {exc}") from exc
        if len(lines) != m or any(len(line) != n for line in lines):
            raise ParseError(f"pattern does not match declared shape {m}x{n}")
        for r, line in enumerate(lines):
            for c, ch in enumerate(line):
                if ch not in "+-0−":
                    raise ParseError(f"invalid sign {ch!r} in row {r}", c)
        return cls([[Sign.from_char(ch) for ch in line] for line in lines], cols=n)


def sign_of(A: ExactMatrix) -> SignPattern:
    return SignPattern(A.signs(), cols=A.cols)


def negate_lines(S: SignPattern, rows: Iterable[int] = (), cols: Iterable[int] = ()) -> SignPattern:
    rows, cols = set(rows), set(cols)
    return SignPattern(
        [
            [-s if ((i in rows) != (j in cols)) else s for j, s in enumerate(row)]
            for i, row in enumerate(S.grid)
        ],
        cols=S.cols,
    )


@dataclass(frozen=True)
class Matching:
    pairs: tuple[tuple[int, int], ...]

    def verify(self, S: SignPattern) -> None:
        rows = [i for i, _ in self.pairs]
        cols = [j for _, j in self.pairs]
        if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise AssertionError("matching reuses a line")
        if any(not S[i, j] for i, j in self.pairs):
            raise AssertionError("matching uses a zero position")


@dataclass(frozen=True)
class LineCover:
    row_set: frozenset[int]
    col_set: frozenset[int]

    def __len__(self):
        return len(self.row_set) + len(self.col_set)

    def verify(self, S: SignPattern) -> None:
        for i, j in S.support():
            if i not in self.row_set and j not in self.col_set:
                raise AssertionError(f"position {(i, j)} is not covered")


def _max_matching(S: SignPattern) -> list[int | None]:
    """Augmenting-path matching; returns ``row_of[col]``."""
    adj = [[j for j, s in enumerate(row) if s] for row in S.grid]
    row_of: list[int | None] = [None] * S.cols

    def augment(i: int, seen: set[int]) -> bool:
        for j in adj[i]:
            if j in seen:
                continue
            seen.add(j)
            if row_of[j] is None or augment(row_of[j], seen):
                row_of[j] = i
                return True
        return False

    for i in range(S.rows):
        augment(i, set())
    return row_of


def term_rank(S: SignPattern) -> tuple[int, Matching, LineCover]:
    """Term rank with a maximum matching and a König line cover of equal size."""
    row_of = _max_matching(S)
    col_of = {i: j for j, i in enumerate(row_of) if i is not None}
    adj = [[j for j, s in enumerate(row) if s] for row in S.grid]
    # alternating reachability from unmatched rows
    reach_rows = [i for i in range(S.rows) if i not in col_of]
    seen_rows = set(reach_rows)
    seen_cols: set[int] = set()
    stack = list(reversed(reach_rows))
    while stack:
        i = stack.pop()
        for j in adj[i]:
            if j in seen_cols:
                continue
            seen_cols.add(j)
            k = row_of[j]
            if k is not None and k not in seen_rows:
                seen_rows.add(k)
                stack.append(k)
    cover = LineCover(
        frozenset(i for i in range(S.rows) if i not in seen_rows),
        frozenset(seen_cols),
    )
    matching = Matching(tuple(sorted(col_of.items())))
    matching.verify(S)
    cover.verify(S)
    if len(cover) != len(matching.pairs):
        raise AssertionError("König certificates disagree")
    return len(matching.pairs), matching, cover


@dataclass(frozen=True)
class BlockDecomposition:
    """Permutations bringing a pattern to the form ``[[B, C], [D, 0]]``.

    ``B`` is ``p x q``: the covered rows meet the covered columns.
    """

    row_perm: tuple[int, ...]
    col_perm: tuple[int, ...]
    p: int
    q: int
    cover: LineCover

    @property
    def covered_rows(self) -> tuple[int, ...]:
        return self.row_perm[: self.p]

    @property
    def uncovered_rows(self) -> tuple[int, ...]:
        return self.row_perm[self.p:]

    @property
    def covered_cols(self) -> tuple[int, ...]:
        return self.col_perm[: self.q]

    @property
    def uncovered_cols(self) -> tuple[int, ...]:
        return self.col_perm[self.q:]

    def to_dict(self) -> dict:
        return {
            "row_perm": list(self.row_perm),
            "col_perm": list(self.col_perm),
            "p": self.p,
            "q": self.q,
        }


def _balanced_cover(S: SignPattern, matching: Matching, cover: LineCover) -> LineCover:
    """Minimum cover leaving the largest uncovered zero block.

    A minimum cover takes exactly one endpoint of every matched edge.
    Taking the row of one edge forces rows of others (a support entry
    whose column is not taken must have its row taken), so the admissible
    choices are the closed sets of an implication graph.  The closures of
    single edges are tried and the best zero block wins.
    """
    pairs = matching.pairs
    edge_of_row = {i: e for e, (i, _) in enumerate(pairs)}
    edge_of_col = {j: e for e, (_, j) in enumerate(pairs)}
    implies: list[set[int]] = [set() for _ in pairs]
    must_row: set[int] = set()
    no_row: set[int] = set()
    for i, j in S.support():
        ei, ej = edge_of_row.get(i), edge_of_col.get(j)
        if ei is None and ej is not None:
            no_row.add(ej)  # column j must be taken
        elif ej is None and ei is not None:
            must_row.add(ei)
        elif ei is not None and ej is not None and ei != ej:
            implies[ej].add(ei)  # row of ej taken => column j uncovered => row i taken

    def closure(seed: set[int]) -> set[int]:
        out, stack = set(seed), list(seed)
        while stack:
            for f in implies[stack.pop()]:
                if f not in out:
                    out.add(f)
                    stack.append(f)
        return out

    best = cover
    best_area = (S.rows - len(cover.row_set)) * (S.cols - len(cover.col_set))
    base = closure(must_row)
    for extra in [set()] + [{e} for e in range(len(pairs))]:
        chosen = closure(base | extra)
        if chosen & no_row:
            continue
        p = len(chosen)
        area = (S.rows - p) * (S.cols - (len(pairs) - p))
        if area > best_area:
            cand = LineCover(
                frozenset(pairs[e][0] for e in chosen),
                frozenset(pairs[e][1] for e in range(len(pairs)) if e not in chosen),
            )
            cand.verify(S)
            best, best_area = cand, area
    return best


def block_decompose(S: SignPattern) -> BlockDecomposition:
    t, matching, cover = term_rank(S)
    cover = _balanced_cover(S, matching, cover)
    rows = sorted(cover.row_set)
    cols = sorted(cover.col_set)
    dec = BlockDecomposition(
        tuple(rows + [i for i in range(S.rows) if i not in cover.row_set]),
        tuple(cols + [j for j in range(S.cols) if j not in cover.col_set]),
        len(rows),
        len(cols),
        cover,
    )
    if dec.p + dec.q != t:
        raise AssertionError("cover size differs from term rank")
    if any(S[i, j] for i in dec.uncovered_rows for j in dec.uncovered_cols):
        raise AssertionError("uncovered block is not zero")
    # re-certify the block term ranks the realization relies on
    if term_rank(S.submatrix(dec.uncovered_rows, dec.covered_cols))[0] != dec.q:
        raise AssertionError("D block does not have term rank q")
    if term_rank(S.submatrix(dec.covered_rows, dec.uncovered_cols))[0] != dec.p:
        raise AssertionError("C block does not have term rank p")
    return dec


def spanning_forest(support: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """Positions forming a spanning forest of the row/column support graph.

    Nonzero row and column scalings can set any such forest of entries to
    prescribed nonzero values, so searches may pin them without loss.
    """
    parent: dict[tuple[str, int], tuple[str, int]] = {}

    def find(x):
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    forest = []
    for i, j in support:
        a, b = find(("r", i)), find(("c", j))
        if a != b:
            parent[a] = b
            forest.append((i, j))
    return forest


def bounded_fractions(bound: int) -> list[Fraction]:
    """Distinct positive fractions ``a/b`` with ``1 <= a, b <= bound``."""
    return sorted({Fraction(a, b) for a in range(1, bound + 1) for b in range(1, bound + 1)})


def brute_min_rank(S: SignPattern, field: FieldTag = Q, denominator_bound: int = 3) -> int:
    """Smallest rank found among small-fraction matrices with pattern ``S``.

    A search-bounded upper approximation of the minimum rank, meant as a
    test oracle.  A spanning forest of the support is pinned to ``+-1``
    and the remaining support entries range over ``+-a/b`` with
    ``a, b <= denominator_bound`` (signs from ``S``).
    """
    if S.rows > 3 or S.cols > 3 or denominator_bound > 8:
        raise InstanceTooLarge("brute_min_rank handles at most 3x3 patterns and bound 8")
    support = S.support()
    if not support:
        return 0
    forest = set(spanning_forest(support))
    free = [pos for pos in support if pos not in forest]
    values = bounded_fractions(denominator_bound)
    base = [[Fraction(0)] * S.cols for _ in range(S.rows)]
    for i, j in forest:
        base[i][j] = Fraction(int(S[i, j]))
    best = min(S.rows, S.cols)
    for combo in itertools.product(values, repeat=len(free)):
        for (i, j), v in zip(free, combo):
            base[i][j] = v * int(S[i, j])
        r = ExactMatrix(field, [[Scalar(field, x) for x in row] for row in base], cols=S.cols).rank()
        if r < best:
            best = r
            if best == 1:
                break
    return best
