"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

import random
from fractions import Fraction

from signrank.linalg import ExactMatrix, assemble_block
from signrank.patterns import term_rank, sign_of
from signrank.realization import bilinear, block_rank_condition
from signrank.scalars import FieldTag, Scalar

SQRT2 = FieldTag(2)
SQRT5 = FieldTag(5)

# three 61-bit primes for the modular rank oracle
PRIMES = (2305843009213693951, 2305843009213693921, 2305843009213693907)


def rand_fraction(rng: random.Random, size: int = 9, nonzero: bool = False) -> Fraction:
    while True:
        x = Fraction(rng.randint(-size, size), rng.randint(1, size))
        if x or not nonzero:
            return x


def rand_scalar(rng: random.Random, field: FieldTag, size: int = 9, nonzero: bool = False) -> Scalar:
    while True:
        b = rand_fraction(rng, size) if not field.is_rational else 0
        x = Scalar(field, rand_fraction(rng, size), b)
        if x or not nonzero:
            return x


def rand_matrix(rng, field, m, n, density=1.0, size=9) -> ExactMatrix:
    return ExactMatrix(
        field,
        [[rand_scalar(rng, field, size) if rng.random() < density else 0 for _ in range(n)] for _ in range(m)],
        cols=n,
    )


def modular_rank(rows: list[list[Fraction]]) -> int:
    """Rank over Q as the maximum of ranks modulo three large primes."""
    best = 0
    for p in PRIMES:
        M = []
        for row in rows:
            if any(x.denominator % p == 0 for x in row):
                break
            M.append([x.numerator * pow(x.denominator, -1, p) % p for x in row])
        else:
            r = 0
            ncols = len(M[0]) if M else 0
            for c in range(ncols):
                piv = next((i for i in range(r, len(M)) if M[i][c]), None)
                if piv is None:
                    continue
                M[r], M[piv] = M[piv], M[r]
                inv = pow(M[r][c], -1, p)
                M[r] = [x * inv % p for x in M[r]]
                for i in range(len(M)):
                    if i != r and M[i][c]:
                        f = M[i][c]
                        M[i] = [(x - f * y) % p for x, y in zip(M[i], M[r])]
                r += 1
            best = max(best, r)
    return best


def low_rank(rng, field, m, n, r, size=5) -> ExactMatrix:
    """Random ``m x n`` product of rank at most ``r`` (generically exactly ``r``)."""
    if r == 0:
        return ExactMatrix.zeros(field, m, n)
    return rand_matrix(rng, field, m, r, size=size) @ rand_matrix(rng, field, r, n, size=size)


def _shuffle(rng, A: ExactMatrix) -> ExactMatrix:
    rp = list(range(A.rows))
    cp = list(range(A.cols))
    rng.shuffle(rp)
    rng.shuffle(cp)
    return A.permute(rp, cp)


def block_fixture(rng: random.Random, field: FieldTag, gap: int, max_side: int = 8) -> ExactMatrix:
    """Matrix ``[[B, C], [D, 0]]`` with rank exactly ``term_rank - gap``.

    ``C`` is ``p x s`` and ``D`` is ``r x q`` with full support, so the term
    rank is ``p + q``.  For ``gap == 2`` the corank-one case fixes one
    entry of ``B`` so that ``u^T B v = 0``; the other variants lower the
    rank of one block by two instead.
    """
    while True:
        p = rng.randint(1, 3)
        q = rng.randint(1, 3)
        s = rng.randint(p, min(p + 2, max_side - q))
        r = rng.randint(q, min(q + 2, max_side - p))
        if s < p or r < q:
            continue
        variant = rng.choice(["exact", "low_d", "low_c"]) if gap == 2 else "exact"
        rank_c = {0: p, 1: p - 1, 2: p - 1}[gap]
        rank_d = {0: q, 1: q - 1, 2: q - 1}[gap]
        if variant == "low_d":
            rank_c, rank_d = p, q - 2
        elif variant == "low_c":
            rank_c, rank_d = p - 2, q
        if rank_c < 0 or rank_d < 0:
            continue
        C = low_rank(rng, field, p, s, rank_c)
        D = low_rank(rng, field, r, q, rank_d)
        B = rand_matrix(rng, field, p, q, density=0.7)
        if gap == 2 and variant == "exact":
            u, v = block_rank_condition(C, D)
            spots = [(i, j) for i in range(p) for j in range(q) if u[i] and v[j]]
            if not spots:
                continue
            i, j = rng.choice(spots)
            rest = bilinear(u, B.replace(i, j, 0), v)
            B = B.replace(i, j, -rest / (u[i] * v[j]))
        A = assemble_block(B, C, D)
        t = term_rank(sign_of(A))[0]
        if t == p + q and A.rank() == t - gap:
            return _shuffle(rng, A)


def corank2_fixture(rng: random.Random, field: FieldTag, max_cols: int = 8) -> ExactMatrix:
    """Matrix of rank ``cols - 2`` whose rows vanish on an irrational 2-dim kernel."""
    while True:
        n = rng.randint(3, max_cols)
        m = rng.randint(n - 2, n + 1)
        K = rand_matrix(rng, field, n, 2)
        if K.rank() != 2:
            continue
        rows = []
        for _ in range(m):
            k = rng.randint(3, n)
            supp = sorted(rng.sample(range(n), k))
            row = [field.zero()] * n
            for j in supp[2:]:
                row[j] = rand_scalar(rng, field, nonzero=True)
            # solve for the two leading support entries so that row . K = 0
            a, b = supp[0], supp[1]
            r0 = [sum((row[j] * K[j, c] for j in supp[2:]), field.zero()) for c in range(2)]
            det = K[a, 0] * K[b, 1] - K[a, 1] * K[b, 0]
            if not det:
                break
            row[a] = (-r0[0] * K[b, 1] + r0[1] * K[b, 0]) / det
            row[b] = (-r0[1] * K[a, 0] + r0[0] * K[a, 1]) / det
            if not row[a] or not row[b]:
                break
            rows.append(row)
        else:
            A = ExactMatrix(field, rows, cols=n)
            if A.rank() == n - 2 and not A.is_rational():
                return A


def oracle_rank(A: ExactMatrix) -> int:
    """Rank via the regular representation over Q and the modular oracle.

    ``a + b sqrt d`` acts on Q^2 as ``[[a, d b], [b, a]]``; the rational
    rank of the block matrix is twice the rank over Q(sqrt d).
    """
    if A.field.is_rational:
        return modular_rank([[x.a for x in row] for row in A.entries])
    d = A.field.d
    rows = []
    for row in A.entries:
        rows.append([v for x in row for v in (x.a, d * x.b)])
        rows.append([v for x in row for v in (x.b, x.a)])
    r = modular_rank(rows)
    assert r % 2 == 0
    return r // 2
