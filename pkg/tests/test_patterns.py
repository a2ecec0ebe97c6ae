import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from signrank.errors import InstanceTooLarge, ParseError
from signrank.linalg import ExactMatrix
from signrank.patterns import (
    SignPattern,
    block_decompose,
    brute_min_rank,
    negate_lines,
    sign_of,
    spanning_forest,
    term_rank,
)
from signrank.scalars import FieldTag, Q, Sign


def P(*lines):
    return SignPattern.parse(lines)


def brute_cover_size(S: SignPattern) -> int:
    """Smallest set of lines covering the support, by enumeration."""
    lines = [("r", i) for i in range(S.rows)] + [("c", j) for j in range(S.cols)]
    supp = S.support()
    for k in range(len(lines) + 1):
        for chosen in itertools.combinations(lines, k):
            rows = {i for kind, i in chosen if kind == "r"}
            cols = {j for kind, j in chosen if kind == "c"}
            if all(i in rows or j in cols for i, j in supp):
                return k
    raise AssertionError("unreachable")


patterns = st.integers(1, 5).flatmap(
    lambda m: st.integers(1, 5).flatmap(
        lambda n: st.lists(
            st.lists(st.sampled_from([-1, 0, 0, 1]), min_size=n, max_size=n), min_size=m, max_size=m
        )
    )
).map(SignPattern)


def test_sign_of_examples():
    from fractions import Fraction

    A = ExactMatrix(Q, [[Fraction(3, 2), -2], [0, 7]])
    assert sign_of(A) == P("+-", "0+")
    K = FieldTag(2)
    assert sign_of(ExactMatrix(K, [[K(1, -1)]])) == P("-")
    assert sign_of(ExactMatrix.zeros(K, 2, 2)) == P("00", "00")


def test_term_rank_examples():
    assert term_rank(P("+00", "0+0", "00+"))[0] == 3
    t, matching, cover = term_rank(P("+++", "+00", "+00"))
    assert t == 2
    assert cover.row_set == {0} and cover.col_set == {0}
    t, matching, cover = term_rank(P("00", "00"))
    assert t == 0 and not matching.pairs and len(cover) == 0


@settings(max_examples=200, deadline=None)
@given(patterns)
def test_konig_against_enumeration(S):
    t, matching, cover = term_rank(S)
    matching.verify(S)
    cover.verify(S)
    assert t == len(matching.pairs) == len(cover) == brute_cover_size(S)


def test_block_decompose_examples():
    S = P("++++", "++++", "++00", "++00")
    dec = block_decompose(S)
    assert (dec.p, dec.q) == (2, 2)
    dec = block_decompose(P("+++", "+++", "+++"))
    assert dec.p + dec.q == 3


@settings(max_examples=150, deadline=None)
@given(patterns)
def test_block_decompose_invariants(S):
    dec = block_decompose(S)
    assert sorted(dec.row_perm) == list(range(S.rows))
    assert sorted(dec.col_perm) == list(range(S.cols))
    assert not any(S[i, j] for i in dec.uncovered_rows for j in dec.uncovered_cols)
    D = S.submatrix(dec.uncovered_rows, dec.covered_cols)
    C = S.submatrix(dec.covered_rows, dec.uncovered_cols)
    assert term_rank(D)[0] == dec.q
    assert term_rank(C)[0] == dec.p


def test_negate_lines():
    S = P("+-", "0+")
    assert negate_lines(S, rows=[0]) == P("-+", "0+")
    assert negate_lines(S, rows=[0], cols=[0]) == P("++", "0+")
    assert negate_lines(S, cols=[1]) == P("++", "0-")


def test_spanning_forest_is_acyclic_and_spanning():
    rng = random.Random(4)
    for _ in range(50):
        supp = [(i, j) for i in range(5) for j in range(5) if rng.random() < 0.5]
        forest = spanning_forest(supp)
        lines = {("r", i) for i, _ in supp} | {("c", j) for _, j in supp}
        parent = {x: x for x in lines}

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        for i, j in supp:
            parent[find(("r", i))] = find(("c", j))
        components = len({find(x) for x in lines})
        assert len(forest) == len(lines) - components


@pytest.mark.parametrize(
    "S, expected",
    [
        (P("++", "++"), 1),
        (P("+00", "0+0", "00+"), 3),
        (P("++", "+-"), 2),
        (P("00", "00"), 0),
    ],
)
def test_brute_min_rank(S, expected):
    assert brute_min_rank(S) == expected


def test_brute_min_rank_too_large():
    with pytest.raises(InstanceTooLarge):
        brute_min_rank(SignPattern([[1] * 4]))


def test_pattern_json():
    S = P("+-0", "0+-")
    assert SignPattern.from_dict(S.to_dict()) == S
    assert SignPattern.from_dict({"rows": 1, "cols": 2, "pattern": ["+−"]}) == P("+-")
    with pytest.raises(ParseError):
        SignPattern.from_dict({"rows": 1, "cols": 2, "pattern": ["+x"]})
    with pytest.raises(ParseError):
        SignPattern.from_dict({"rows": 2, "cols": 2, "pattern": ["++"]})


def test_sign_enum():
    assert Sign.from_char("−") is Sign.MINUS
    assert Sign.MINUS * Sign.MINUS is Sign.PLUS
    assert -Sign.ZERO is Sign.ZERO
