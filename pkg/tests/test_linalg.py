import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import SQRT2, SQRT5, low_rank, modular_rank, rand_matrix
from signrank.errors import ParseError, ShapeMismatch, StructuralError
from signrank.linalg import (
    LEFT,
    ExactMatrix,
    assemble_block,
    kernel,
    rank,
    rref,
    scale_line,
    solve_with_free,
)
from signrank.patterns import negate_lines, sign_of
from signrank.scalars import Q, Scalar


def M(rows, field=Q):
    return ExactMatrix(field, rows)


def phi_matrix():
    phi = SQRT5(Fraction(1, 2), Fraction(1, 2))
    return ExactMatrix(SQRT5, [[1, phi], [phi, phi + 1]])


def test_rank_examples():
    assert phi_matrix().rank() == 1
    assert ExactMatrix.identity(Q, 3).rank() == 3
    assert M([[0, 1, 1], [1, 0, 1], [1, -1, 0]]).rank() == 2
    assert ExactMatrix.zeros(SQRT2, 2, 3).rank() == 0
    assert rank(M([[1, 2], [2, 4]])) == 1


def test_kernel_examples():
    assert len(kernel(M([[1, 1, 1, 1]])).vectors) == 3
    (v,) = kernel(M([[1, 2], [2, 4]])).vectors
    assert v[0] == -2 * v[1] and v[1]


def test_kernel_of_corank2_example():
    r2 = SQRT2(0, 1)
    A = ExactMatrix(SQRT2, [[1, r2, 0, 1 + r2], [0, 1, 1, 1], [1, 1 + r2, 1, 2 + r2]])
    K = kernel(A)
    assert len(K.vectors) == 2
    assert (A @ K.as_columns(SQRT2, 4)).is_zero()


def test_left_kernel():
    A = M([[1, 2], [2, 4], [0, 1]])
    (u,) = kernel(A, LEFT).vectors
    assert not any(A.apply_left(u))


def test_kernel_is_reduced_echelon():
    rng = random.Random(3)
    A = low_rank(rng, SQRT5, 3, 7, 2)
    vecs = kernel(A).vectors
    leads = [next(j for j, x in enumerate(v) if x) for v in vecs]
    assert len(set(leads)) == len(vecs) == 5
    for v, lead in zip(vecs, leads):
        assert v[lead] == 1
        assert all(not w[lead] for w in vecs if w is not v)


def test_solve_with_free_examples():
    C = M([[1], [1], [1]])
    x = solve_with_free(C, {1: Scalar(Q, Fraction(1, 2)), 2: Scalar(Q, Fraction(1, 4))}, [0, 1, 2])
    assert x == [Fraction(-3, 4), Fraction(1, 2), Fraction(1, 4)]
    C = M([[1, 0], [0, 1], [0, 0]])
    assert solve_with_free(C, {2: Scalar(Q, 5)}, [0, 1, 2]) == [0, 0, 5]


def test_solve_with_free_random_residual():
    rng = random.Random(11)
    for _ in range(20):
        C = rand_matrix(rng, Q, 5, 2)
        if C.rank() < 2:
            continue
        _, piv = rref(C.transpose())
        free = {j: Scalar(Q, rng.randint(-5, 5)) for j in range(5) if j not in piv}
        x = solve_with_free(C, free, range(5))
        assert not any(C.apply_left(x))


def test_solve_with_free_errors():
    C = M([[1], [1]])
    with pytest.raises(StructuralError):
        solve_with_free(C, {}, [0, 1])
    with pytest.raises(StructuralError):
        solve_with_free(M([[0], [1]]), {1: Scalar(Q, 1)}, [0, 1], pivots=[0])


def test_scale_line():
    A = M([[1, -2]])
    assert scale_line(A, 0, "row", 3) == M([[3, -6]])
    flipped = scale_line(A, 0, "row", -1)
    assert flipped == M([[-1, 2]])
    assert sign_of(flipped) == negate_lines(sign_of(A), rows=[0])


def test_assemble_block_shape():
    A = assemble_block(M([[1]]), M([[2, 3]]), M([[4], [5]]))
    assert A == M([[1, 2, 3], [4, 0, 0], [5, 0, 0]])
    with pytest.raises(ShapeMismatch):
        assemble_block(M([[1]]), M([[2], [3]]), M([[4]]))


def test_ragged_rejected():
    with pytest.raises(ShapeMismatch):
        M([[1, 2], [3]])


def test_json_round_trip():
    A = rand_matrix(random.Random(5), SQRT2, 3, 4, density=0.6)
    assert ExactMatrix.from_json(A.to_json()) == A
    B = M([[Fraction(3, 4), 0]])
    assert ExactMatrix.from_dict(B.to_dict()) == B


@pytest.mark.parametrize(
    "doc",
    [
        {"field": "Q", "rows": 1, "cols": 2, "entries": [["1"]]},
        {"field": "Q", "rows": 1, "cols": 1, "entries": [["x"]]},
        {"field": "Q(sqrt:4)", "rows": 1, "cols": 1, "entries": [[["1", "0"]]]},
        {"rows": 1},
    ],
)
def test_bad_documents(doc):
    with pytest.raises((ParseError, ValueError)):
        ExactMatrix.from_dict(doc)


@settings(max_examples=80, deadline=None)
@given(
    st.integers(1, 6),
    st.integers(1, 6),
    st.integers(0, 6),
    st.integers(0, 2**32),
)
def test_rank_matches_modular_oracle(m, n, r, seed):
    rng = random.Random(seed)
    A = low_rank(rng, Q, m, n, min(r, m, n))
    assert A.rank() == modular_rank([[x.a for x in row] for row in A.entries])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.integers(0, 4), st.integers(0, 2**32))
def test_rank_nullity(m, n, r, seed):
    A = low_rank(random.Random(seed), SQRT5, m, n, min(r, m, n))
    assert A.rank() + len(kernel(A).vectors) == n
    assert A.rank() == A.transpose().rank()
