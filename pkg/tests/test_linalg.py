import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sylvan.errors import InvalidInput, ParseError
from sylvan.linalg import (
    Matrix,
    bareiss_rank,
    generic_rank,
    matrix_from_json,
    matrix_to_json,
    parse_matrix,
    rank_field,
    rank_float,
    row_reduce,
)
from sylvan.linalg import inverse_matrix
from sylvan.scalars import QQ, MultiPoly, PrimeField, RationalFunctionField

from oracles import rank_laurent, rank_qq

GF7 = PrimeField(7)
pool = st.sampled_from([Fraction(x) for x in (0, 0, 1, -1, 2, -2)] + [Fraction(1, 2)])


def qmatrices(max_n=8):
    return st.integers(0, max_n).flatmap(
        lambda n: st.integers(0, max_n).flatmap(
            lambda m: st.lists(st.lists(pool, min_size=m, max_size=m), min_size=n, max_size=n).map(
                lambda rows: Matrix(QQ, rows, n, m)
            )
        )
    )


def test_rank_field_examples():
    assert rank_field(Matrix.zeros(QQ, 3, 4)) == 0
    assert rank_field(Matrix.identity(GF7, 5)) == 5
    assert rank_field(Matrix(QQ, [[1, -1, 0], [0, 1, -1]])) == 2
    assert rank_field(Matrix(QQ, [], 0, 4)) == 0


def test_rank_float_examples():
    assert rank_float([[1, 1], [1, 1]]) == 1
    assert rank_float([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 3
    assert rank_float([[1e-12]], rel_tol=1e-8) == 1
    assert rank_float([[0, 0]]) == 0
    with pytest.raises(InvalidInput):
        rank_float([[float("nan")]])


@given(qmatrices())
def test_rank_matches_oracle_and_transpose(A):
    r = rank_field(A)
    assert r == rank_qq(A.rows)
    assert r == rank_field(A.transpose())
    assert r == bareiss_rank(A)


@given(qmatrices())
def test_rank_float_matches_exact(A):
    assert rank_float(A) == rank_field(A)


def test_generic_rank_examples():
    K = RationalFunctionField(QQ, ["z"])
    one_minus_z = Matrix(K, [[K.parse("1 - z")]])
    assert generic_rank(one_minus_z).rank == 1
    zz = Matrix(K, [[K.parse("z"), K.parse("z")], [K.parse("z"), K.parse("z")]])
    assert generic_rank(zz).rank == 1
    assert generic_rank(Matrix.zeros(QQ, 2, 2)).rank == 0


def test_generic_rank_reports_bound():
    K = RationalFunctionField(QQ, ["z"])
    A = Matrix(K, [[K.parse("z^3 - 1"), K.parse("1/z")]])
    res = generic_rank(A)
    assert res.rank == 1
    assert 0 < res.error_bound < Fraction(1, 10**15)
    assert len(res.primes) >= 1


@given(st.lists(st.lists(st.integers(-2, 2), min_size=3, max_size=3), min_size=2, max_size=2),
       st.integers(-5, 5))
def test_generic_rank_dominates_point_ranks(coeffs, x):
    # entries a + b z + c z^2 over Q(z)
    texts = [[f"{a} + {b}*z + {c}*z^2" for a, b, c in [row, row[::-1]]] for row in coeffs]
    K = RationalFunctionField(QQ, ["z"])
    A = Matrix(K, [[K.parse(s) for s in r] for r in texts])
    g = generic_rank(A, rng=random.Random(1)).rank
    assert g == rank_laurent(texts)
    point = Matrix(QQ, [[MultiPoly.parse(s, QQ, ["z"]).evaluate([Fraction(x)]) for s in r] for r in texts])
    assert g >= rank_field(point)


def test_row_reduce_and_inverse():
    rows = [[QQ(2), QQ(1)], [QQ(4), QQ(3)]]
    red, piv = row_reduce(rows, QQ)
    assert piv == [0, 1]
    inv = inverse_matrix(rows, QQ)
    prod = Matrix(QQ, rows) @ Matrix(QQ, inv)
    assert prod == Matrix.identity(QQ, 2)
    with pytest.raises(InvalidInput):
        inverse_matrix([[QQ(1), QQ(2)], [QQ(2), QQ(4)]], QQ)


def test_matrix_json_round_trip():
    A = parse_matrix("[[1/2, -3], [0, 7]]", QQ)
    obj = matrix_to_json(A)
    assert obj == {"rows": 2, "cols": 2, "entries": [["1/2", "-3"], ["0", "7"]]}
    assert matrix_from_json(obj, QQ) == A


def test_matrix_parse_errors():
    with pytest.raises(ParseError):
        parse_matrix('{"rows": 1, "cols": 2, "entries": [["1"]]}', QQ)
    with pytest.raises(ParseError):
        parse_matrix('{"rows": 1, "cols": 1, "entries": [["1 +"]]}', QQ)
    with pytest.raises(ParseError):
        parse_matrix("[[1, 2], [3]]", QQ)


def test_block_helpers():
    A = Matrix.identity(QQ, 2)
    B = Matrix(QQ, [[5]])
    D = Matrix.block_diag(A, B)
    assert D.shape == (3, 3) and rank_field(D) == 3
    T = Matrix.blocks([[A, None], [None, B]], QQ)
    assert T == D
    P = Matrix.permutation(QQ, [2, 0, 1])
    assert rank_field(P @ D) == 3
