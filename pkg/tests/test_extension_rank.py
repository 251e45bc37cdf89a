import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import rank_laurent, rank_qq
from sylvan.errors import InvalidInput, NotStabilized
from sylvan.extension_rank import (
    as_rank_function,
    compress,
    fp_module_dim,
    limit_rank,
    window_rank,
    window_rank_properties,
)
from sylvan.linalg import Matrix, parse_matrix
from sylvan.rank_functions import MatrixSampler, convex_combine, product_ring_rank
from sylvan.rings import FiniteAlgebra, FiniteGroup, LinearAutomorphism, ProductRing, TensorExtension, ZdGroup
from sylvan.rings.extensions import CrossedProduct
from sylvan.scalars import QQ
from sylvan.windows import MonomialWindow, SubspaceWindow, box_window, window_sum

QxQ = ProductRing(QQ, 2)


def laurent(rng, lo=-2, hi=2):
    return {(e,): QQ(rng.randint(-3, 3)) for e in range(lo, hi + 1) if rng.random() < 0.6}


def random_qz(ext, rng, n, m):
    return Matrix(ext, [[ext.element(laurent(rng)) for _ in range(m)] for _ in range(n)], n, m)


# --- compression goldens ---------------------------------------------------


def test_compress_bidiagonal(qz):
    A = parse_matrix("[[1 - z]]", qz)
    res = compress(A, box_window(qz, 5))
    assert res.hull == box_window(qz, 6)
    assert (res.B.nrows, res.B.ncols) == (5, 6)
    expect = [[1 if j == k else -1 if j == k + 1 else 0 for j in range(6)] for k in range(5)]
    assert [list(r) for r in res.B.rows] == expect
    assert (res.rank_value, res.normalized) == (5, 1)


def test_compress_identity_and_zero(qz):
    W = box_window(qz, 7)
    assert compress(Matrix.identity(qz, 1), W).rank_value == 7
    assert compress(Matrix.zeros(qz, 1, 1), W).rank_value == 0


def test_compress_row_order(qz):
    A = parse_matrix("[[1, z], [0, 2]]", qz)
    B = compress(A, box_window(qz, 2)).B
    # row (k, i) = k * n + i ; column (q, j) = q * m + j over hull z^0..z^2
    assert list(B.rows[0]) == [1, 0, 0, 1, 0, 0]
    assert list(B.rows[1]) == [0, 2, 0, 0, 0, 0]
    assert list(B.rows[2]) == [0, 0, 1, 0, 0, 1]


def test_compress_errors(qz, qz2):
    A = parse_matrix("[[1]]", qz)
    with pytest.raises(InvalidInput):
        compress(A, MonomialWindow(qz, []))
    with pytest.raises(InvalidInput):
        compress(A, box_window(qz2, 2))
    with pytest.raises(InvalidInput):
        compress(parse_matrix("[[z]]", qz), box_window(qz, 2), hull=box_window(qz, 2))


@given(st.integers(0, 10_000), st.integers(1, 3), st.integers(1, 3), st.integers(1, 8))
def test_compress_shape_invariants(seed, n, m, N):
    from sylvan.rank_functions import FieldRank

    ext = CrossedProduct(QQ, ZdGroup(1), rank=FieldRank(QQ))
    A = random_qz(ext, random.Random(seed), n, m)
    res = compress(A, box_window(ext, N))
    assert res.B.nrows == n * N and res.B.ncols == m * res.hull.dim
    assert 0 <= res.rank_value <= min(res.B.nrows, res.B.ncols)
    assert res.rank_value == rank_qq(res.B.rows)


def test_window_rank_properties_examples(qz):
    A = parse_matrix("[[1 - z]]", qz)
    rep = window_rank_properties(A, A, box_window(qz, 4), box_window(qz, 8))
    assert all(v["pass"] for v in rep.values())
    assert rep["monotone"] == {"pass": True, "rk_W(A)": "4", "rk_V(A)": "8", "upper": "8"}
    Z = Matrix.zeros(qz, 2, 2)
    rep = window_rank_properties(Z, Z, box_window(qz, 3), box_window(qz, 5), C=Z)
    assert rep["block_diagonal"]["rk_W(diag)"] == "0" and rep["block_triangular"]["rk_W(T)"] == "0"
    with pytest.raises(InvalidInput):
        window_rank_properties(A, A, box_window(qz, 8), box_window(qz, 4))


@given(st.integers(0, 10_000))
def test_window_rank_properties_random(seed):
    from sylvan.rank_functions import FieldRank

    ext = CrossedProduct(QQ, ZdGroup(1), rank=FieldRank(QQ))
    rng = random.Random(seed)
    A, B = random_qz(ext, rng, 2, 2), random_qz(ext, rng, 1, 2)
    C = random_qz(ext, rng, 2, 2)
    W = box_window(ext, rng.randint(1, 5), start=rng.randint(-3, 3))
    V = window_sum(W, box_window(ext, rng.randint(1, 9), start=-4))
    rep = window_rank_properties(A, B, W, V, C)
    assert all(v["pass"] for v in rep.values()), rep


# --- limits ---------------------------------------------------------------


def test_limit_examples(qz):
    rep = limit_rank(parse_matrix("[[1 - z]]", qz), "box:4,8,16,32")
    assert rep.stabilized and rep.stabilized_value == 1 and rep.values == [1, 1, 1]
    rep = limit_rank(Matrix.zeros(qz, 1, 1), "box:4,8,16")
    assert rep.stabilized_value == 0 and rep.running_inf == 0


def test_limit_finite_group():
    from sylvan.rank_functions import FieldRank

    G = CrossedProduct(QQ, FiniteGroup.cyclic(2), rank=FieldRank(QQ))
    A = parse_matrix("[[1 + s]]", G)
    res = compress(A, MonomialWindow(G, [0, 1]))
    assert [list(r) for r in res.B.rows] == [[1, 1], [1, 1]]
    rep = limit_rank(A, "group:full")
    assert (rep.stabilized, rep.rule, rep.stabilized_value) == (True, "total-window", Fraction(1, 2))


def test_limit_not_stabilized_is_a_report(qz):
    rep = limit_rank(parse_matrix("[[1 - z]]", qz), "box:4,8")
    assert not rep.stabilized and rep.stabilized_value is None and rep.running_inf == 1


def test_limit_argument_errors(qz):
    A = parse_matrix("[[1]]", qz)
    with pytest.raises(InvalidInput):
        limit_rank(A, "box:4,8", kappa=1)
    with pytest.raises(InvalidInput):
        limit_rank(A, "box:4,8", tol=-1)
    with pytest.raises(InvalidInput):
        limit_rank(A, "box:4,8", rules=("bogus",))


def test_marginal_rule(qz):
    # a 2x1 column [1, z]: rk_W = dim W + 1 on boxes, so rk/dim never settles exactly
    A = parse_matrix("[[1], [z]]", qz)
    rep = limit_rank(A, "box:2^k,k=2..7", rules=("normalized",))
    assert not rep.stabilized
    rep = limit_rank(A, "box:2^k,k=2..7")
    assert rep.rule == "marginal" and rep.stabilized_value == 1
    assert rep.stabilized_value < rep.running_inf


@given(st.integers(0, 10_000))
def test_running_inf(seed):
    from sylvan.rank_functions import FieldRank

    ext = CrossedProduct(QQ, ZdGroup(1), rank=FieldRank(QQ))
    A = random_qz(ext, random.Random(seed), 2, 2)
    rep = limit_rank(A, "box:2^k,k=2..6", exhaust=True, rules=("normalized",))
    infs = [min(rep.values[: i + 1]) for i in range(len(rep.values))]
    assert rep.running_inf == infs[-1]
    assert infs == sorted(infs, reverse=True)
    if rep.stabilized:
        assert rep.stabilized_value == rep.running_inf


def test_limit_matches_oracle(qz):
    rng = random.Random(7)
    for _ in range(5):
        A = random_qz(qz, rng, 2, 2)
        texts = [[qz.format(x).replace("z^-", "z**-") for x in r] for r in A.rows]
        rep = limit_rank(A, "box:2^k,k=2..7", exhaust=True)
        assert rep.stabilized_value == rank_laurent(texts)


def test_jobs_do_not_change_the_report(qz):
    A = parse_matrix("[[1 - z, z^2], [2, 1 + z]]", qz)
    one = limit_rank(A, "box:2^k,k=2..6", exhaust=True).to_json()
    many = limit_rank(A, "box:2^k,k=2..6", exhaust=True, jobs=3).to_json()
    assert one == many


# --- as a rank function ---------------------------------------------------


def test_as_rank_function(qz):
    rk = as_rank_function(qz, "box:2^k,k=2..6")
    assert rk(Matrix.identity(qz, 1)) == 1
    assert rk(Matrix.zeros(qz, 0, 3)) == 0
    with pytest.raises(NotStabilized) as e:
        as_rank_function(qz, "box:4,8")(parse_matrix("[[1 - z]]", qz))
    assert e.value.report is not None


@given(st.integers(0, 10_000))
def test_extension_property(seed):
    from sylvan.rank_functions import FieldRank

    ext = CrossedProduct(QQ, ZdGroup(1), rank=FieldRank(QQ))
    A = MatrixSampler(QQ, max_size=3).matrix(random.Random(seed), 3, 2)
    assert as_rank_function(ext, "box:2,4,8")(A) == rank_qq(A.rows)


def test_fp_module_dim(qz):
    sched = "box:2^k,k=2..5"
    assert fp_module_dim(parse_matrix("[[1 - z]]", qz), sched) == 0
    assert fp_module_dim(Matrix.zeros(qz, 1, 1), sched) == 1
    assert fp_module_dim(parse_matrix("[[2]]", qz), sched) == 0
    assert fp_module_dim(parse_matrix("[[1 - z, 0]]", qz), sched) == 1


# --- window-level invariants --------------------------------------------------


def _qi():
    from sylvan.rank_functions import FieldRank

    return TensorExtension(FiniteAlgebra.gaussian_rationals(QQ), QQ, rank=FieldRank(QQ))


@given(st.integers(0, 10_000))
def test_basis_independence(seed):
    rng = random.Random(seed)
    S = _qi()
    A = Matrix(S, [[S.random_element(rng) for _ in range(2)] for _ in range(2)], 2, 2)
    W = SubspaceWindow(S, [{0: QQ(1), 1: QQ(rng.randint(-2, 2))}])
    hull = W.hull([0, 1])
    d = hull.dim
    while True:
        P = [[QQ(rng.randint(-2, 2)) for _ in range(d)] for _ in range(d)]
        if rank_qq(P) == d:
            break
    base = compress(A, W).rank_value
    assert compress(A, W, hull=hull.with_basis(P)).rank_value == base
    assert compress(A, W.with_basis([[QQ(3)]]), hull=hull.with_basis(P)).rank_value == base


def swap_ring(weights=("1/2", "1/2")):
    return CrossedProduct(QxQ, ZdGroup(1), action=[LinearAutomorphism.permutation(QxQ, [1, 0])],
                          rank=product_ring_rank(list(weights)))


def random_qxq_z(ext, rng, n, m):
    def el():
        return ext.element({(e,): QxQ.element(rng.randint(-2, 2), rng.randint(-2, 2))
                            for e in range(-2, 3) if rng.random() < 0.5})
    return Matrix(ext, [[el() for _ in range(m)] for _ in range(n)], n, m)


@given(st.integers(0, 10_000), st.integers(-6, 6))
def test_sigma_invariance(seed, g):
    S = swap_ring()
    A = random_qxq_z(S, random.Random(seed), 2, 2)
    W = box_window(S, 4)
    assert window_rank(A, W.translate((g,))) == window_rank(A, W)


@given(st.integers(0, 10_000))
def test_separated_additivity(seed):
    S = swap_ring()
    A = random_qxq_z(S, random.Random(seed), 2, 2)
    W1, W2 = box_window(S, 5), box_window(S, 5, start=20)
    assert window_rank(A, window_sum(W1, W2)) == window_rank(A, W1) + window_rank(A, W2)


@given(st.integers(0, 10_000), st.sampled_from([Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)]))
def test_affinity(seed, lam):
    rk1, rk2 = product_ring_rank([1, 0]), product_ring_rank([0, 1])
    S = CrossedProduct(QxQ, ZdGroup(1), rank=rk1)
    A = random_qxq_z(S, random.Random(seed), 2, 2)
    W = box_window(S, 6, start=-1)
    mix = convex_combine([(lam, rk1), (1 - lam, rk2)])
    assert window_rank(A, W, mix) == lam * window_rank(A, W, rk1) + (1 - lam) * window_rank(A, W, rk2)
