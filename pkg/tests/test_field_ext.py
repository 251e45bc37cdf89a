import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import rank_qq
from sylvan.errors import InvalidInput, NotStabilized
from sylvan.extension_rank import limit_rank
from sylvan.field_ext import (
    CompanionRank,
    CompanionRep,
    algebraic_ext_rank,
    algebraic_window_value,
    blow_up,
    composition_check,
    default_points,
    embed_finite,
    eval_point_limit,
    evaluate_at,
    finite_then_t_tower,
    monic_sequence_limit,
    power_poly,
    rk_f,
    rk_f_by_roots,
    roots_poly,
    t_then_u_tower,
)
from sylvan.linalg import Matrix
from sylvan.rank_functions import FieldRank, check_axioms, matrix_ring_rank, product_ring_rank
from sylvan.rings import FiniteAlgebra, MatrixRing, ProductRing, TensorExtension
from sylvan.rings.extensions import poly_ext
from sylvan.scalars import QQ, PrimeField


def tpoly(ext, rng, deg=2, pool=(-2, -1, 0, 1, 2)):
    return ext.element({k: ext.base.random_element(rng, pool) for k in range(deg + 1) if rng.random() < 0.7})


def random_poly_matrix(ext, rng, n, m, deg=2):
    return Matrix(ext, [[tpoly(ext, rng, deg) for _ in range(m)] for _ in range(n)], n, m)


def test_psi_explicit(qt):
    # t - 1 modulo t^4: the shift minus the identity, lower triangular with -1 on the diagonal
    rep = CompanionRep(power_poly(QQ, 4), qt)
    M = rep.psi(qt.matrix("[[t - 1]]").rows[0][0])
    assert [[int(x) for x in r] for r in M] == [
        [-1, 1, 0, 0], [0, -1, 1, 0], [0, 0, -1, 1], [0, 0, 0, -1]]
    assert rank_qq(M) == 4


@given(st.integers(0, 10_000), st.integers(1, 5))
def test_psi_is_a_unital_homomorphism(seed, d):
    qt = poly_ext(QQ, rank=FieldRank(QQ))
    rng = random.Random(seed)
    f = [QQ(rng.randint(-3, 3)) for _ in range(d)] + [QQ(1)]
    rep = CompanionRep(f, qt)
    a, b = tpoly(qt, rng, 4), tpoly(qt, rng, 4)
    P = lambda x: Matrix(QQ, rep.psi(x), d, d)  # noqa: E731
    assert P(qt.one) == Matrix.identity(QQ, d)
    assert P(a + b) == P(a) + P(b)
    assert P(a * b) == P(a) @ P(b)


def test_companion_errors(qt):
    with pytest.raises(InvalidInput):
        CompanionRep([QQ(1), QQ(2)], qt)  # 1 + 2t is not monic
    with pytest.raises(InvalidInput):
        CompanionRep([QQ(3)], qt)


def test_rk_f_examples(qt):
    f = roots_poly(QQ, [1, -1])  # t^2 - 1
    assert rk_f(qt.matrix("[[t - 1]]"), f) == Fraction(1, 2)
    assert rk_f(qt.matrix("[[t]]"), f) == 1
    assert rk_f(qt.matrix("[[0]]"), f) == 0
    assert rk_f(qt.matrix("[[t + 1, t - 1]]"), f) == 1


@given(st.integers(0, 10_000))
def test_rk_f_basis_change(seed):
    qt = poly_ext(QQ, rank=FieldRank(QQ))
    rng = random.Random(seed)
    A = random_poly_matrix(qt, rng, 2, 2)
    f = roots_poly(QQ, [0, 1, 2])
    while True:
        P = [[rng.randint(-2, 2) for _ in range(3)] for _ in range(3)]
        if rank_qq(P) == 3:
            break
    assert rk_f(A, f, basis_change=P) == rk_f(A, f)


def test_roots_examples(qt):
    assert rk_f_by_roots(qt.matrix("[[t - 1]]"), [1, -1]) == Fraction(1, 2)
    assert rk_f_by_roots(qt.matrix("[[t]]"), [1, -1]) == 1
    assert rk_f_by_roots(qt.matrix("[[0]]"), [3, 5, 7]) == 0
    with pytest.raises(InvalidInput):
        rk_f_by_roots(qt.matrix("[[t]]"), [1, 1])


def _bases():
    M2 = MatrixRing(QQ, 2)
    QxQ = ProductRing(QQ, 2)
    return [(QQ, FieldRank(QQ)), (M2, matrix_ring_rank(2)), (QxQ, product_ring_rank(["1/3", "2/3"]))]


@pytest.mark.parametrize("idx", [0, 1, 2])
def test_averaging_identity(idx):
    R, rk = _bases()[idx]
    ext = poly_ext(R, rank=rk)
    rng = random.Random(idx)
    for _ in range(10):
        roots = rng.sample(range(-5, 6), rng.randint(1, 4))
        A = random_poly_matrix(ext, rng, rng.randint(1, 3), rng.randint(1, 3))
        assert rk_f_by_roots(A, roots) == rk_f(A, roots_poly(QQ, roots))


def test_companion_rank_is_a_rank_function(qt):
    rk = CompanionRank(qt, roots_poly(QQ, [1, -1]))
    assert check_axioms(rk, trials=60, seed=3).ok


def test_monic_limit_examples(qt):
    rep = monic_sequence_limit(qt.matrix("[[t - 1]]"), [1, 2, 4, 8])
    assert rep.stabilized and rep.value == 1
    assert all(b["pass"] for b in rep.bound_checks)
    assert monic_sequence_limit(qt.matrix("[[0]]"), [1, 2, 3]).value == 0
    assert monic_sequence_limit(qt.matrix("[[5]]"), [1, 2, 3]).values == [1, 1, 1]
    with pytest.raises(InvalidInput):
        monic_sequence_limit(qt.matrix("[[t]]"), [2, 2, 4])


def test_monic_limit_not_stabilized(qt):
    with pytest.raises(NotStabilized):
        monic_sequence_limit(qt.matrix("[[t - 1]]"), [1, 2])
    rep = monic_sequence_limit(qt.matrix("[[t - 1]]"), [1, 2], strict=False)
    assert not rep.stabilized and rep.value is None


def test_eval_points_examples(qt):
    rep = eval_point_limit(qt.matrix("[[t - 1]]"), [1, 2, 3, 4])
    assert rep.values[:2] == [0, 1] and rep.value == 1 and rep.rule == "certified"
    rep = eval_point_limit(qt.matrix("[[t^2 + 1]]"), [1, 2, 3])
    assert rep.value == 1 and rep.stabilized
    assert eval_point_limit(qt.matrix("[[0]]"), [1, 2, 3]).value == 0
    with pytest.raises(InvalidInput):
        eval_point_limit(qt.matrix("[[t^3]]"), [1, 2, 1])


def test_eval_points_finite_field_partial():
    F = PrimeField(3)
    ext = poly_ext(F, rank=FieldRank(F))
    A = ext.matrix("[[t^3 - t]]")  # vanishes on all of GF(3)
    rep = eval_point_limit(A, default_points(F))
    assert rep.exhausted and not rep.stabilized and rep.value is None
    assert rep.to_json()["max_seen"] == "0"
    # rk over GF(3)(t) is 1, which the companion route sees
    assert monic_sequence_limit(A, [4, 8, 16, 32]).value == 1


def test_eval_points_agree_with_windows(qt):
    rng = random.Random(11)
    for _ in range(5):
        A = random_poly_matrix(qt, rng, 2, 2)
        pts = eval_point_limit(A, default_points(QQ)).value
        mon = monic_sequence_limit(A, [2 ** i for i in range(1, 7)]).value
        win = limit_rank(A, "degrees:2^k,k=1..6", exhaust=True).stabilized_value
        assert pts == mon == win


def test_evaluate_at(qt):
    A = qt.matrix("[[t^2 + 1, t]]")
    assert list(evaluate_at(A, 2).rows[0]) == [5, 2]


# --- algebraic case -----------------------------------------------------------


def qi():
    return TensorExtension(FiniteAlgebra.gaussian_rationals(QQ), QQ, rank=FieldRank(QQ))


def test_blow_up_examples():
    S = qi()
    assert [list(r) for r in blow_up(S.matrix("[[i]]")).rows] == [[0, 1], [-1, 0]]
    assert algebraic_ext_rank(S.matrix("[[i]]")) == 1
    assert algebraic_ext_rank(S.matrix("[[1]]")) == 1
    assert [list(r) for r in blow_up(S.matrix("[[1 + i]]")).rows] == [[1, 1], [-1, 1]]
    assert algebraic_ext_rank(S.matrix("[[1 + i, 1 - i], [2, -2*i]]")) == 1
    assert algebraic_ext_rank(S.matrix("[[0]]")) == 0


@given(st.integers(0, 10_000))
def test_algebraic_matches_window_and_enlargement(seed):
    rng = random.Random(seed)
    S = qi()
    A = Matrix(S, [[S.random_element(rng) for _ in range(2)] for _ in range(2)], 2, 2)
    v = algebraic_ext_rank(A)
    assert v == algebraic_window_value(A)
    E1 = FiniteAlgebra.tensor(S.algebra, FiniteAlgebra.from_minimal_polynomial(QQ, [-2, 0, 1], var="r"))
    big = TensorExtension(E1, QQ, rank=FieldRank(QQ))
    assert algebraic_ext_rank(embed_finite(A, big, E1.embed_index)) == v


def test_embed_finite_rejects_non_embedding():
    S = qi()
    E1 = FiniteAlgebra.tensor(S.algebra, FiniteAlgebra.from_minimal_polynomial(QQ, [-2, 0, 1], var="r"))
    big = TensorExtension(E1, QQ, rank=FieldRank(QQ))
    with pytest.raises(InvalidInput):
        embed_finite(S.matrix("[[i]]"), big, lambda k: k)  # i -> 1 (x) r, but r^2 = 2


def test_composition_examples():
    tower = finite_then_t_tower(FiniteAlgebra.gaussian_rationals(QQ), QQ, FieldRank(QQ))
    for text, expect in [("[[i*t - 1]]", 1), ("[[0]]", 0), ("[[t]]", 1)]:
        rep = composition_check(text, tower)
        assert rep.both_stabilized and rep.agree
        assert rep.two_step_value == expect


def test_composition_t_then_u():
    tower = t_then_u_tower(QQ, FieldRank(QQ))
    rep = composition_check("[[t - u, 1], [t*u, u]]", tower)
    assert rep.agree and rep.one_step_value == 2  # det = -u^2
