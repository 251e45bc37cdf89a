"""Acceptance criteria 1-11 at their stated tolerances and time limits.

Each test records one pass/fail line; the lines are printed at the end of
the pytest run (see conftest.py) and by ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import random
import time
from contextlib import contextmanager
from fractions import Fraction

import pytest

from oracles import rank_laurent
from sylvan.extension_rank import compress, limit_rank
from sylvan.field_ext import (
    CompanionRank,
    algebraic_ext_rank,
    algebraic_window_value,
    composition_check,
    default_points,
    embed_finite,
    eval_point_limit,
    finite_then_t_tower,
    monic_sequence_limit,
    roots_poly,
    rk_f,
    rk_f_by_roots,
)
from sylvan.linalg import Matrix, generic_rank
from sylvan.rank_functions import (
    FieldRank,
    MatrixSampler,
    check_axioms,
    convex_combine,
    field_rank,
    matrix_ring_rank,
    product_ring_rank,
)
from sylvan.rings import FiniteAlgebra, FiniteGroup, LinearAutomorphism, MatrixRing, ProductRing, TensorExtension
from sylvan.rings import ZdGroup
from sylvan.rings.extensions import CrossedProduct, poly_ext
from sylvan.scalars import QQ, PrimeField
from sylvan.trace_compare import (
    TraceRank,
    klein_cocycle,
    laurent_to_poly,
    trace_window_compare,
    trace_algebra,
    trace_rank_finite,
)
from sylvan.windows import (
    Quasitiling,
    box_window,
    check_quasitiling,
    degree_window,
    kt_quasitile,
    ow_quasitile_boxes,
    window_sum,
)

RESULTS: list[str] = []
QxQ = ProductRing(QQ, 2)


@contextmanager
def criterion(num: int, title: str, limit: float):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        within = elapsed < limit
        status = "PASS" if ok and within else "FAIL"
        note = "" if within else f" (over the {limit:g} s limit)"
        line = f"criterion {num:2d} {status}  {title}  [{elapsed:.2f} s / {limit:g} s]{note}"
        RESULTS.append(line)
        print(line)
    assert elapsed < limit, f"criterion {num} took {elapsed:.1f} s"


def laurent_matrix(S, rng, n, m, lo=-2, hi=2, coeff=lambda rng: QQ(rng.randint(-3, 3))):
    def el():
        return S.element({(e,): coeff(rng) for e in range(lo, hi + 1) if rng.random() < 0.5})

    rows = [[el() for _ in range(m)] for _ in range(n)]
    if n == 2 and rng.random() < 0.5:
        c = QQ(rng.choice([-2, -1, 1, 3]))
        rows[1] = [S.element({k: S.base.scale(c, v) for k, v in x.terms.items()}) for x in rows[0]]
    return Matrix(S, rows, n, m)


def tpoly_matrix(S, rng, n, m, deg=2):
    rows = [[S.element({k: S.base.random_element(rng, (-2, -1, 0, 1, 2)) for k in range(deg + 1)
                        if rng.random() < 0.6}) for _ in range(m)] for _ in range(n)]
    A = Matrix(S, rows, n, m)
    if n >= 2 and rng.random() < 0.3:
        A = Matrix(S, [A.rows[0], A.rows[0]] + list(A.rows[2:]), n, m)
    return A


# --- 1 ------------------------------------------------------------------------


def test_criterion_01_axioms():
    with criterion(1, "axiom suite, 200 trials per rank function", 60):
        qt = poly_ext(QQ, rank=FieldRank(QQ))
        suites = {
            "field Q": field_rank(QQ),
            "field GF(7)": field_rank(PrimeField(7)),
            "M_2(Q)": matrix_ring_rank(2),
            "Q x Q (1/3, 2/3)": product_ring_rank(["1/3", "2/3"]),
            "rk_f, f = t^2 - 1": CompanionRank(qt, roots_poly(QQ, [1, -1])),
            "trace Z/2": TraceRank(trace_algebra(FiniteGroup.cyclic(2))),
            "trace Z/3": TraceRank(trace_algebra(FiniteGroup.cyclic(3))),
            "trace S_3": TraceRank(trace_algebra(FiniteGroup.symmetric3())),
        }
        for name, rk in suites.items():
            sampler = MatrixSampler(rk.ring, max_size=4) if "trace" in name or "rk_f" in name else None
            rep = check_axioms(rk, sampler, trials=200, seed=1)
            assert rep.ok, (name, rep.to_json())


# --- 2 ------------------------------------------------------------------------


def test_criterion_02_compress_goldens():
    with criterion(2, "compression golden values", 1):
        S = CrossedProduct(QQ, ZdGroup(1), rank=FieldRank(QQ))
        W = box_window(S, 5)
        res = compress(S.matrix("[[1 - z]]"), W)
        assert res.hull == box_window(S, 6) and (res.B.nrows, res.B.ncols) == (5, 6)
        assert [list(r) for r in res.B.rows] == [
            [1 if j == k else -1 if j == k + 1 else 0 for j in range(6)] for k in range(5)]
        assert (res.rank_value, res.normalized) == (5, 1)
        one = compress(Matrix.identity(S, 1), W)
        assert (one.rank_value, one.normalized) == (5, 1)
        assert compress(Matrix.zeros(S, 1, 1), W).rank_value == 0


# --- 3 ------------------------------------------------------------------------


def test_criterion_03_box_convergence():
    with criterion(3, "box limits over Q[Z] match the generic rank", 300):
        S = CrossedProduct(QQ, ZdGroup(1), rank=FieldRank(QQ))
        sched = "box:4,8,16,32,64,128,256"
        for seed in range(20):
            rng = random.Random(seed)
            n, m = rng.randint(1, 2), rng.randint(1, 2)
            A = laurent_matrix(S, rng, n, m)
            oracle = generic_rank(laurent_to_poly(A), rng=random.Random(seed)).rank
            texts = [[S.format(x).replace("z^-", "z**-") for x in r] for r in A.rows]
            assert oracle == rank_laurent(texts)
            rep = limit_rank(A, sched, exhaust=True)
            assert rep.stabilized and rep.stabilized_value == oracle, (seed, rep.to_json())
            for s in rep.samples:
                assert abs(s.normalized - oracle) <= Fraction(4 * n, s.dim), (seed, s)


# --- 4 ------------------------------------------------------------------------


def test_criterion_04_averaging():
    with criterion(4, "averaging over roots equals rk_f", 30):
        bases = [(QQ, FieldRank(QQ)), (MatrixRing(QQ, 2), matrix_ring_rank(2)),
                 (QxQ, product_ring_rank(["1/2", "1/2"]))]
        for seed in range(50):
            rng = random.Random(seed)
            R, rk = bases[seed % 3]
            S = poly_ext(R, rank=rk)
            roots = rng.sample(range(-6, 7), rng.choice([2, 3, 4]))
            A = tpoly_matrix(S, rng, rng.randint(1, 3), rng.randint(1, 3))
            assert rk_f_by_roots(A, roots) == rk_f(A, roots_poly(QQ, roots)), seed


# --- 5 ------------------------------------------------------------------------


def test_criterion_05_triangle():
    with criterion(5, "companion, evaluation and window limits agree over Q[t]", 120):
        S = poly_ext(QQ, rank=FieldRank(QQ))
        degrees = [2 ** i for i in range(1, 7)]
        for seed in range(20):
            rng = random.Random(seed)
            A = tpoly_matrix(S, rng, rng.randint(1, 3), rng.randint(1, 3))
            mono = monic_sequence_limit(A, degrees)
            pts = eval_point_limit(A, default_points(QQ, 64))
            win = limit_rank(A, "degrees:2^k,k=1..6", exhaust=True)
            assert mono.stabilized and pts.stabilized and win.stabilized, seed
            assert all(b["pass"] for b in mono.bound_checks)
            assert mono.value == pts.value == win.stabilized_value, seed


# --- 6 ------------------------------------------------------------------------


def test_criterion_06_algebraic():
    with criterion(6, "finite extensions: blow-up, full window and enlargement", 30):
        qi = FiniteAlgebra.gaussian_rationals(QQ)
        cube = FiniteAlgebra.from_minimal_polynomial(QQ, [-2, 0, 0, 1], var="u")
        sqrt2 = FiniteAlgebra.from_minimal_polynomial(QQ, [-2, 0, 1], var="r")
        cases = [(qi, FiniteAlgebra.tensor(qi, sqrt2)), (cube, FiniteAlgebra.tensor(cube, qi))]
        for seed in range(20):
            rng = random.Random(seed)
            E0, E1 = cases[seed % 2]
            S = TensorExtension(E0, QQ, rank=FieldRank(QQ))
            big = TensorExtension(E1, QQ, rank=FieldRank(QQ))
            A = MatrixSampler(S, max_size=3).matrix(rng, rng.randint(1, 3), rng.randint(1, 3))
            v = algebraic_ext_rank(A)
            assert v == algebraic_window_value(A), seed
            assert algebraic_ext_rank(embed_finite(A, big, E1.embed_index)) == v, seed


# --- 7 ------------------------------------------------------------------------


def _gauss_text(rng):
    def c():
        a, b = rng.randint(-2, 2), rng.randint(-2, 2)
        return f"({a} + {b}*i)"

    return " + ".join(f"{c()}*t^{k}" for k in range(rng.randint(0, 2) + 1) if rng.random() < 0.7) or "0"


def test_criterion_07_composition():
    with criterion(7, "tower Q in Q(i) in Q(i)(t): two-step equals one-step", 120):
        tower = finite_then_t_tower(FiniteAlgebra.gaussian_rationals(QQ), QQ, FieldRank(QQ))
        stabilized = 0
        for seed in range(10):
            rng = random.Random(seed)
            n, m = rng.randint(1, 2), rng.randint(1, 2)
            rows = [[_gauss_text(rng) for _ in range(m)] for _ in range(n)]
            if n == 2 and seed % 4 == 0:
                rows[1] = [f"(t + i)*({e})" for e in rows[0]]
            text = "[" + ", ".join("[" + ", ".join(r) + "]" for r in rows) + "]"
            rep = composition_check(text, tower)
            if rep.both_stabilized:
                stabilized += 1
                assert rep.agree, (seed, rep.to_json())
        assert stabilized >= 8


# --- 8 ------------------------------------------------------------------------


def test_criterion_08_affinity():
    with criterion(8, "rank values are affine in the base rank", 60):
        rk1, rk0 = product_ring_rank([1, 0]), product_ring_rank([0, 1])
        S = CrossedProduct(QxQ, ZdGroup(1), rank=rk1)
        lams = [Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)]
        pair = lambda rng: QxQ.element(rng.randint(-2, 2), rng.randint(-2, 2))  # noqa: E731
        for seed in range(20):
            rng = random.Random(seed)
            A = laurent_matrix(S, rng, rng.randint(1, 2), rng.randint(1, 2), coeff=pair)
            mixes = {lam: convex_combine([(lam, rk1), (1 - lam, rk0)]) for lam in lams}
            for W in (box_window(S, 3), box_window(S, 7, start=-2), box_window(S, 16)):
                a, b = compress(A, W, rk1).rank_value, compress(A, W, rk0).rank_value
                for lam, mix in mixes.items():
                    assert compress(A, W, mix).rank_value == lam * a + (1 - lam) * b
            limits = {lam: limit_rank(A, "box:2^k,k=2..7", rank=mix, exhaust=True) for lam, mix in mixes.items()}
            assert all(r.stabilized for r in limits.values()), seed
            for lam in lams:
                assert limits[lam].stabilized_value == \
                    lam * limits[Fraction(1)].stabilized_value + (1 - lam) * limits[Fraction(0)].stabilized_value


# --- 9 ------------------------------------------------------------------------


def test_criterion_09_quasitiling():
    with criterion(9, "quasitilings pass, the overlapping family fails", 1):
        for d in (1, 2):
            for N in (12, 16, 40):
                q = ow_quasitile_boxes(d, 4, N, Fraction(1, 10))
                assert check_quasitiling(q, box_window(q.tiles[0].ext, N)).ok, (d, N)
        for n in (1, 2, 3):
            q = kt_quasitile(n, 6 * n)
            assert check_quasitiling(q, degree_window(q.tiles[0].ext, 6 * n)).ok, n
        S = CrossedProduct(QQ, ZdGroup(1))
        tile = box_window(S, 4)
        centers = [(0,), (2,)]
        bad = Quasitiling([tile], [centers], [{c: tile for c in centers}], Fraction(1, 10))
        rep = check_quasitiling(bad, box_window(S, 8))
        assert not rep.ok and not rep.conditions["(ii) independence"]["pass"]


# --- 10 -----------------------------------------------------------------------


def test_criterion_10_trace():
    with criterion(10, "trace rank equals the window limit", 180):
        z2 = FiniteGroup.cyclic(2)
        klein, table = klein_cocycle()
        algebras = [trace_algebra(z2), trace_algebra(FiniteGroup.cyclic(3)), trace_algebra(FiniteGroup.cyclic(4)),
                    trace_algebra(klein), trace_algebra(klein, cocycle=table)]
        for seed in range(30):
            rng = random.Random(seed)
            S = algebras[seed % len(algebras)]
            A = MatrixSampler(S, max_size=3).matrix(rng, rng.randint(1, 3), rng.randint(1, 3))
            rep = trace_window_compare(A)
            assert rep.agree and rep.trace_rank == trace_rank_finite(A), seed
        S = trace_algebra(ZdGroup(1))
        for seed in range(10):
            rng = random.Random(100 + seed)
            A = laurent_matrix(S, rng, rng.randint(1, 2), rng.randint(1, 2))
            rep = trace_window_compare(A, rng=random.Random(seed))
            assert rep.window.samples[-1].dim == 256
            assert rep.agree, (seed, rep.to_json())


# --- 11 -----------------------------------------------------------------------


def test_criterion_11_swap_action():
    with criterion(11, "translation invariance and separated additivity under the swap action", 30):
        swap = LinearAutomorphism.permutation(QxQ, [1, 0])
        S = CrossedProduct(QxQ, ZdGroup(1), action=[swap], rank=product_ring_rank(["1/2", "1/2"]))
        pair = lambda rng: QxQ.element(rng.randint(-2, 2), rng.randint(-2, 2))  # noqa: E731
        W1, W2 = box_window(S, 5), box_window(S, 5, start=20)
        W12 = window_sum(W1, W2)
        for seed in range(20):
            rng = random.Random(seed)
            A = laurent_matrix(S, rng, rng.randint(1, 2), rng.randint(1, 2), coeff=pair)
            base = compress(A, W1).rank_value
            for g in (-3, -1, 1, 2, 7):
                assert compress(A, W1.translate((g,))).rank_value == base, (seed, g)
            assert compress(A, W12).rank_value == base + compress(A, W2).rank_value, seed


if __name__ == "__main__":  # pragma: no cover
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
