from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sylvan.errors import InvalidInput, ParseError, TilingTooCoarse
from sylvan.rings import FiniteAlgebra, FiniteGroup, TensorExtension
from sylvan.rings.extensions import CrossedProduct
from sylvan.scalars import QQ
from sylvan.windows import (
    MonomialWindow,
    Quasitiling,
    SubspaceWindow,
    box_window,
    check_quasitiling,
    degree_window,
    full_window,
    invariance_defect,
    kt_quasitile,
    ow_quasitile_boxes,
    parse_schedule,
    window_intersect,
    window_sum,
)


def zwin(qz, exps):
    return MonomialWindow(qz, [(e,) for e in exps])


def test_sum_and_intersection_examples(qz):
    a, b = zwin(qz, [0, 1]), zwin(qz, [1, 2])
    s, i = window_sum(a, b), window_intersect(a, b)
    assert s == zwin(qz, [0, 1, 2]) and s.dim == 3
    assert i == zwin(qz, [1]) and i.dim == 1
    assert s.dim + i.dim == a.dim + b.dim == 4


def test_variant_mismatch(qt):
    E = FiniteAlgebra.gaussian_rationals(QQ)
    S = TensorExtension(E, QQ)
    with pytest.raises(InvalidInput):
        window_sum(degree_window(qt, 2), full_window(S))


def test_invariance_defect_examples(qz):
    W = box_window(qz, 10)
    assert invariance_defect(W, zwin(qz, [0, 1])) == Fraction(1, 10)
    assert invariance_defect(W, zwin(qz, [0])) == 0
    G = CrossedProduct(QQ, FiniteGroup.cyclic(3))
    assert invariance_defect(full_window(G), MonomialWindow(G, [1, 2])) == 0
    with pytest.raises(InvalidInput):
        invariance_defect(MonomialWindow(qz, []), W)


exps = st.frozensets(st.integers(-6, 6), max_size=8)


@given(exps, exps)
def test_dimension_formula_monomial(a, b):
    from sylvan.rings import ZdGroup

    S = CrossedProduct(QQ, ZdGroup(1))
    V, W = MonomialWindow(S, [(x,) for x in a]), MonomialWindow(S, [(x,) for x in b])
    assert window_sum(V, W).dim + window_intersect(V, W).dim == V.dim + W.dim


vec = st.lists(st.integers(-2, 2), min_size=4, max_size=4)


def _qi_sqrt2():
    E = FiniteAlgebra.tensor(FiniteAlgebra.gaussian_rationals(QQ),
                             FiniteAlgebra.from_minimal_polynomial(QQ, [-2, 0, 1], var="r"))
    return TensorExtension(E, QQ)


@given(st.lists(vec, max_size=4), st.lists(vec, max_size=4))
def test_dimension_formula_subspace(xs, ys):
    S = _qi_sqrt2()
    V = SubspaceWindow(S, [dict(enumerate(v)) for v in xs])
    W = SubspaceWindow(S, [dict(enumerate(v)) for v in ys])
    assert window_sum(V, W).dim + window_intersect(V, W).dim == V.dim + W.dim


@given(st.lists(exps, min_size=1, max_size=4))
def test_codimension_of_intersection(family):
    from sylvan.rings import ZdGroup

    S = CrossedProduct(QQ, ZdGroup(1))
    W = box_window(S, 13, start=-6)
    parts = [window_intersect(W, MonomialWindow(S, [(x,) for x in f])) for f in family]
    inter = parts[0]
    for p in parts[1:]:
        inter = window_intersect(inter, p)
    assert W.dim - inter.dim <= sum(W.dim - p.dim for p in parts)


def test_subspace_canonical_form():
    S = _qi_sqrt2()
    a = SubspaceWindow(S, [{0: 1, 1: 1}, {1: 2}])
    b = SubspaceWindow(S, [{0: 3}, {1: -1}])
    assert a == b and hash(a) == hash(b)


@pytest.mark.parametrize("text,kind,sizes", [
    ("box:2^k,k=2..6", "box", (4, 8, 16, 32, 64)),
    ("box:4,8,16", "box", (4, 8, 16)),
    ("degrees:32", "degrees", (32,)),
    ("degrees:2^k,k=1..3", "degrees", (2, 4, 8)),
    ("group:full", "group", ()),
])
def test_schedule_parsing(text, kind, sizes):
    s = parse_schedule(text)
    assert (s.kind, s.sizes) == (kind, sizes)


def test_schedule_box_literal(qz2):
    s = parse_schedule("box:0..16^2")
    (W,) = list(s.windows(qz2))
    assert W.dim == 256
    assert list(s.windows(qz2)) == [W]  # schedules can be iterated again


@pytest.mark.parametrize("text", ["box:", "box:8,4", "rings:4", "degrees:0", "box:3..3"])
def test_schedule_errors(text):
    with pytest.raises(ParseError):
        parse_schedule(text)


def test_schedule_dimension_mismatch(qz):
    with pytest.raises(InvalidInput):
        list(parse_schedule("box:0..4^2").windows(qz))


def test_schedule_invariance_tail(qz):
    V = zwin(qz, [-2, -1, 0, 1, 2])
    defects = [invariance_defect(W, V) for W in parse_schedule("box:2^k,k=2..8").windows(qz)]
    assert defects == sorted(defects, reverse=True)
    assert defects[-1] <= Fraction(1, 50)


@pytest.mark.parametrize("d,n,N,count", [(2, 4, 12, 9), (1, 4, 40, 10), (2, 4, 16, 16)])
def test_ow_boxes_exact(d, n, N, count):
    q = ow_quasitile_boxes(d, n, N, Fraction(1, 10))
    assert len(q.centers[0]) == count and q.coverage == 1
    rep = check_quasitiling(q, box_window(q.tiles[0].ext, N))
    assert rep.ok
    total = sum(len(c) * q.tiles[j].dim for j, c in enumerate(q.centers))
    assert rep.conditions["(ii) independence"]["sum_dim"] == total


def test_ow_boxes_too_coarse():
    with pytest.raises(TilingTooCoarse):
        ow_quasitile_boxes(1, 4, 10, Fraction(1, 10))


def test_kt_examples(qt):
    q = kt_quasitile(2, 6)
    assert q.centers == [[0, 2, 4]] and q.tiles[0].keys == (0, 1)
    assert check_quasitiling(q, degree_window(q.tiles[0].ext, 6)).ok
    assert len(kt_quasitile(3, 3).centers[0]) == 1
    assert len(kt_quasitile(1, 5).centers[0]) == 5
    with pytest.raises(InvalidInput):
        kt_quasitile(4, 6)


def test_overlap_detected(qz):
    tile = box_window(qz, 4)
    centers = [(0,), (2,)]
    q = Quasitiling([tile], [centers], [{c: tile for c in centers}], Fraction(1, 10))
    rep = check_quasitiling(q, box_window(qz, 8))
    cond = rep.conditions["(ii) independence"]
    assert not cond["pass"]
    assert cond["dependent_pair"] == {"first": [0, "1"], "second": [0, "z^2"]}
    assert not rep.conditions["(iii) containment and coverage"]["pass"]
