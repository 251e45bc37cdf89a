from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sylvan.errors import DivisionByZero, InvalidInput, ParseError
from sylvan.scalars import (
    QQ,
    MultiPoly,
    PrimeField,
    RationalFunctionField,
    field_from_name,
    format_rational,
    parse_rational,
)

GF7 = PrimeField(7)
rationals = st.fractions(max_denominator=50).filter(lambda q: abs(q) < 100)
residues = st.integers(0, 6).map(GF7)


def test_rational_examples():
    assert QQ("1/2") + QQ("1/3") == Fraction(5, 6)
    assert parse_rational("-4/6") == Fraction(-2, 3)
    assert format_rational(Fraction(-2, 3)) == "-2/3"
    with pytest.raises(DivisionByZero):
        QQ.inv(Fraction(0))


def test_prime_field_examples():
    assert GF7(3) * GF7(5) == GF7(1)
    assert GF7(3).inverse() == GF7(5)
    assert GF7(-1) == GF7(6)
    with pytest.raises(DivisionByZero):
        GF7.inv(GF7(0))


def test_prime_field_rejects_composite():
    with pytest.raises(InvalidInput):
        PrimeField(9)


def test_field_from_name():
    assert field_from_name("QQ") is QQ
    assert field_from_name("gf7") == GF7
    assert field_from_name("GF(7)") == GF7
    with pytest.raises(InvalidInput):
        field_from_name("RR")


@given(rationals, rationals, rationals)
def test_rational_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    if a != 0:
        assert a * QQ.inv(a) == 1


@given(residues, residues, residues)
def test_prime_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + (-a) == GF7(0)
    if a != GF7(0):
        assert a * a.inverse() == GF7(1)


def test_ratfunc_reduces_univariate():
    K = RationalFunctionField(QQ, ["t"])
    assert K.parse("(t^2 - 1)/(t - 1)") == K.parse("t + 1")
    assert str(K.parse("(t^2 - 1)/(t - 1)")) == "t + 1"


@given(st.lists(st.integers(-3, 3), min_size=1, max_size=4), st.lists(st.integers(-3, 3), min_size=1, max_size=4))
def test_ratfunc_normal_form_idempotent(num, den):
    t = MultiPoly.var(QQ, ["t"], "t")
    p = sum((c * t**k for k, c in enumerate(num)), MultiPoly(QQ, ["t"]))
    q = sum((c * t**k for k, c in enumerate(den)), MultiPoly(QQ, ["t"]))
    if q.is_zero():
        return
    K = RationalFunctionField(QQ, ["t"])
    f = K(p) / K(q)
    assert f.normalized() == f
    assert f.normalized().normalized() == f.normalized()


def test_multipoly_parse_and_degree():
    p = MultiPoly.parse("3*t^2 - 1", QQ, ["t"])
    assert p.degree() == 2
    assert p.coefficients() == [Fraction(-1), Fraction(0), Fraction(3)]
    assert not p.is_monic()
    assert str(p) == "3*t^2 - 1"


def test_multipoly_multivariate_order():
    p = MultiPoly.parse("y + x^2", QQ, ["y", "x"])
    assert p.variables == ("x", "y")
    assert p.total_degree() == 2


def test_parse_error_has_location():
    with pytest.raises(ParseError) as e:
        MultiPoly.parse("3*t^ - 1", QQ, ["t"], where="entry")
    assert "entry" in str(e.value)
