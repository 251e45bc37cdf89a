"""Exact scalars: Q, GF(p), multivariate polynomials and rational functions.

Rationals are :class:`fractions.Fraction`. Prime field elements are
:class:`GFElem`. Field descriptors (:data:`QQ`, :class:`PrimeField`) carry the
operations generic code needs: coercion, parsing, printing, inverses and the
coordinate interface shared with the other base rings.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Iterable, Sequence

import gmpy2

from .errors import DivisionByZero, InvalidInput, ParseError
from .expr import parse_expression

Rational = Fraction

__all__ = [
    "Rational",
    "QQ",
    "RationalField",
    "PrimeField",
    "GFElem",
    "MultiPoly",
    "RatFunc",
    "RationalFunctionField",
    "DEFAULT_POOL",
    "parse_rational",
    "format_rational",
    "field_from_name",
]

# default sampler pool {0, ±1, ±2, 1/2}
DEFAULT_POOL = (Fraction(0), Fraction(1), Fraction(-1), Fraction(2), Fraction(-2), Fraction(1, 2))


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}: {exc}") from None


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class _ScalarContext:
    """Parser context evaluating plain numbers in a field."""

    def __init__(self, field):
        self.F = field

    def number(self, v):
        return self.F(v)

    def name(self, ident):
        raise KeyError("no names in a scalar field")

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a * self.F.inv(b)

    def neg(self, a):
        return -a

    def power(self, a, k):
        return a**k if k >= 0 else self.F.inv(a) ** (-k)


class RationalField:
    """The field Q; elements are :class:`fractions.Fraction`."""

    name = "QQ"
    characteristic = 0
    is_field = True
    dim = 1

    zero = Fraction(0)
    one = Fraction(1)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def __reduce__(self):
        return (_qq, ())

    @property
    def K(self):
        return self

    def __call__(self, x) -> Fraction:
        if isinstance(x, Fraction):
            return x
        if isinstance(x, (int, str)):
            return parse_rational(x) if isinstance(x, str) else Fraction(x)
        raise InvalidInput(f"cannot coerce {x!r} into QQ")

    def parse(self, text: str, where: str | None = None) -> Fraction:
        return parse_expression(text, _ScalarContext(self), where)

    def format(self, a: Fraction) -> str:
        return format_rational(a)

    def inv(self, a: Fraction) -> Fraction:
        if a == 0:
            raise DivisionByZero("inverse of 0")
        return 1 / a

    def is_zero(self, a) -> bool:
        return a == 0

    def from_scalar(self, c):
        return c

    def scale(self, c, a):
        return c * a

    def coords(self, a):
        return (a,)

    def from_coords(self, c):
        return c[0]

    def basis_names(self) -> list[str]:
        return []

    def names(self) -> dict:
        return {}

    def random_element(self, rng: random.Random, pool: Sequence = DEFAULT_POOL):
        return self(rng.choice(pool))

    def to_json(self):
        return "QQ"


def _qq():
    return QQ


QQ = RationalField()


class GFElem:
    """Element of GF(p), stored as a residue in [0, p)."""

    __slots__ = ("value", "p")

    def __init__(self, value: int, p: int):
        self.value = value % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, GFElem):
            if other.p != self.p:
                raise InvalidInput(f"mixing GF({self.p}) and GF({other.p})")
            return other.value
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            if other.denominator % self.p == 0:
                raise DivisionByZero(f"{other} has no image in GF({self.p})")
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else GFElem(self.value + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else GFElem(self.value - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else GFElem(o - self.value, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else GFElem(self.value * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return GFElem(-self.value, self.p)

    def __pos__(self):
        return self

    def inverse(self) -> "GFElem":
        if self.value == 0:
            raise DivisionByZero(f"inverse of 0 in GF({self.p})")
        return GFElem(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * GFElem(o, self.p).inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return GFElem(pow(self.value, k, self.p), self.p)

    def __eq__(self, other):
        if isinstance(other, GFElem):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"GF({self.p})({self.value})"

    def __str__(self):
        return str(self.value)


class PrimeField:
    """GF(p) for a prime p (checked with a strong probable-prime test)."""

    is_field = True
    dim = 1

    def __init__(self, p: int):
        p = int(p)
        if p < 2 or not gmpy2.is_prime(p, 50):
            raise InvalidInput(f"{p} is not prime")
        self.p = p
        self.characteristic = p
        self.zero = GFElem(0, p)
        self.one = GFElem(1, p)

    @property
    def name(self):
        return f"GF({self.p})"

    def __repr__(self):
        return self.name

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    @property
    def K(self):
        return self

    def __call__(self, x) -> GFElem:
        if isinstance(x, GFElem):
            if x.p != self.p:
                raise InvalidInput(f"element of GF({x.p}) used in GF({self.p})")
            return x
        if isinstance(x, int):
            return GFElem(x, self.p)
        if isinstance(x, str):
            x = parse_rational(x)
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise DivisionByZero(f"{x} has no image in GF({self.p})")
            return GFElem(x.numerator * pow(x.denominator, -1, self.p), self.p)
        raise InvalidInput(f"cannot coerce {x!r} into GF({self.p})")

    def parse(self, text: str, where: str | None = None) -> GFElem:
        return parse_expression(text, _ScalarContext(self), where)

    def format(self, a: GFElem) -> str:
        return str(a.value)

    def inv(self, a: GFElem) -> GFElem:
        return self(a).inverse()

    def is_zero(self, a) -> bool:
        return a == 0

    def from_scalar(self, c):
        return self(c)

    def scale(self, c, a):
        return self(c) * a

    def coords(self, a):
        return (a,)

    def from_coords(self, c):
        return c[0]

    def basis_names(self) -> list[str]:
        return []

    def names(self) -> dict:
        return {}

    def random_element(self, rng: random.Random, pool: Sequence = DEFAULT_POOL):
        return self(rng.choice(pool))

    def to_json(self):
        return f"GF({self.p})"


def field_from_name(name: str):
    """Resolve ``"QQ"``, ``"Q"``, ``"GF(7)"`` or ``"gf7"``."""
    s = name.strip().replace(" ", "")
    if s.upper() in ("QQ", "Q"):
        return QQ
    low = s.lower()
    if low.startswith("gf(") and low.endswith(")"):
        return PrimeField(int(low[3:-1]))
    if low.startswith("gf") and low[2:].isdigit():
        return PrimeField(int(low[2:]))
    raise InvalidInput(f"unknown field {name!r}")


# --- polynomials ---------------------------------------------------------


def _grlex_key(exp: tuple[int, ...]):
    return (sum(exp), exp)


class MultiPoly:
    """Polynomial over a field in named variables (sorted lexicographically).

    ``terms`` maps exponent tuples to nonzero coefficients.
    """

    __slots__ = ("field", "variables", "terms")

    def __init__(self, field, variables: Iterable[str], terms: dict | None = None):
        variables = tuple(variables)
        if list(variables) != sorted(set(variables)):
            order = sorted(set(variables))
            if sorted(variables) != order:
                raise InvalidInput(f"duplicate variables in {variables}")
            perm = [variables.index(v) for v in order]
            terms = {tuple(e[i] for i in perm): c for e, c in (terms or {}).items()}
            variables = tuple(order)
        self.field = field
        self.variables = variables
        clean = {}
        for e, c in (terms or {}).items():
            if len(e) != len(variables):
                raise InvalidInput(f"exponent {e} does not match variables {variables}")
            if any(k < 0 for k in e):
                raise InvalidInput("negative exponent in a polynomial")
            if not field.is_zero(c):
                clean[tuple(e)] = c
        self.terms = clean

    # constructors
    @classmethod
    def constant(cls, field, variables, c) -> "MultiPoly":
        variables = tuple(sorted(variables))
        return cls(field, variables, {(0,) * len(variables): field(c)})

    @classmethod
    def var(cls, field, variables, name: str, power: int = 1) -> "MultiPoly":
        variables = tuple(sorted(variables))
        e = [0] * len(variables)
        e[variables.index(name)] = power
        return cls(field, variables, {tuple(e): field.one})

    @classmethod
    def parse(cls, text: str, field, variables, where: str | None = None) -> "MultiPoly":
        val = parse_expression(text, _PolyContext(field, tuple(sorted(variables))), where)
        if isinstance(val, RatFunc):
            raise ParseError(f"{text!r} is not a polynomial", where)
        return val

    def _check(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(self.field, self.variables, other)
        if other.variables != self.variables or other.field != self.field:
            raise InvalidInput("polynomials over different rings")
        return other

    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, self.field.zero) + c
        return MultiPoly(self.field, self.variables, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.field, self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, self.field.zero) + c1 * c2
        return MultiPoly(self.field, self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise InvalidInput("negative power of a polynomial")
        result = MultiPoly.constant(self.field, self.variables, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return other == self
        try:
            other = self._check(other)
        except InvalidInput:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.variables, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def sorted_terms(self):
        """Terms in descending graded-lex order."""
        return sorted(self.terms.items(), key=lambda kv: _grlex_key(kv[0]), reverse=True)

    def leading(self):
        return self.sorted_terms()[0] if self.terms else None

    def scale(self, c):
        return MultiPoly(self.field, self.variables, {e: c * v for e, v in self.terms.items()})

    def evaluate(self, point: Sequence, convert=None):
        """Evaluate at ``point`` (one value per variable); ``convert`` maps coefficients."""
        total = None
        for e, c in self.terms.items():
            v = convert(c) if convert else c
            for x, k in zip(point, e):
                if k:
                    v = v * x**k
            total = v if total is None else total + v
        if total is None:
            return convert(self.field.zero) if convert else self.field.zero
        return total

    def eval_mod(self, point: Sequence[int], p: int) -> int:
        """Evaluate with residues mod p; coefficients must be p-integral."""
        total = 0
        for e, c in self.terms.items():
            if isinstance(c, Fraction):
                den = c.denominator % p
                if den == 0:
                    raise DivisionByZero("coefficient denominator divisible by p")
                v = c.numerator * pow(den, -1, p)
            elif isinstance(c, GFElem):
                v = c.value
            else:
                v = int(c)
            for x, k in zip(point, e):
                if k:
                    v = v * pow(x, k, p)
            total += v
        return total % p

    # univariate helpers
    def _univariate(self):
        if len(self.variables) != 1:
            raise InvalidInput("operation needs a univariate polynomial")

    def degree(self) -> int:
        self._univariate()
        return max((e[0] for e in self.terms), default=-1)

    def coeff(self, k: int):
        self._univariate()
        return self.terms.get((k,), self.field.zero)

    def coefficients(self) -> list:
        """Dense coefficient list, lowest degree first."""
        return [self.coeff(k) for k in range(self.degree() + 1)]

    def is_monic(self) -> bool:
        return self.degree() >= 0 and self.coeff(self.degree()) == self.field.one

    def divmod(self, other: "MultiPoly"):
        self._univariate()
        other = self._check(other)
        if other.is_zero():
            raise DivisionByZero("polynomial division by zero")
        F = self.field
        rem = dict((e[0], c) for e, c in self.terms.items())
        dq = other.degree()
        lc_inv = F.inv(other.coeff(dq))
        quo = {}
        while rem:
            top = max(rem)
            if top < dq:
                break
            c = rem[top] * lc_inv
            quo[(top - dq,)] = c
            for (k,), b in other.terms.items():
                key = k + top - dq
                val = rem.get(key, F.zero) - c * b
                if F.is_zero(val):
                    rem.pop(key, None)
                else:
                    rem[key] = val
        return (
            MultiPoly(F, self.variables, quo),
            MultiPoly(F, self.variables, {(k,): c for k, c in rem.items()}),
        )

    def monic(self) -> "MultiPoly":
        lead = self.leading()
        if lead is None:
            return self
        return self.scale(self.field.inv(lead[1]))

    def gcd(self, other: "MultiPoly") -> "MultiPoly":
        a, b = self, self._check(other)
        while not b.is_zero():
            a, b = b, a.divmod(b)[1]
        return a.monic()

    def format(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.variables, e) if k
            )
            parts.append(_join_coeff(self.field.format(c), mono))
        return _join_terms(parts)

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"MultiPoly({self.format()!r})"


def _join_coeff(cs: str, mono: str) -> str:
    if not mono:
        return cs
    if cs == "1":
        return mono
    if cs == "-1":
        return "-" + mono
    if "/" in cs.lstrip("-") or " " in cs:
        return f"({cs})*{mono}" if not cs.startswith("-") or " " in cs else f"{cs}*{mono}"
    return f"{cs}*{mono}"


def _join_terms(parts: list[str]) -> str:
    out = parts[0]
    for p in parts[1:]:
        if p.startswith("-"):
            out += " - " + p[1:]
        else:
            out += " + " + p
    return out


class RatFunc:
    """Quotient of two polynomials in the same variables.

    Univariate values are reduced by the gcd with a monic denominator.
    Multivariate values only get a denominator with leading coefficient 1;
    equality is decided by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly | None = None):
        if den is None:
            den = MultiPoly.constant(num.field, num.variables, 1)
        if den.is_zero():
            raise DivisionByZero("rational function with zero denominator")
        if num.variables != den.variables:
            raise InvalidInput("numerator and denominator in different variables")
        if len(num.variables) == 1:
            g = num.gcd(den) if not num.is_zero() else den.monic()
            if g.degree() > 0:
                num = num.divmod(g)[0]
                den = den.divmod(g)[0]
        if num.is_zero():
            den = MultiPoly.constant(num.field, num.variables, 1)
        lc = den.leading()[1]
        if lc != num.field.one:
            inv = num.field.inv(lc)
            num, den = num.scale(inv), den.scale(inv)
        self.num = num
        self.den = den

    @property
    def field(self):
        return self.num.field

    @property
    def variables(self):
        return self.num.variables

    def normalized(self) -> "RatFunc":
        return RatFunc(self.num, self.den)

    def _lift(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, MultiPoly):
            return RatFunc(other)
        return RatFunc(MultiPoly.constant(self.field, self.variables, other))

    def __add__(self, other):
        o = self._lift(other)
        if self.den == o.den:
            return RatFunc(self.num + o.num, self.den)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.num.is_zero():
            raise DivisionByZero("inverse of the zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num**k, self.den**k)

    def __eq__(self, other):
        try:
            o = self._lift(other)
        except InvalidInput:
            return False
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        if len(self.variables) == 1:
            return hash((self.num, self.den))
        raise TypeError("multivariate RatFunc is not hashable (no canonical form)")

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def eval_mod(self, point: Sequence[int], p: int) -> int:
        d = self.den.eval_mod(point, p)
        if d == 0:
            raise DivisionByZero("denominator vanishes at the point")
        return self.num.eval_mod(point, p) * pow(d, -1, p) % p

    def format(self) -> str:
        if self.den.total_degree() == 0:
            return self.num.format()
        return f"({self.num.format()})/({self.den.format()})"

    def __str__(self):
        return self.format()

    def __repr__(self):
        return f"RatFunc({self.format()!r})"


class _PolyContext:
    def __init__(self, field, variables):
        self.F = field
        self.vars = variables

    def _poly(self, x):
        if isinstance(x, (MultiPoly, RatFunc)):
            return x
        return MultiPoly.constant(self.F, self.vars, x)

    def number(self, v):
        return MultiPoly.constant(self.F, self.vars, v)

    def name(self, ident):
        if ident not in self.vars:
            raise KeyError(ident)
        return MultiPoly.var(self.F, self.vars, ident)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        if isinstance(b, MultiPoly) and b.total_degree() == 0 and isinstance(a, MultiPoly):
            c = b.terms.get((0,) * len(self.vars))
            if c is None:
                raise DivisionByZero("division by zero")
            return a.scale(self.F.inv(c))
        return RatFunc(a) / b if isinstance(a, MultiPoly) else a / b

    def neg(self, a):
        return -a

    def power(self, a, k):
        if k < 0:
            base = RatFunc(a) if isinstance(a, MultiPoly) else a
            return base**k
        return a**k


class RationalFunctionField:
    """Descriptor for K(z_1, ..., z_d); elements are :class:`RatFunc`."""

    is_field = True

    def __init__(self, field, variables):
        self.K = field
        self.variables = tuple(sorted(variables))
        self.zero = RatFunc(MultiPoly(field, self.variables, {}))
        self.one = RatFunc(MultiPoly.constant(field, self.variables, 1))

    def __repr__(self):
        return f"{self.K.name}({','.join(self.variables)})"

    def __eq__(self, other):
        return (
            isinstance(other, RationalFunctionField)
            and other.K == self.K
            and other.variables == self.variables
        )

    def __hash__(self):
        return hash((self.K, self.variables))

    def __call__(self, x) -> RatFunc:
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, MultiPoly):
            return RatFunc(x)
        return RatFunc(MultiPoly.constant(self.K, self.variables, x))

    def parse(self, text: str, where: str | None = None) -> RatFunc:
        return self(parse_expression(text, _PolyContext(self.K, self.variables), where))

    def format(self, a: RatFunc) -> str:
        return a.format()

    def is_zero(self, a) -> bool:
        return a.is_zero()

    def inv(self, a: RatFunc) -> RatFunc:
        return a.inverse()
