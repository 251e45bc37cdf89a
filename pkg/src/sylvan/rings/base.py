"""Finite-dimensional base rings over a field K: M_k(K) and K^r.

Every base ring exposes the same small interface as the field descriptors in
:mod:`sylvan.scalars`: ``zero``, ``one``, ``K``, ``dim``, ``coords`` /
``from_coords``, ``from_scalar``, ``scale``, ``parse``, ``format``,
``names``, ``inv`` and ``random_element``.
"""

from __future__ import annotations

import random
from typing import Sequence

from ..errors import DivisionByZero, InvalidInput
from ..expr import parse_expression
from ..linalg import inverse_matrix, row_reduce
from ..scalars import DEFAULT_POOL


class BaseContext:
    """Parser context for a base ring: numbers, named generators, tuples."""

    def __init__(self, ring):
        self.R = ring

    def number(self, v):
        return self.R.from_scalar(self.R.K(v))

    def name(self, ident):
        return self.R.names()[ident]

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a * self.R.inv(b)

    def neg(self, a):
        return -a

    def power(self, a, k):
        if k < 0:
            return _pow(self.R, self.R.inv(a), -k)
        return _pow(self.R, a, k)

    def tuple(self, items):
        if not hasattr(self.R, "from_tuple"):
            raise ValueError("tuple literal not allowed for this ring")
        return self.R.from_tuple(items)


def _pow(R, a, k):
    out = R.one
    for _ in range(k):
        out = out * a
    return out


# --- M_k(K) --------------------------------------------------------------


class MatElem:
    __slots__ = ("rows",)

    def __init__(self, rows):
        self.rows = tuple(tuple(r) for r in rows)

    def __add__(self, o):
        return MatElem([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, o.rows)])

    def __sub__(self, o):
        return MatElem([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, o.rows)])

    def __neg__(self):
        return MatElem([[-a for a in r] for r in self.rows])

    def __mul__(self, o):
        cols = list(zip(*o.rows))
        return MatElem([[sum((a * b for a, b in zip(r, c)), r[0] * 0) for c in cols] for r in self.rows])

    def __eq__(self, o):
        return isinstance(o, MatElem) and self.rows == o.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return f"MatElem({[[str(x) for x in r] for r in self.rows]})"


class MatrixRing:
    """M_k(K); a matrix over it flattens to a matrix over K with k x k blocks."""

    is_field = False

    def __init__(self, field, k: int):
        if k < 1:
            raise InvalidInput("matrix size must be positive")
        self.K = field
        self.k = k
        self.dim = k * k
        z, o = field.zero, field.one
        self.zero = MatElem([[z] * k for _ in range(k)])
        self.one = MatElem([[o if i == j else z for j in range(k)] for i in range(k)])

    def __repr__(self):
        return f"M{self.k}({self.K.name})"

    def __eq__(self, other):
        return isinstance(other, MatrixRing) and other.k == self.k and other.K == self.K

    def __hash__(self):
        return hash(("M", self.k, self.K))

    def unit(self, i: int, j: int) -> MatElem:
        z, o = self.K.zero, self.K.one
        return MatElem([[o if (a, b) == (i, j) else z for b in range(self.k)] for a in range(self.k)])

    def from_scalar(self, c) -> MatElem:
        c = self.K(c)
        z = self.K.zero
        return MatElem([[c if i == j else z for j in range(self.k)] for i in range(self.k)])

    def from_rows(self, rows) -> MatElem:
        return MatElem([[self.K(x) for x in r] for r in rows])

    def scale(self, c, a: MatElem) -> MatElem:
        return MatElem([[c * x for x in r] for r in a.rows])

    def is_zero(self, a) -> bool:
        return a == self.zero

    def coords(self, a: MatElem):
        return tuple(x for r in a.rows for x in r)

    def from_coords(self, c) -> MatElem:
        k = self.k
        return MatElem([c[i * k:(i + 1) * k] for i in range(k)])

    def basis_names(self) -> list[str]:
        return [f"E{i + 1}{j + 1}" for i in range(self.k) for j in range(self.k)]

    def names(self) -> dict:
        return {f"E{i + 1}{j + 1}": self.unit(i, j) for i in range(self.k) for j in range(self.k)}

    def inv(self, a: MatElem) -> MatElem:
        try:
            return MatElem(inverse_matrix(a.rows, self.K))
        except InvalidInput:
            raise DivisionByZero("matrix is not invertible") from None

    def parse(self, text: str, where: str | None = None) -> MatElem:
        return parse_expression(text, BaseContext(self), where)

    def format(self, a: MatElem) -> str:
        F = self.K
        k = self.k
        diag = a.rows[0][0]
        if all(a.rows[i][j] == (diag if i == j else F.zero) for i in range(k) for j in range(k)):
            return F.format(diag)
        parts = []
        for i in range(k):
            for j in range(k):
                c = a.rows[i][j]
                if not F.is_zero(c):
                    cs = F.format(c)
                    name = f"E{i + 1}{j + 1}"
                    parts.append(name if cs == "1" else ("-" + name if cs == "-1" else f"{cs}*{name}"))
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def random_element(self, rng: random.Random, pool: Sequence = DEFAULT_POOL) -> MatElem:
        return MatElem([[self.K(rng.choice(pool)) for _ in range(self.k)] for _ in range(self.k)])

    def to_json(self):
        return {"kind": "matrix_ring", "field": self.K.to_json(), "k": self.k}


# --- K^r -----------------------------------------------------------------


class ProdElem:
    __slots__ = ("parts",)

    def __init__(self, parts):
        self.parts = tuple(parts)

    def __add__(self, o):
        return ProdElem(a + b for a, b in zip(self.parts, o.parts))

    def __sub__(self, o):
        return ProdElem(a - b for a, b in zip(self.parts, o.parts))

    def __neg__(self):
        return ProdElem(-a for a in self.parts)

    def __mul__(self, o):
        return ProdElem(a * b for a, b in zip(self.parts, o.parts))

    def __eq__(self, o):
        return isinstance(o, ProdElem) and self.parts == o.parts

    def __hash__(self):
        return hash(self.parts)

    def __repr__(self):
        return "(" + ", ".join(str(x) for x in self.parts) + ")"


class ProductRing:
    """K x K x ... x K (r factors), componentwise operations."""

    is_field = False

    def __init__(self, field, r: int):
        if r < 1:
            raise InvalidInput("product ring needs at least one factor")
        self.K = field
        self.r = r
        self.dim = r
        self.zero = ProdElem([field.zero] * r)
        self.one = ProdElem([field.one] * r)

    def __repr__(self):
        return "x".join([self.K.name] * self.r)

    def __eq__(self, other):
        return isinstance(other, ProductRing) and other.r == self.r and other.K == self.K

    def __hash__(self):
        return hash(("P", self.r, self.K))

    def from_scalar(self, c) -> ProdElem:
        c = self.K(c)
        return ProdElem([c] * self.r)

    def from_tuple(self, items) -> ProdElem:
        if len(items) != self.r:
            raise ValueError(f"expected {self.r} components, got {len(items)}")
        vals = []
        for x in items:
            if isinstance(x, ProdElem):  # scalar literal inside a tuple
                if len(set(x.parts)) != 1:
                    raise ValueError("tuple components must be scalars")
                x = x.parts[0]
            vals.append(self.K(x))
        return ProdElem(vals)

    def element(self, *parts) -> ProdElem:
        return ProdElem([self.K(x) for x in parts])

    def scale(self, c, a: ProdElem) -> ProdElem:
        return ProdElem(c * x for x in a.parts)

    def is_zero(self, a) -> bool:
        return a == self.zero

    def coords(self, a: ProdElem):
        return a.parts

    def from_coords(self, c) -> ProdElem:
        return ProdElem(c)

    def component(self, a: ProdElem, i: int):
        return a.parts[i]

    def basis_names(self) -> list[str]:
        return [f"e{i + 1}" for i in range(self.r)]

    def names(self) -> dict:
        F = self.K
        return {
            f"e{i + 1}": ProdElem([F.one if j == i else F.zero for j in range(self.r)])
            for i in range(self.r)
        }

    def inv(self, a: ProdElem) -> ProdElem:
        if any(self.K.is_zero(x) for x in a.parts):
            raise DivisionByZero(f"{a} is not a unit")
        return ProdElem(self.K.inv(x) for x in a.parts)

    def parse(self, text: str, where: str | None = None) -> ProdElem:
        return parse_expression(text, BaseContext(self), where)

    def format(self, a: ProdElem) -> str:
        if len(set(a.parts)) == 1:
            return self.K.format(a.parts[0])
        return "(" + ", ".join(self.K.format(x) for x in a.parts) + ")"

    def random_element(self, rng: random.Random, pool: Sequence = DEFAULT_POOL) -> ProdElem:
        return ProdElem([self.K(rng.choice(pool)) for _ in range(self.r)])

    def to_json(self):
        return {"kind": "product_ring", "field": self.K.to_json(), "r": self.r}


# --- automorphisms -------------------------------------------------------


class LinearAutomorphism:
    """K-linear automorphism of a finite-dimensional base ring.

    ``matrix[i][j]`` is the i-th coordinate of sigma(basis_j), so the new
    coordinates are ``matrix @ coords``.
    """

    def __init__(self, ring, matrix: Sequence[Sequence]):
        self.ring = ring
        F = ring.K
        self.matrix = tuple(tuple(F(x) for x in r) for r in matrix)
        d = ring.dim
        if len(self.matrix) != d or any(len(r) != d for r in self.matrix):
            raise InvalidInput(f"automorphism matrix must be {d}x{d}")
        self.is_identity = all(
            self.matrix[i][j] == (F.one if i == j else F.zero) for i in range(d) for j in range(d)
        )

    def __repr__(self):
        return f"LinearAutomorphism({[[str(x) for x in r] for r in self.matrix]})"

    def __eq__(self, other):
        return isinstance(other, LinearAutomorphism) and other.matrix == self.matrix

    def __hash__(self):
        return hash(self.matrix)

    @classmethod
    def identity(cls, ring) -> "LinearAutomorphism":
        F = ring.K
        d = ring.dim
        return cls(ring, [[F.one if i == j else F.zero for j in range(d)] for i in range(d)])

    @classmethod
    def permutation(cls, ring: ProductRing, perm: Sequence[int]) -> "LinearAutomorphism":
        """sigma(x)_i = x_{perm[i]}."""
        F = ring.K
        if sorted(perm) != list(range(ring.r)):
            raise InvalidInput(f"{perm} is not a permutation of {ring.r} components")
        return cls(ring, [[F.one if j == perm[i] else F.zero for j in range(ring.r)] for i in range(ring.r)])

    @classmethod
    def conjugation(cls, ring: MatrixRing, g) -> "LinearAutomorphism":
        """sigma(x) = g x g^{-1}."""
        g = g if isinstance(g, MatElem) else ring.from_rows(g)
        gi = ring.inv(g)
        cols = []
        for e in range(ring.dim):
            basis = [ring.K.zero] * ring.dim
            basis[e] = ring.K.one
            cols.append(ring.coords(g * ring.from_coords(basis) * gi))
        return cls(ring, [[cols[j][i] for j in range(ring.dim)] for i in range(ring.dim)])

    @classmethod
    def from_images(cls, ring, images: Sequence) -> "LinearAutomorphism":
        """Images of the K-basis elements (in ``basis_names`` order)."""
        cols = [ring.coords(x) for x in images]
        d = ring.dim
        return cls(ring, [[cols[j][i] for j in range(d)] for i in range(d)])

    def apply(self, a):
        if self.is_identity:
            return a
        c = self.ring.coords(a)
        F = self.ring.K
        out = []
        for r in self.matrix:
            acc = F.zero
            for m, x in zip(r, c):
                if m != 0 and x != 0:
                    acc = acc + m * x
            out.append(acc)
        return self.ring.from_coords(out)

    __call__ = apply

    def compose(self, other: "LinearAutomorphism") -> "LinearAutomorphism":
        """self after other."""
        F = self.ring.K
        d = self.ring.dim
        M, N = self.matrix, other.matrix
        return LinearAutomorphism(
            self.ring,
            [[sum((M[i][k] * N[k][j] for k in range(d)), F.zero) for j in range(d)] for i in range(d)],
        )

    def inverse(self) -> "LinearAutomorphism":
        return LinearAutomorphism(self.ring, inverse_matrix(self.matrix, self.ring.K))

    def power(self, k: int) -> "LinearAutomorphism":
        base = self if k >= 0 else self.inverse()
        out = LinearAutomorphism.identity(self.ring)
        for _ in range(abs(k)):
            out = base.compose(out)
        return out

    def check(self) -> list[str]:
        """Problems found: non-bijective, not unital, not multiplicative on basis pairs."""
        R = self.ring
        F = R.K
        problems = []
        red, _ = row_reduce(self.matrix, F)
        if len(red) < R.dim:
            problems.append("not bijective")
        if self.apply(R.one) != R.one:
            problems.append("does not fix 1")
        basis = []
        for e in range(R.dim):
            c = [F.zero] * R.dim
            c[e] = F.one
            basis.append(R.from_coords(c))
        for a in basis:
            for b in basis:
                if self.apply(a * b) != self.apply(a) * self.apply(b):
                    problems.append(f"not multiplicative on {R.format(a)}, {R.format(b)}")
                    return problems
        return problems

    def to_json(self):
        return [[self.ring.K.format(x) for x in r] for r in self.matrix]


class IdentityAutomorphism:
    """Trivial action on any ring (no coordinates needed)."""

    is_identity = True

    def apply(self, a):
        return a

    __call__ = apply

    def compose(self, other):
        return other

    def inverse(self):
        return self

    def power(self, k):
        return self

    def check(self):
        return []

    def __eq__(self, other):
        return isinstance(other, IdentityAutomorphism) or (
            isinstance(other, LinearAutomorphism) and other.is_identity
        )

    def __hash__(self):
        return hash("id")

    def __repr__(self):
        return "IdentityAutomorphism()"


def scalar_pool(field, pool=DEFAULT_POOL):
    return [field(x) for x in pool]


__all__ = [
    "BaseContext",
    "MatElem",
    "MatrixRing",
    "ProdElem",
    "ProductRing",
    "LinearAutomorphism",
    "IdentityAutomorphism",
]
