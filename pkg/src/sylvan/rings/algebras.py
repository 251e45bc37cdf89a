"""Commutative K-algebras with a distinguished K-basis ("keys").

These describe the E in E (x)_K R: the polynomial part K[t] of K(t), finite
extensions E_0/K given by structure constants, and tensor products of the two.
``mul_keys(a, b)`` returns the product of two basis elements as a dict
key -> K-coefficient.
"""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from ..errors import InvalidInput
from ..linalg import Matrix, rank_field
from ..scalars import DEFAULT_POOL, MultiPoly


class PolyAlgebra:
    """K[t] with keys k >= 0 standing for t^k."""

    finite = False
    monomial = True  # products of keys are single keys with coefficient 1

    def __init__(self, field, var: str = "t"):
        self.K = field
        self.var = var
        self.one_key = 0

    def __repr__(self):
        return f"{self.K.name}[{self.var}]"

    def __eq__(self, other):
        return isinstance(other, PolyAlgebra) and other.K == self.K and other.var == self.var

    def __hash__(self):
        return hash(("poly", self.var))

    def mul_keys(self, a: int, b: int) -> dict:
        return {a + b: self.K.one}

    def mul_key(self, a: int, b: int) -> int:
        return a + b

    def valid_key(self, k) -> bool:
        return isinstance(k, int) and k >= 0

    def sort_key(self, k):
        return k

    def format_key(self, k: int) -> str:
        if k == 0:
            return ""
        return self.var if k == 1 else f"{self.var}^{k}"

    def key_names(self) -> dict:
        return {self.var: 1}

    def degree_keys(self, n: int) -> list:
        """Keys spanning polynomials of degree < n."""
        return list(range(n))

    def key_degree(self, k) -> int:
        return k

    def to_json(self):
        return {"kind": "poly", "var": self.var}


class FiniteAlgebra:
    """Finite-dimensional commutative K-algebra b_1=1, b_2, ..., b_d.

    ``constants[i][j]`` is the coordinate list of b_i * b_j. Construction
    validates unit, commutativity and associativity exhaustively and, when
    ``require_field`` is set, field-ness by sampled invertibility.
    """

    finite = True
    monomial = False

    def __init__(self, field, names: Sequence[str], constants, conjugation=None,
                 require_field: bool = True, samples: int = 40, seed: int = 0):
        d = len(names)
        if d < 1:
            raise InvalidInput("extension degree must be positive")
        self.K = field
        self.d = d
        self.names = tuple(names)
        self.one_key = 0
        C = [[tuple(field(x) for x in constants[i][j]) for j in range(d)] for i in range(d)]
        for i in range(d):
            for j in range(d):
                if len(C[i][j]) != d:
                    raise InvalidInput(f"structure constants for b{i + 1}*b{j + 1} need {d} entries")
        self.C = C
        self._mul = [[{k: c for k, c in enumerate(C[i][j]) if c != 0} for j in range(d)] for i in range(d)]
        self._validate_algebra()
        self.conj = None
        if conjugation is not None:
            self.conj = tuple(tuple(field(x) for x in row) for row in conjugation)
        if require_field:
            self._validate_field(samples, seed)

    def __repr__(self):
        return f"FiniteAlgebra({list(self.names)})"

    def __eq__(self, other):
        return isinstance(other, FiniteAlgebra) and other.C == self.C and other.names == self.names

    def __hash__(self):
        return hash(self.names)

    # validation
    def _validate_algebra(self):
        d, F = self.d, self.K
        for j in range(d):
            e = [F.one if k == j else F.zero for k in range(d)]
            if list(self.C[0][j]) != e or list(self.C[j][0]) != e:
                raise InvalidInput("b1 must act as the identity")
        for i in range(d):
            for j in range(d):
                if self.C[i][j] != self.C[j][i]:
                    raise InvalidInput(f"not commutative on b{i + 1}, b{j + 1}")
        for i, j, k in itertools.product(range(d), repeat=3):
            left = self.mul_vec(self.mul_vec(self.basis_vec(i), self.basis_vec(j)), self.basis_vec(k))
            right = self.mul_vec(self.basis_vec(i), self.mul_vec(self.basis_vec(j), self.basis_vec(k)))
            if left != right:
                raise InvalidInput(f"not associative on b{i + 1}, b{j + 1}, b{k + 1}")

    def _validate_field(self, samples: int, seed: int):
        rng = random.Random(seed)
        cands = [self.basis_vec(i) for i in range(self.d)]
        for _ in range(samples):
            cands.append([self.K(rng.choice(DEFAULT_POOL + (3, -3, 5))) for _ in range(self.d)])
        for v in cands:
            if all(x == 0 for x in v):
                continue
            if rank_field(Matrix(self.K, self.regular_matrix(v))) != self.d:
                raise InvalidInput(f"not a field: {self.format_vec(v)} is a zero divisor")

    # vector arithmetic over K
    def basis_vec(self, i: int) -> list:
        return [self.K.one if k == i else self.K.zero for k in range(self.d)]

    def mul_vec(self, a: Sequence, b: Sequence) -> list:
        out = [self.K.zero] * self.d
        for i, x in enumerate(a):
            if x == 0:
                continue
            for j, y in enumerate(b):
                if y == 0:
                    continue
                xy = x * y
                for k, c in self._mul[i][j].items():
                    out[k] = out[k] + xy * c
        return out

    def regular_matrix(self, a: Sequence) -> list[list]:
        """Row k holds the coordinates of b_k * a."""
        return [self.mul_vec(self.basis_vec(k), a) for k in range(self.d)]

    def format_vec(self, v) -> str:
        return " + ".join(f"{self.K.format(x)}*{n}" for x, n in zip(v, self.names) if x != 0) or "0"

    # key interface
    def mul_keys(self, a: int, b: int) -> dict:
        return self._mul[a][b]

    def valid_key(self, k) -> bool:
        return isinstance(k, int) and 0 <= k < self.d

    def sort_key(self, k):
        return k

    def format_key(self, k: int) -> str:
        return "" if k == 0 else self.names[k]

    def key_names(self) -> dict:
        return {n: i for i, n in enumerate(self.names) if i and n.isidentifier()}

    def all_keys(self) -> list:
        return list(range(self.d))

    def to_json(self):
        F = self.K
        out = {
            "kind": "finite",
            "field": F.to_json(),
            "names": list(self.names),
            "structure_constants": [[[F.format(x) for x in self.C[i][j]] for j in range(self.d)] for i in range(self.d)],
        }
        if self.conj is not None:
            out["conjugation"] = [[F.format(x) for x in r] for r in self.conj]
        return out

    # constructors
    @classmethod
    def from_minimal_polynomial(cls, field, coeffs: Sequence, var: str = "u", names=None, conjugation=None):
        """K[u]/(f) for monic f = u^d + c_{d-1}u^{d-1} + ... + c_0 (coeffs low to high, monic)."""
        coeffs = [field(c) for c in coeffs]
        d = len(coeffs) - 1
        if d < 1 or coeffs[-1] != field.one:
            raise InvalidInput("minimal polynomial must be monic of degree >= 1")

        def reduce(k):
            v = [field.zero] * (2 * d)
            v[k] = field.one
            for e in range(2 * d - 1, d - 1, -1):
                c = v[e]
                if c != 0:
                    v[e] = field.zero
                    for j in range(d):
                        v[e - d + j] = v[e - d + j] - c * coeffs[j]
            return v[:d]

        constants = [[reduce(i + j) for j in range(d)] for i in range(d)]
        if names is None:
            names = ["1"] + [var if k == 1 else f"{var}{k}" for k in range(1, d)]
        return cls(field, names, constants, conjugation=conjugation)

    @classmethod
    def gaussian_rationals(cls, field, name: str = "i") -> "FiniteAlgebra":
        """K(i) with i^2 = -1 and complex conjugation declared."""
        one, zero = field.one, field.zero
        return cls.from_minimal_polynomial(
            field, [one, zero, one], names=["1", name], conjugation=[[one, zero], [zero, -one]]
        )

    @classmethod
    def tensor(cls, a: "FiniteAlgebra", b: "FiniteAlgebra", sep: str = "*") -> "FiniteAlgebra":
        """a (x)_K b with basis a_i (x) b_j at index i*b.d + j (validated as a field)."""
        F = a.K
        names = []
        for i in range(a.d):
            for j in range(b.d):
                parts = [x for x in (a.format_key(i), b.format_key(j)) if x]
                names.append(sep.join(parts) if parts else "1")
        constants = []
        for i1 in range(a.d):
            for j1 in range(b.d):
                row = []
                for i2 in range(a.d):
                    for j2 in range(b.d):
                        va = a.mul_vec(a.basis_vec(i1), a.basis_vec(i2))
                        vb = b.mul_vec(b.basis_vec(j1), b.basis_vec(j2))
                        row.append([va[x] * vb[y] for x in range(a.d) for y in range(b.d)])
                constants.append(row)
        out = cls(F, names, constants)
        out.factor_dims = (a.d, b.d)
        return out

    def embed_index(self, i: int) -> int:
        """Index of b_i (x) 1 inside a tensor product built by :meth:`tensor`."""
        return i * self.factor_dims[1]


class TensorAlgebra:
    """Tensor product of two key algebras; keys are pairs."""

    monomial = False

    def __init__(self, a, b):
        if a.K != b.K:
            raise InvalidInput("tensor factors over different fields")
        self.K = a.K
        self.a = a
        self.b = b
        self.one_key = (a.one_key, b.one_key)
        self.finite = a.finite and b.finite

    def __repr__(self):
        return f"({self.a!r} (x) {self.b!r})"

    def __eq__(self, other):
        return isinstance(other, TensorAlgebra) and other.a == self.a and other.b == self.b

    def __hash__(self):
        return hash((self.a, self.b))

    def mul_keys(self, x, y) -> dict:
        pa = self.a.mul_keys(x[0], y[0])
        pb = self.b.mul_keys(x[1], y[1])
        out = {}
        for ka, ca in pa.items():
            for kb, cb in pb.items():
                out[(ka, kb)] = ca * cb
        return out

    def valid_key(self, k) -> bool:
        return isinstance(k, tuple) and len(k) == 2 and self.a.valid_key(k[0]) and self.b.valid_key(k[1])

    def sort_key(self, k):
        return (self.a.sort_key(k[0]), self.b.sort_key(k[1]))

    def format_key(self, k) -> str:
        parts = [x for x in (self.a.format_key(k[0]), self.b.format_key(k[1])) if x]
        return "*".join(parts)

    def key_names(self) -> dict:
        out = {n: (k, self.b.one_key) for n, k in self.a.key_names().items()}
        out.update({n: (self.a.one_key, k) for n, k in self.b.key_names().items()})
        return out

    def degree_keys(self, n: int) -> list:
        """Keys (t^k, b) with k < n and b running over the finite factor."""
        if isinstance(self.a, PolyAlgebra) and self.b.finite:
            return [(k, j) for k in range(n) for j in self.b.all_keys()]
        if isinstance(self.a, PolyAlgebra) and isinstance(self.b, PolyAlgebra):
            return [(i, j) for i in range(n) for j in range(n)]
        raise InvalidInput("degree windows need a polynomial factor")

    def key_degree(self, k) -> int:
        return max(getattr(self.a, "key_degree", lambda _: 0)(k[0]), getattr(self.b, "key_degree", lambda _: 0)(k[1]))

    def all_keys(self) -> list:
        return [(x, y) for x in self.a.all_keys() for y in self.b.all_keys()]

    def to_json(self):
        return {"kind": "tensor", "factors": [self.a.to_json(), self.b.to_json()]}


def poly_to_key_dict(p: MultiPoly) -> dict:
    """Univariate polynomial -> {power: coefficient}."""
    return {e[0]: c for e, c in p.terms.items()}


__all__ = ["PolyAlgebra", "FiniteAlgebra", "TensorAlgebra", "poly_to_key_dict"]
