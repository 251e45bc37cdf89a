"""Sylvester matrix rank functions and the axiom property harness."""

from __future__ import annotations

import abc
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .errors import InvalidInput
from .linalg import Matrix, matrix_to_json, rank_field
from .rings.base import MatElem, MatrixRing, ProdElem, ProductRing
from .scalars import DEFAULT_POOL, QQ

__all__ = [
    "RankFunction",
    "FieldRank",
    "MatrixRingRank",
    "ProductRingRank",
    "ConvexCombination",
    "ConvexRankFunction",
    "ShiftedRank",
    "field_rank",
    "matrix_ring_rank",
    "product_ring_rank",
    "convex_combine",
    "MatrixSampler",
    "AxiomReport",
    "check_axioms",
]


class RankFunction(abc.ABC):
    """A normalized rank on matrices over ``ring`` with rational values."""

    ring = None

    @abc.abstractmethod
    def evaluate(self, A: Matrix) -> Fraction:
        ...

    def __call__(self, A: Matrix) -> Fraction:
        return self.evaluate(A)

    def describe(self) -> dict:
        return {"type": type(self).__name__}


class FieldRank(RankFunction):
    """Ordinary rank over QQ or GF(p)."""

    def __init__(self, field=QQ):
        self.ring = field

    def evaluate(self, A: Matrix) -> Fraction:
        return Fraction(rank_field(A))

    def describe(self):
        return {"type": "field", "field": self.ring.to_json()}


class MatrixRingRank(RankFunction):
    """rank of the flattened block matrix divided by k, on M_k(K)."""

    def __init__(self, ring: MatrixRing):
        self.ring = ring

    def flatten(self, A: Matrix) -> Matrix:
        k = self.ring.k
        rows = []
        for r in A.rows:
            for x in r:
                if not isinstance(x, MatElem) or len(x.rows) != k or any(len(b) != k for b in x.rows):
                    raise InvalidInput(f"entry is not a {k}x{k} block")
            for a in range(k):
                rows.append([x.rows[a][b] for x in r for b in range(k)])
        return Matrix(self.ring.K, rows, A.nrows * k, A.ncols * k)

    def evaluate(self, A: Matrix) -> Fraction:
        return Fraction(rank_field(self.flatten(A)), self.ring.k)

    def describe(self):
        return {"type": "matrix_ring", "field": self.ring.K.to_json(), "k": self.ring.k}


class ProductRingRank(RankFunction):
    """sum_i w_i * rank(i-th component) on K^r."""

    def __init__(self, ring: ProductRing, weights: Sequence):
        weights = [Fraction(w) for w in weights]
        if len(weights) != ring.r:
            raise InvalidInput(f"{len(weights)} weights for {ring.r} components")
        if any(w < 0 or w > 1 for w in weights):
            raise InvalidInput("weights must lie in [0, 1]")
        if sum(weights) != 1:
            raise InvalidInput(f"weights sum to {sum(weights)}, not 1")
        self.ring = ring
        self.weights = tuple(weights)

    def component(self, A: Matrix, i: int) -> Matrix:
        r = self.ring.r
        for x in A.entries():
            if not isinstance(x, ProdElem) or len(x.parts) != r:
                raise InvalidInput(f"entry is not an element of a {r}-fold product")
        return A.map(lambda x: x.parts[i], self.ring.K)

    def evaluate(self, A: Matrix) -> Fraction:
        total = Fraction(0)
        for i, w in enumerate(self.weights):
            if w:
                total += w * rank_field(self.component(A, i))
            else:
                self.component(A, i)  # still validates shapes
        return total

    def describe(self):
        return {"type": "product_ring", "field": self.ring.K.to_json(), "weights": [str(w) for w in self.weights]}


@dataclass(frozen=True)
class ConvexCombination:
    components: tuple  # of (weight, RankFunction)


class ConvexRankFunction(RankFunction):
    def __init__(self, parts: ConvexCombination):
        comps = [(Fraction(w), rk) for w, rk in parts.components]
        if not comps:
            raise InvalidInput("empty convex combination")
        if any(w < 0 or w > 1 for w, _ in comps):
            raise InvalidInput("weights must lie in [0, 1]")
        if sum(w for w, _ in comps) != 1:
            raise InvalidInput("weights must sum to 1")
        ring = comps[0][1].ring
        if any(rk.ring != ring for _, rk in comps):
            raise InvalidInput("components over different rings")
        self.ring = ring
        self.components = tuple(comps)

    def evaluate(self, A: Matrix) -> Fraction:
        return sum((w * rk.evaluate(A) for w, rk in self.components if w), Fraction(0))

    def describe(self):
        return {"type": "convex", "components": [[str(w), rk.describe()] for w, rk in self.components]}


class ShiftedRank(RankFunction):
    """rank + 1: a deliberately broken function for exercising the harness."""

    def __init__(self, base: RankFunction):
        self.base = base
        self.ring = base.ring

    def evaluate(self, A: Matrix) -> Fraction:
        return self.base.evaluate(A) + 1


def field_rank(field=QQ) -> FieldRank:
    return FieldRank(field)


def matrix_ring_rank(k: int, field=QQ) -> MatrixRingRank:
    return MatrixRingRank(MatrixRing(field, k))


def product_ring_rank(weights: Sequence, field=QQ) -> ProductRingRank:
    return ProductRingRank(ProductRing(field, len(weights)), weights)


def convex_combine(parts: ConvexCombination | Sequence) -> ConvexRankFunction:
    if not isinstance(parts, ConvexCombination):
        parts = ConvexCombination(tuple(parts))
    return ConvexRankFunction(parts)


# --- axiom harness ------------------------------------------------------


class MatrixSampler:
    """Random matrices over ``ring`` with sizes up to ``max_size``.

    ``element`` draws one ring element; by default the ring's own
    ``random_element`` over the small pool. About half the matrices are built
    as products through a narrow inner dimension, to make rank drops common.
    """

    def __init__(self, ring, max_size: int = 6, element: Callable | None = None,
                 pool: Sequence = DEFAULT_POOL, low_rank: float = 0.5):
        self.ring = ring
        self.max_size = max_size
        self.pool = pool
        self.low_rank = low_rank
        self._element = element

    def element(self, rng: random.Random):
        if self._element is not None:
            return self._element(rng)
        return self.ring.random_element(rng, self.pool)

    def size(self, rng: random.Random) -> int:
        return 0 if rng.random() < 0.03 else rng.randint(1, self.max_size)

    def matrix(self, rng: random.Random, n: int, m: int) -> Matrix:
        if n and m and rng.random() < self.low_rank:
            r = rng.randint(1, max(1, min(n, m) - 1))
            X = self._dense(rng, n, r)
            Y = self._dense(rng, r, m)
            return X @ Y
        return self._dense(rng, n, m)

    def _dense(self, rng, n, m) -> Matrix:
        zero = self.ring.zero
        rows = [[self.element(rng) if rng.random() < 0.8 else zero for _ in range(m)] for _ in range(n)]
        return Matrix(self.ring, rows, n, m)


@dataclass
class AxiomResult:
    axiom: str
    trials: int = 0
    failures: list = field(default_factory=list)

    def to_json(self):
        return {"axiom": self.axiom, "trials": self.trials, "failures": self.failures}


@dataclass
class AxiomReport:
    results: list
    seed: int
    trials: int

    @property
    def ok(self) -> bool:
        return all(not r.failures for r in self.results)

    def failures(self, axiom: str | None = None) -> list:
        return [f for r in self.results if axiom in (None, r.axiom) for f in r.failures]

    def to_json(self):
        return [r.to_json() for r in self.results]


AXIOMS = (
    "(i) normalization",
    "(ii) product",
    "(iii) block diagonal",
    "(iv) block upper triangular",
    "subadditivity",
    "permutation invariance",
)


def _fmt(q: Fraction) -> str:
    return str(q)


def check_axioms(rk: RankFunction, sampler: MatrixSampler | None = None, trials: int = 200,
                 seed: int = 0, max_failures: int = 5) -> AxiomReport:
    """Run every axiom check ``trials`` times; failures become report data."""
    if trials < 1:
        raise InvalidInput("trials must be >= 1")
    sampler = sampler or MatrixSampler(rk.ring)
    R = sampler.ring
    rng = random.Random(seed)
    res = {a: AxiomResult(a) for a in AXIOMS}

    def fail(axiom, inputs, relation, got):
        r = res[axiom]
        if len(r.failures) < max_failures:
            r.failures.append({
                "inputs": {k: matrix_to_json(v) for k, v in inputs.items()},
                "expected_relation": relation,
                "got": got,
            })

    for _ in range(trials):
        n, m, k = sampler.size(rng), sampler.size(rng), sampler.size(rng)
        A = sampler.matrix(rng, n, m)
        B = sampler.matrix(rng, m, k)
        rA, rB = rk(A), rk(B)

        ax = "(i) normalization"
        res[ax].trials += 1
        Z = Matrix.zeros(R, n, m)
        z, o = rk(Z), rk(Matrix.identity(R, 1))
        if z != 0 or o != 1:
            fail(ax, {"zero": Z}, "rk(0) = 0 and rk([1]) = 1", {"rk(0)": _fmt(z), "rk(1)": _fmt(o)})

        ax = "(ii) product"
        res[ax].trials += 1
        rAB = rk(A @ B)
        if rAB > min(rA, rB):
            fail(ax, {"A": A, "B": B}, "rk(AB) <= min(rk(A), rk(B))",
                 {"rk(AB)": _fmt(rAB), "rk(A)": _fmt(rA), "rk(B)": _fmt(rB)})

        ax = "(iii) block diagonal"
        res[ax].trials += 1
        C = sampler.matrix(rng, sampler.size(rng), sampler.size(rng))
        rC = rk(C)
        D = Matrix.blocks([[A, Matrix.zeros(R, n, C.ncols)], [Matrix.zeros(R, C.nrows, m), C]], R)
        rD = rk(D)
        if rD != rA + rC:
            fail(ax, {"A": A, "B": C}, "rk(diag(A,B)) = rk(A) + rk(B)",
                 {"rk(diag)": _fmt(rD), "rk(A)": _fmt(rA), "rk(B)": _fmt(rC)})

        ax = "(iv) block upper triangular"
        res[ax].trials += 1
        X = sampler.matrix(rng, n, C.ncols)
        T = Matrix.blocks([[A, X], [Matrix.zeros(R, C.nrows, m), C]], R)
        rT = rk(T)
        if rT < rA + rC:
            fail(ax, {"A": A, "C": X, "B": C}, "rk([[A,C],[0,B]]) >= rk(A) + rk(B)",
                 {"rk(T)": _fmt(rT), "rk(A)": _fmt(rA), "rk(B)": _fmt(rC)})

        ax = "subadditivity"
        res[ax].trials += 1
        A2 = sampler.matrix(rng, n, m)
        rS, rA2 = rk(A + A2), rk(A2)
        if rS > rA + rA2:
            fail(ax, {"A": A, "B": A2}, "rk(A+B) <= rk(A) + rk(B)",
                 {"rk(A+B)": _fmt(rS), "rk(A)": _fmt(rA), "rk(B)": _fmt(rA2)})

        ax = "permutation invariance"
        res[ax].trials += 1
        P = Matrix.permutation(R, rng.sample(range(n), n))
        Q = Matrix.permutation(R, rng.sample(range(m), m))
        rP = rk(P @ A @ Q)
        if rP != rA:
            fail(ax, {"A": A, "P": P, "Q": Q}, "rk(PAQ) = rk(A)", {"rk(PAQ)": _fmt(rP), "rk(A)": _fmt(rA)})

    return AxiomReport([res[a] for a in AXIOMS], seed, trials)
