"""Dense matrices over any ring, exact field rank, float rank, generic rank."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Any, Callable, Iterable, Sequence

import gmpy2
import numpy as np

from . import kernels
from .errors import DivisionByZero, EvaluationFailure, InvalidInput, ParseError
from .expr import split_matrix_literal
from .scalars import QQ, MultiPoly, PrimeField, RatFunc, RationalField

__all__ = [
    "Matrix",
    "rank_field",
    "bareiss_rank",
    "rank_float",
    "generic_rank",
    "GenericRankResult",
    "row_reduce",
    "matrix_to_json",
    "matrix_from_json",
    "parse_matrix",
]


class Matrix:
    """Immutable n x m matrix whose entries all come from ``ring``."""

    __slots__ = ("ring", "nrows", "ncols", "rows")

    def __init__(self, ring, rows: Iterable[Sequence], nrows: int | None = None, ncols: int | None = None):
        rows = tuple(tuple(r) for r in rows)
        if nrows is None:
            nrows = len(rows)
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if len(rows) != nrows or any(len(r) != ncols for r in rows):
            raise InvalidInput(f"entries do not form a {nrows}x{ncols} array")
        self.ring = ring
        self.nrows = nrows
        self.ncols = ncols
        self.rows = rows

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return (
            isinstance(other, Matrix)
            and self.shape == other.shape
            and all(a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb))
        )

    def __hash__(self):
        return hash((self.shape, self.rows))

    def __repr__(self):
        fmt = getattr(self.ring, "format", str)
        body = ", ".join("[" + ", ".join(fmt(x) for x in r) + "]" for r in self.rows)
        return f"Matrix({self.nrows}x{self.ncols}, [{body}])"

    # constructors
    @classmethod
    def zeros(cls, ring, n: int, m: int) -> "Matrix":
        z = ring.zero
        return cls(ring, [[z] * m for _ in range(n)], n, m)

    @classmethod
    def identity(cls, ring, n: int) -> "Matrix":
        return cls(ring, [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def permutation(cls, ring, perm: Sequence[int]) -> "Matrix":
        """Row i of the result is e_{perm[i]}."""
        n = len(perm)
        return cls(ring, [[ring.one if j == perm[i] else ring.zero for j in range(n)] for i in range(n)], n, n)

    @classmethod
    def block_diag(cls, a: "Matrix", b: "Matrix") -> "Matrix":
        return cls.blocks([[a, None], [None, b]], a.ring)

    @classmethod
    def blocks(cls, grid: Sequence[Sequence["Matrix | None"]], ring) -> "Matrix":
        """Assemble a block matrix; ``None`` blocks are zero of the inferred size."""
        heights = [next(b.nrows for b in row if b is not None) for row in grid]
        widths = [next(grid[i][j].ncols for i in range(len(grid)) if grid[i][j] is not None) for j in range(len(grid[0]))]
        out = []
        for bi, row in enumerate(grid):
            for r in range(heights[bi]):
                line = []
                for bj, blk in enumerate(row):
                    if blk is None:
                        line.extend([ring.zero] * widths[bj])
                    else:
                        if blk.shape != (heights[bi], widths[bj]):
                            raise InvalidInput("block shapes do not line up")
                        line.extend(blk.rows[r])
                out.append(line)
        return cls(ring, out, sum(heights), sum(widths))

    # arithmetic
    def _same(self, other: "Matrix"):
        if self.shape != other.shape:
            raise InvalidInput(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same(other)
        return Matrix(self.ring, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.nrows, self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same(other)
        return Matrix(self.ring, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.nrows, self.ncols)

    def __neg__(self):
        return self.map(lambda x: -x)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.nrows:
            raise InvalidInput(f"cannot multiply {self.shape} by {other.shape}")
        z = self.ring.zero
        cols = list(zip(*other.rows)) if other.rows else [()] * other.ncols
        out = []
        for r in self.rows:
            line = []
            for c in cols:
                acc = z
                for a, b in zip(r, c):
                    acc = acc + a * b
                line.append(acc)
            out.append(line)
        return Matrix(self.ring, out, self.nrows, other.ncols)

    def transpose(self) -> "Matrix":
        cols = [[r[j] for r in self.rows] for j in range(self.ncols)]
        return Matrix(self.ring, cols, self.ncols, self.nrows)

    def map(self, f: Callable[[Any], Any], ring=None) -> "Matrix":
        return Matrix(ring or self.ring, [[f(x) for x in r] for r in self.rows], self.nrows, self.ncols)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        return Matrix(self.ring, [[self.rows[i][j] for j in cols] for i in rows], len(rows), len(cols))

    def entries(self):
        for r in self.rows:
            yield from r


# --- exact rank ---------------------------------------------------------


def _int_rows(A: Matrix) -> list[list[int]]:
    """Scale each rational row by the lcm of its denominators."""
    out = []
    for r in A.rows:
        d = 1
        for x in r:
            if x.denominator != 1:
                d = lcm(d, x.denominator)
        if d == 1:
            out.append([x.numerator for x in r])
        else:
            out.append([x.numerator * (d // x.denominator) for x in r])
    return out


def rank_field(A: Matrix) -> int:
    """Exact rank of a matrix over QQ or GF(p)."""
    if A.nrows == 0 or A.ncols == 0:
        return 0
    ring = A.ring
    if isinstance(ring, RationalField):
        return kernels.rank_zz(_int_rows(A), A.ncols)
    if isinstance(ring, PrimeField):
        return kernels.rank_mod_p([[x.value for x in r] for r in A.rows], A.ncols, ring.p)
    if getattr(ring, "is_field", False) and hasattr(ring, "inv"):
        return _gauss_rank_generic(A)
    raise InvalidInput(f"rank_field needs a field, got {ring!r}")


def _gauss_rank_generic(A: Matrix) -> int:
    """Plain Gaussian elimination over any field descriptor with ``inv``."""
    F = A.ring
    rows = [list(r) for r in A.rows]
    rank = 0
    for c in range(A.ncols):
        piv = next((i for i in range(rank, len(rows)) if not F.is_zero(rows[i][c])), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = F.inv(rows[rank][c])
        for i in range(rank + 1, len(rows)):
            if not F.is_zero(rows[i][c]):
                f = rows[i][c] * inv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def bareiss_rank(A: Matrix) -> int:
    """Dense fraction-free Bareiss elimination over Q (reference route)."""
    if A.nrows == 0 or A.ncols == 0:
        return 0
    M = _int_rows(A) if isinstance(A.ring, RationalField) else [[int(x) for x in r] for r in A.rows]
    n, m = len(M), len(M[0])
    prev = 1
    rank = 0
    for c in range(m):
        piv = next((i for i in range(rank, n) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        p = M[rank][c]
        for i in range(rank + 1, n):
            a = M[i][c]
            M[i] = [(p * M[i][j] - a * M[rank][j]) // prev for j in range(m)]
        prev = p
        rank += 1
        if rank == n:
            break
    return rank


def rank_float(A, rel_tol: float = 1e-8) -> int:
    """Numerical rank: singular values above ``rel_tol`` times the largest."""
    if not 0 < rel_tol < 1:
        raise InvalidInput("rel_tol must lie in (0, 1)")
    if isinstance(A, Matrix):
        arr = np.array([[complex(x) for x in r] for r in A.rows], dtype=complex).reshape(A.nrows, A.ncols)
    else:
        arr = np.asarray(A, dtype=complex)
    if arr.size == 0:
        return 0
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("non-finite entry")
    s = np.linalg.svd(arr, compute_uv=False)
    if s[0] == 0:
        return 0
    return int(np.sum(s > rel_tol * s[0]))


# --- generic rank -------------------------------------------------------


@dataclass(frozen=True)
class GenericRankResult:
    rank: int
    error_bound: Fraction
    primes: tuple[int, ...]
    trials: int

    def __int__(self):
        return self.rank


def random_prime(bits: int, rng: random.Random) -> int:
    """Random prime with exactly ``bits`` bits."""
    while True:
        cand = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if gmpy2.is_prime(cand, 40):
            return cand


def _as_ratfunc(x, variables):
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, MultiPoly):
        return RatFunc(x)
    return RatFunc(MultiPoly.constant(QQ, variables, x))


def generic_rank(A: Matrix, trials: int = 5, prime_bits: int = 62, rng: random.Random | None = None,
                 retries: int = 20) -> GenericRankResult:
    """Rank over the fraction field by random evaluation modulo random primes.

    Each trial evaluates the entries at a uniformly random nonzero point of
    GF(p)^d and takes the exact rank there; the maximum over trials is
    returned. A nonzero r x r minor of total degree at most r*D vanishes at a
    random point with probability at most r*D/(p-1) (Schwartz-Zippel); that
    number is reported as ``error_bound``. It does not cover the event that p
    divides every coefficient of the minor, which for 62-bit primes has
    negligible probability on desk-scale inputs.
    """
    if trials < 1 or prime_bits < 30:
        raise InvalidInput("need trials >= 1 and prime_bits >= 30")
    rng = rng or random.Random(0)
    if A.nrows == 0 or A.ncols == 0:
        return GenericRankResult(0, Fraction(0), (), trials)
    entries = list(A.entries())
    variables = next((x.variables for x in entries if isinstance(x, (MultiPoly, RatFunc))), ())
    rf = [[_as_ratfunc(x, variables) for x in r] for r in A.rows]
    deg = 0
    for r in rf:
        for x in r:
            if not x.is_zero():
                deg = max(deg, x.num.total_degree(), x.den.total_degree())
    # an r x r minor of the cleared matrix has degree <= r * (sum of row degrees)
    rmax = min(A.nrows, A.ncols)
    best = 0
    primes = []
    min_p = None
    for _ in range(trials):
        p = random_prime(prime_bits, rng)
        primes.append(p)
        min_p = p if min_p is None else min(min_p, p)
        for attempt in range(retries):
            point = [rng.randrange(1, p) for _ in variables]
            try:
                vals = [[x.eval_mod(point, p) for x in r] for r in rf]
            except DivisionByZero:
                continue
            break
        else:
            raise EvaluationFailure(f"denominator vanished at {retries} random points mod {p}")
        best = max(best, kernels.rank_mod_p(vals, A.ncols, p))
        if best == rmax:
            break
    # clearing a row's denominators multiplies degrees by at most ncols + 1
    polynomial = all(x.den.total_degree() == 0 for r in rf for x in r)
    bound_deg = rmax * deg * (1 if polynomial else A.ncols + 1)
    bound = Fraction(bound_deg, min_p - 1) if bound_deg else Fraction(0)
    return GenericRankResult(best, min(bound, Fraction(1)), tuple(primes), trials)


# --- small dense linear algebra over a field ----------------------------


def row_reduce(rows: Sequence[Sequence], field) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over ``field``; returns (nonzero rows, pivot cols)."""
    M = [list(r) for r in rows]
    if not M:
        return [], []
    m = len(M[0])
    pivots = []
    rank = 0
    for c in range(m):
        piv = next((i for i in range(rank, len(M)) if not field.is_zero(M[i][c])), None)
        if piv is None:
            continue
        M[rank], M[piv] = M[piv], M[rank]
        inv = field.inv(M[rank][c])
        M[rank] = [x * inv for x in M[rank]]
        for i in range(len(M)):
            if i != rank and not field.is_zero(M[i][c]):
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        pivots.append(c)
        rank += 1
        if rank == len(M):
            break
    return M[:rank], pivots


def inverse_matrix(rows: Sequence[Sequence], field) -> list[list]:
    """Inverse of a square matrix over a field; InvalidInput when singular."""
    n = len(rows)
    aug = [list(r) + [field.one if i == j else field.zero for j in range(n)] for i, r in enumerate(rows)]
    red, piv = row_reduce(aug, field)
    if len(red) < n or piv[n - 1] != n - 1:
        raise InvalidInput("matrix is not invertible")
    return [r[n:] for r in red]


# --- JSON / text I/O ----------------------------------------------------


def matrix_to_json(A: Matrix) -> dict:
    fmt = getattr(A.ring, "format", str)
    return {"rows": A.nrows, "cols": A.ncols, "entries": [[fmt(x) for x in r] for r in A.rows]}


def parse_matrix(text_or_obj, ring, where: str | None = None) -> Matrix:
    """Read a matrix from JSON-like data or a literal such as ``"[[1 - z]]"``."""
    obj = text_or_obj
    if isinstance(obj, str):
        s = obj.strip()
        if s.startswith("{"):
            try:
                obj = json.loads(s)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc.msg}", f"{where or 'matrix'}:{exc.lineno}:{exc.colno}") from None
        else:
            obj = split_matrix_literal(s, where)
    if isinstance(obj, dict):
        return matrix_from_json(obj, ring, where)
    if isinstance(obj, list):
        n = len(obj)
        m = len(obj[0]) if n else 0
        return matrix_from_json({"rows": n, "cols": m, "entries": obj}, ring, where)
    raise ParseError("matrix must be an object or a list of rows", where)


def matrix_from_json(obj: dict, ring, where: str | None = None) -> Matrix:
    where = where or "matrix"
    try:
        n, m, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
    except (KeyError, TypeError, ValueError):
        raise ParseError("expected keys rows, cols, entries", where) from None
    if not isinstance(entries, list) or len(entries) != n:
        raise ParseError(f"expected {n} rows of entries", where)
    out = []
    for i, row in enumerate(entries):
        if not isinstance(row, list) or len(row) != m:
            raise ParseError(f"row {i} must have {m} entries", where)
        line = []
        for j, x in enumerate(row):
            loc = f"{where}[{i}][{j}]"
            text = str(x) if isinstance(x, (int, float)) and not isinstance(x, bool) else x
            if not isinstance(text, str):
                raise ParseError("entries must be strings or integers", loc)
            line.append(ring.parse(text, loc))
        out.append(line)
    return Matrix(ring, out, n, m)
