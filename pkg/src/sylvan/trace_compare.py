"""Trace ranks for group algebras and their comparison with window limits.

For a finite group the GNS space of the canonical trace is the twisted group
algebra itself, acting on itself by left multiplication, and the trace of the
image projection is the rank of the left-regular matrix divided by |Gamma|.
The window side uses right multiplication (rows u_k A), so equality of the
two sides is a real check, not a tautology.

For Gamma = Z^d with scalar coefficients the trace rank is the rank of the
symbol A(z) at almost every point of the torus, which equals the rank over
the rational function field; it is computed by the generic-rank oracle.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import InvalidInput, NotStabilized
from .extension_rank import LimitReport, limit_rank
from .linalg import GenericRankResult, Matrix, generic_rank
from .rank_functions import FieldRank, ProductRingRank, RankFunction
from .rings.base import ProductRing
from .rings.extensions import CrossedProduct
from .rings.groups import FiniteGroup, ZdGroup
from .scalars import QQ, MultiPoly

__all__ = [
    "TraceSpec",
    "trace_algebra",
    "left_regular",
    "trace_rank_finite",
    "TraceRank",
    "trace_rank_Z",
    "laurent_to_poly",
    "adjoint",
    "CompareReport",
    "trace_window_compare",
    "theorem_1_3_compare",
    "klein_cocycle",
]


@dataclass
class TraceSpec:
    """Group, coefficient weights (None = scalar Q) and an optional cocycle table."""

    group: object
    weights: Sequence | None = None
    cocycle: Sequence | None = None

    def build(self) -> CrossedProduct:
        return trace_algebra(self.group, self.weights, self.cocycle)


def trace_algebra(group, weights: Sequence | None = None, cocycle=None) -> CrossedProduct:
    """R^u Gamma with trivial action, R = Q or Q^k with a weighted trace."""
    if weights is None:
        R, rk = QQ, FieldRank(QQ)
    else:
        R = ProductRing(QQ, len(weights))
        rk = ProductRingRank(R, weights)
        if any(Fraction(w) <= 0 for w in weights):
            raise InvalidInput("trace weights must be positive (faithful trace)")
    if cocycle is not None:
        if not isinstance(group, FiniteGroup):
            raise InvalidInput("cocycles are only supported for finite groups")
        table = [[R.parse(x) if isinstance(x, str) else R.from_scalar(QQ(x)) if isinstance(x, int) else x
                  for x in row] for row in cocycle]
        for row in table:
            for x in row:
                try:
                    R.inv(x)
                except Exception:
                    raise InvalidInput("cocycle values must be units of the coefficient ring") from None
        cocycle = table
    return CrossedProduct(R, group, cocycle=cocycle, rank=rk)


def klein_cocycle(group: FiniteGroup | None = None):
    """u((a1,b1),(a2,b2)) = (-1)^(b1 a2) on Z/2 x Z/2; the twisted algebra is M_2(Q)."""
    if group is None:
        z2 = FiniteGroup.cyclic(2, "a")
        group = FiniteGroup.direct_product(z2, FiniteGroup.cyclic(2, "b"))
    # direct_product indexes (a, b) as a * 2 + b
    table = [[(-1) ** ((x % 2) * (y // 2)) for y in range(4)] for x in range(4)]
    return group, table


def _check_finite_trace(ext):
    if not isinstance(ext, CrossedProduct) or not ext.group.finite:
        raise InvalidInput("finite trace ranks need a crossed product over a finite group")
    if not ext.trivial_action:
        raise InvalidInput("trace ranks are implemented for trivial actions only")


def left_regular(A: Matrix) -> Matrix:
    """Block (i, j) is L(A_ij) with L(a)[g][h] = coefficient of g in a * h."""
    ext = A.ring
    _check_finite_trace(ext)
    G = ext.group
    R = ext.base
    n = G.order()
    rows = [[R.zero] * (A.ncols * n) for _ in range(A.nrows * n)]
    for i, r in enumerate(A.rows):
        for j, a in enumerate(r):
            for s, f in a.terms.items():
                for h in range(n):
                    g = G.mul(s, h)
                    c = f * ext.cocycle(s, h)
                    x = rows[i * n + g][j * n + h]
                    rows[i * n + g][j * n + h] = x + c
    return Matrix(R, rows, A.nrows * n, A.ncols * n)


def trace_rank_finite(A: Matrix, rank: RankFunction | None = None) -> Fraction:
    """rk(left-regular matrix) / |Gamma|."""
    ext = A.ring
    _check_finite_trace(ext)
    rk = rank or ext.rank
    if A.nrows == 0 or A.ncols == 0:
        return Fraction(0)
    return Fraction(rk.evaluate(left_regular(A))) / ext.group.order()


class TraceRank(RankFunction):
    def __init__(self, ext, rank: RankFunction | None = None):
        _check_finite_trace(ext)
        self.ring = ext
        self.base_rank = rank or ext.rank

    def evaluate(self, A: Matrix) -> Fraction:
        return trace_rank_finite(A, self.base_rank)

    def describe(self):
        return {"type": "trace", "group_order": self.ring.group.order()}


def adjoint(A: Matrix, base_star=None) -> Matrix:
    """A* = conjugate transpose, entrywise via the twisted involution."""
    ext = A.ring
    rows = [[ext.star(A.rows[i][j], base_star) for i in range(A.nrows)] for j in range(A.ncols)]
    return Matrix(ext, rows, A.ncols, A.nrows)


# --- Gamma = Z^d ----------------------------------------------------------


def laurent_to_poly(A: Matrix) -> Matrix:
    """Multiply by a monomial so every entry is a polynomial in z_1..z_d."""
    ext = A.ring
    if not isinstance(ext, CrossedProduct) or not isinstance(ext.group, ZdGroup):
        raise InvalidInput("expected a matrix over K[Z^d]")
    if not ext.trivial_action or ext.base != QQ:
        raise InvalidInput("the generic-rank oracle needs scalar rational coefficients and a trivial action")
    d = ext.group.d
    names = list(ext.group.names)
    shift = [0] * d
    for a in A.entries():
        for k in a.terms:
            for v in range(d):
                shift[v] = min(shift[v], k[v])
    # MultiPoly sorts its variables; reorder exponents to match
    order = sorted(range(d), key=lambda v: names[v])
    variables = [names[v] for v in order]

    def conv(a):
        terms = {tuple(k[v] - shift[v] for v in order): c for k, c in a.terms.items()}
        return MultiPoly(QQ, variables, terms)

    return A.map(conv, None)


def trace_rank_Z(A: Matrix, trials: int = 5, prime_bits: int = 62, rng=None) -> GenericRankResult:
    """Rank of the symbol over Q(z_1..z_d), with its Schwartz-Zippel bound."""
    if A.nrows == 0 or A.ncols == 0:
        return GenericRankResult(0, Fraction(0), (), trials)
    return generic_rank(laurent_to_poly(A), trials=trials, prime_bits=prime_bits, rng=rng)


def bandwidth(A: Matrix) -> int:
    """Largest exponent spread over all entries (Z only)."""
    ks = [k[0] for a in A.entries() for k in a.terms]
    return max(ks) - min(ks) if ks else 0


# --- comparison -----------------------------------------------------------


@dataclass
class CompareReport:
    trace_rank: Fraction
    window: LimitReport | None
    verdict: str
    difference: Fraction | None = None
    error_bound: Fraction | None = None
    step_bounds: list = field(default_factory=list)

    @property
    def agree(self) -> bool:
        return self.verdict == "equal"

    def to_json(self):
        out = {
            "trace_rank": str(self.trace_rank),
            "window_report": None if self.window is None else self.window.to_json(),
            "verdict": self.verdict,
        }
        if self.difference is not None:
            out["difference"] = str(self.difference)
        if self.error_bound is not None:
            out["oracle_error_bound"] = str(self.error_bound)
        if self.step_bounds:
            out["step_bounds"] = self.step_bounds
        return out


def trace_window_compare(A: Matrix, schedule=None, kappa: int = 3, tol=0, exhaust: bool | None = None,
                        rng=None) -> CompareReport:
    """Trace rank against the window limit (full group, or boxes over Z)."""
    ext = A.ring
    if isinstance(ext, CrossedProduct) and ext.group.finite:
        tr = trace_rank_finite(A)
        rep = limit_rank(A, schedule or "group:full", kappa, tol)
        if not rep.stabilized:
            raise NotStabilized("window side did not stabilize", rep)
        diff = abs(rep.stabilized_value - tr)
        return CompareReport(tr, rep, "equal" if diff == 0 else "different", diff)
    oracle = trace_rank_Z(A, rng=rng)
    tr = Fraction(oracle.rank)
    rep = limit_rank(A, schedule or "box:2^k,k=2..8", kappa, tol, exhaust=True if exhaust is None else exhaust)
    n = A.nrows
    bw = bandwidth(A) if ext.group.d == 1 else None
    steps = []
    for s in rep.samples:
        if bw is None:
            break
        side = round(s.dim ** (1 / ext.group.d))
        bound = Fraction(n * bw, side)
        steps.append({"dimW": s.dim, "deviation": str(abs(s.normalized - tr)), "bound": str(bound),
                      "pass": abs(s.normalized - tr) <= bound})
    if not rep.stabilized:
        return CompareReport(tr, rep, "not-stabilized", None, oracle.error_bound, steps)
    diff = abs(rep.stabilized_value - tr)
    verdict = "equal" if diff <= Fraction(tol) else "different"
    return CompareReport(tr, rep, verdict, diff, oracle.error_bound, steps)


# alias kept for callers of the original operation name
theorem_1_3_compare = trace_window_compare
