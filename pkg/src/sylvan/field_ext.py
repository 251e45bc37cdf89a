"""Ranks on field extensions: companion representations, evaluation points,
finite extensions by structure constants, and tower composition.

For R[t] (the polynomial part of K(t) (x)_K R) and a monic f of degree d,
right multiplication on R[t]/R[t]f in the basis 1, t, ..., t^(d-1) gives a
unital homomorphism psi_f: R[t] -> M_d(R); row k of psi_f(a) holds the
coordinates of t^k a mod f. Then rk_f = rk(psi_f(A)) / d. Reduction is by
synthetic division, which needs no division in R because f is monic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InvalidInput, NotStabilized
from .extension_rank import (
    RULES,
    LimitReport,
    StepSample,
    as_rank_function,
    compress,
    limit_rank,
    stabilization,
)
from .linalg import Matrix, inverse_matrix
from .rank_functions import RankFunction
from .rings.algebras import FiniteAlgebra, PolyAlgebra, TensorAlgebra
from .rings.extensions import ExtElem, TensorExtension, poly_ext
from .scalars import MultiPoly
from .windows import degree_window, full_window

__all__ = [
    "CompanionRep",
    "CompanionRank",
    "power_poly",
    "roots_poly",
    "rk_f",
    "rk_f_by_roots",
    "FieldLimitReport",
    "monic_sequence_limit",
    "eval_point_limit",
    "evaluate_at",
    "AlgebraicExtRank",
    "algebraic_ext_rank",
    "blow_up",
    "embed_finite",
    "algebraic_window_value",
    "default_points",
    "Tower",
    "CompositionReport",
    "finite_then_t_tower",
    "t_then_u_tower",
    "composition_check",
]


def _is_poly_ring(ext) -> bool:
    return isinstance(ext, TensorExtension) and isinstance(ext.algebra, PolyAlgebra)


def _require_poly(A: Matrix):
    if not _is_poly_ring(A.ring):
        raise InvalidInput("expected a matrix over R[t]")
    return A.ring


def power_poly(field, d: int, var: str = "t") -> MultiPoly:
    """t^d."""
    return MultiPoly.var(field, [var], var, d)


def roots_poly(field, roots: Sequence, var: str = "t") -> MultiPoly:
    """prod (t - x_i)."""
    t = MultiPoly.var(field, [var], var)
    out = MultiPoly.constant(field, [var], 1)
    for x in roots:
        out = out * (t - MultiPoly.constant(field, [var], field(x)))
    return out


class CompanionRep:
    """psi_f for a monic f over K, acting on R[t] for a fixed base ring R."""

    def __init__(self, f, ext: TensorExtension):
        if not _is_poly_ring(ext):
            raise InvalidInput("companion representations need R[t]")
        K = ext.K
        if isinstance(f, MultiPoly):
            coeffs = f.coefficients()
        else:
            coeffs = [K(c) for c in f]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        d = len(coeffs) - 1
        if d < 1:
            raise InvalidInput("f must have degree >= 1")
        if coeffs[-1] != K.one:
            raise InvalidInput("f must be monic")
        self.ext = ext
        self.d = d
        self.coeffs = coeffs  # low to high, last = 1
        self._neg_low = [(j, -c) for j, c in enumerate(coeffs[:-1]) if c != 0]

    def _shift_reduce(self, v: list) -> list:
        """Coordinates of t * (element with coordinates v) mod f."""
        R = self.ext.base
        top = v[-1]
        out = [R.zero] + v[:-1]
        if not R.is_zero(top):
            for j, c in self._neg_low:
                out[j] = out[j] + R.scale(c, top)
        return out

    def reduce(self, terms: dict) -> list:
        """Coordinates of sum_k r_k t^k modulo f."""
        R = self.ext.base
        d = self.d
        if not terms:
            return [R.zero] * d
        deg = max(terms)
        coef = [terms.get(k, R.zero) for k in range(max(deg + 1, d))]
        for e in range(deg, d - 1, -1):
            c = coef[e]
            if R.is_zero(c):
                continue
            coef[e] = R.zero
            for j, fj in self._neg_low:
                coef[e - d + j] = coef[e - d + j] + R.scale(fj, c)
        return coef[:d]

    def psi(self, a: ExtElem) -> list[list]:
        row = self.reduce(a.terms)
        rows = [row]
        for _ in range(self.d - 1):
            row = self._shift_reduce(row)
            rows.append(row)
        return rows

    def psi_matrix(self, a: ExtElem) -> Matrix:
        return Matrix(self.ext.base, self.psi(a), self.d, self.d)

    def apply(self, A: Matrix, basis_change: Sequence[Sequence] | None = None) -> Matrix:
        """Block substitution A -> psi(A), an nd x md matrix over R.

        With ``basis_change`` P (an invertible K-matrix, new basis w = P v)
        each block becomes P psi(a) P^-1.
        """
        if A.ring != self.ext:
            raise InvalidInput("matrix is not over this R[t]")
        R = self.ext.base
        d = self.d
        P = Pinv = None
        if basis_change is not None:
            K = self.ext.K
            P = [[K(x) for x in r] for r in basis_change]
            if len(P) != d or any(len(r) != d for r in P):
                raise InvalidInput(f"basis change must be {d}x{d}")
            Pinv = inverse_matrix(P, K)
        rows = [[R.zero] * (A.ncols * d) for _ in range(A.nrows * d)]
        for i, r in enumerate(A.rows):
            for j, a in enumerate(r):
                if not a.terms:
                    continue
                blk = self.psi(a)
                if P is not None:
                    blk = _conj(R, P, blk, Pinv)
                for k in range(d):
                    rows[i * d + k][j * d:(j + 1) * d] = blk[k]
        return Matrix(R, rows, A.nrows * d, A.ncols * d)


def _kmul(R, P, M):
    """K-matrix P times R-matrix M."""
    n, m = len(P), len(M[0]) if M else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = R.zero
            for k, c in enumerate(P[i]):
                if c != 0 and not R.is_zero(M[k][j]):
                    acc = acc + R.scale(c, M[k][j])
            row.append(acc)
        out.append(row)
    return out


def _conj(R, P, M, Pinv):
    left = _kmul(R, P, M)
    # right multiplication by a K-matrix: (M Q)^T = Q^T M^T
    QT = [list(r) for r in zip(*Pinv)]
    leftT = [list(r) for r in zip(*left)]
    return [list(r) for r in zip(*_kmul(R, QT, leftT))]


def rk_f(A: Matrix, f, rank: RankFunction | None = None, basis_change=None) -> Fraction:
    """(1/d) rk(psi_f(A))."""
    ext = _require_poly(A)
    rk = rank or ext.rank
    if rk is None:
        raise InvalidInput("no rank function on the base ring")
    rep = CompanionRep(f, ext)
    if A.nrows == 0 or A.ncols == 0:
        return Fraction(0)
    return Fraction(rk.evaluate(rep.apply(A, basis_change))) / rep.d


class CompanionRank(RankFunction):
    """rk_f as a rank function on R[t]."""

    def __init__(self, ext, f, rank: RankFunction | None = None):
        self.ring = ext
        self.rep = CompanionRep(f, ext)
        self.base_rank = rank or ext.rank

    def evaluate(self, A: Matrix) -> Fraction:
        if A.nrows == 0 or A.ncols == 0:
            return Fraction(0)
        return Fraction(self.base_rank.evaluate(self.rep.apply(A))) / self.rep.d

    def describe(self):
        return {"type": "companion", "f": [str(c) for c in self.rep.coeffs]}


def evaluate_at(A: Matrix, x) -> Matrix:
    """pi_x(A): substitute t = x (x in K)."""
    ext = _require_poly(A)
    R = ext.base
    x = ext.K(x)

    def ev(a):
        acc = R.zero
        for k, r in a.terms.items():
            acc = acc + R.scale(x**k, r)
        return acc

    return A.map(ev, R)


def rk_f_by_roots(A: Matrix, roots: Sequence, rank: RankFunction | None = None) -> Fraction:
    """(1/d) sum_i rk(pi_i(A)) over distinct roots x_i."""
    ext = _require_poly(A)
    rk = rank or ext.rank
    roots = [ext.K(x) for x in roots]
    if not roots:
        raise InvalidInput("need at least one root")
    if len(set(roots)) != len(roots):
        raise InvalidInput("roots must be pairwise distinct")
    total = sum((Fraction(rk.evaluate(evaluate_at(A, x))) for x in roots), Fraction(0))
    return total / len(roots)


# --- limits ---------------------------------------------------------------


@dataclass
class FieldLimitReport:
    mode: str
    samples: list = field(default_factory=list)  # StepSample per degree / point
    stabilized: bool = False
    value: Fraction | None = None
    rule: str | None = None
    exhausted: bool = False
    bound_checks: list = field(default_factory=list)
    points: list = field(default_factory=list)

    @property
    def values(self) -> list[Fraction]:
        return [s.normalized for s in self.samples]

    def to_json(self):
        out = {
            "mode": self.mode,
            "samples": [s.to_json() for s in self.samples],
            "stabilized": self.stabilized,
            "value": None if self.value is None else str(self.value),
            "rule": self.rule,
        }
        if self.mode == "evalpoints":
            out["points"] = [str(p) for p in self.points]
            out["exhausted"] = self.exhausted
            # a point value never exceeds the answer, so this is a lower bound
            out["max_seen"] = str(max(self.values)) if self.samples else None
        if self.bound_checks:
            out["bound_checks"] = self.bound_checks
        return out


def _t_degree(A: Matrix) -> int:
    return max((max(a.terms) for a in A.entries() if a.terms), default=0)


def monic_sequence_limit(A: Matrix, degrees: Sequence[int], rank: RankFunction | None = None,
                         kappa: int = 3, tol=0, polys: Sequence | None = None,
                         check_bound: bool = True, rules: Sequence[str] = RULES,
                         strict: bool = True) -> FieldLimitReport:
    """rk_{f_i}(A) along monic f_i (default t^{d_i}) until stabilization.

    Each step also compares rk_{f_i}(A) with the normalized window rank at
    span{1, ..., t^(d_i - 1)}; they differ by at most 2pn/d_i where p is the
    t-degree of A.
    """
    ext = _require_poly(A)
    rk = rank or ext.rank
    degrees = list(degrees)
    if any(b <= a for a, b in zip(degrees, degrees[1:])) or not degrees or degrees[0] < 1:
        raise InvalidInput("degrees must be positive and strictly increasing")
    if polys is not None and len(polys) != len(degrees):
        raise InvalidInput("one polynomial per degree")
    tol = Fraction(tol)
    p, n = _t_degree(A), A.nrows
    rep = FieldLimitReport("companion")
    verdict = None
    for i, d in enumerate(degrees):
        f = polys[i] if polys is not None else power_poly(ext.K, d, ext.algebra.var)
        crep = CompanionRep(f, ext)
        if crep.d != d:
            raise InvalidInput(f"polynomial {i} has degree {crep.d}, expected {d}")
        raw = Fraction(rk.evaluate(crep.apply(A))) if A.nrows and A.ncols else Fraction(0)
        rep.samples.append(StepSample(i, d, raw, raw / d, None))
        if check_bound and A.nrows and A.ncols:
            w = compress(A, degree_window(ext, d), rk).normalized
            bound = Fraction(2 * p * n, d)
            rep.bound_checks.append({
                "degree": d, "rk_f": str(raw / d), "window": str(w), "bound": str(bound),
                "pass": abs(raw / d - w) <= bound,
            })
        verdict = stabilization(rep.samples, kappa, tol, rules)
        if verdict:
            break
    if verdict:
        rep.stabilized = True
        rep.rule, rep.value = verdict
    elif strict:
        raise NotStabilized("rk_f values did not stabilize along the degree list", rep)
    return rep


def eval_point_limit(A: Matrix, points: Iterable, rank: RankFunction | None = None, kappa: int = 3,
                     tol=0, limit: int | None = None) -> FieldLimitReport:
    """rk(pi_i(A)) along distinct points; a finite stream yields a partial report.

    A point value never exceeds the generic value, and it falls short only at
    roots of a nonzero minor, of which there are at most min(n, m) * deg(A).
    So the running maximum over more points than that is the exact answer
    (rule "certified"). Before that, kappa consecutive values equal to the
    running maximum give the heuristic "normalized" verdict, which is used
    over infinite fields only; over a finite field an uncertified stream is
    reported as partial evidence.
    """
    ext = _require_poly(A)
    rk = rank or ext.rank
    K = ext.K
    finite = getattr(K, "p", None) is not None
    tol = Fraction(tol)
    rep = FieldLimitReport("evalpoints")
    bound = min(A.nrows, A.ncols) * _t_degree(A)
    seen = set()
    best = None
    it = iter(points)
    i = 0
    while limit is None or i < limit:
        try:
            x = K(next(it))
        except StopIteration:
            rep.exhausted = True
            break
        if x in seen:
            raise InvalidInput(f"point {K.format(x)} repeated")
        seen.add(x)
        rep.points.append(K.format(x))
        v = Fraction(rk.evaluate(evaluate_at(A, x))) if A.nrows and A.ncols else Fraction(0)
        rep.samples.append(StepSample(i, 1, v, v, None))
        best = v if best is None else max(best, v)
        i += 1
        if i > bound:
            rep.stabilized, rep.rule, rep.value = True, "certified", best
            return rep
        tail = rep.samples[-kappa:]
        if not finite and len(tail) == kappa and all(abs(s.normalized - best) <= tol for s in tail):
            rep.stabilized, rep.rule, rep.value = True, "normalized", best
            return rep
    return rep


def default_points(field, count: int = 64):
    """1, 2, 3, ... (all of GF(p) when p is small; the stream then ends)."""
    p = getattr(field, "p", None)
    if p is not None:
        return [field(k) for k in itertools.islice(itertools.chain(range(1, p), [0]), count)]
    return [field(k) for k in range(1, count + 1)]


# --- algebraic case -------------------------------------------------------


def _finite_ext(ext):
    if not isinstance(ext, TensorExtension) or not isinstance(ext.algebra, FiniteAlgebra):
        raise InvalidInput("expected a matrix over E_0 (x)_K R with E_0 finite")
    return ext


def blow_up(A: Matrix) -> Matrix:
    """Replace each entry a by its d x d left-multiplication matrix over R.

    Block (i, j) row k holds the coordinates of b_k * A_ij.
    """
    ext = _finite_ext(A.ring)
    E = ext.algebra
    R = ext.base
    d = E.d
    rows = [[R.zero] * (A.ncols * d) for _ in range(A.nrows * d)]
    for i, r in enumerate(A.rows):
        for j, a in enumerate(r):
            for key, c in a.terms.items():
                for k in range(d):
                    for q, s in E.mul_keys(k, key).items():
                        x = rows[i * d + k][j * d + q]
                        rows[i * d + k][j * d + q] = x + R.scale(s, c)
    return Matrix(R, rows, A.nrows * d, A.ncols * d)


def algebraic_ext_rank(A: Matrix, rank: RankFunction | None = None) -> Fraction:
    """rk(blow-up of A) / dim_K(E_0)."""
    ext = _finite_ext(A.ring)
    rk = rank or ext.rank
    if rk is None:
        raise InvalidInput("no rank function on the base ring")
    if A.nrows == 0 or A.ncols == 0:
        return Fraction(0)
    return Fraction(rk.evaluate(blow_up(A))) / ext.algebra.d


class AlgebraicExtRank(RankFunction):
    def __init__(self, ext, rank: RankFunction | None = None):
        self.ring = _finite_ext(ext)
        self.base_rank = rank or ext.rank

    def evaluate(self, A: Matrix) -> Fraction:
        if A.ring == self.ring.base:
            A = A.map(self.ring.from_base, self.ring)
        return algebraic_ext_rank(A, self.base_rank)


def embed_finite(A: Matrix, big: TensorExtension, index_map) -> Matrix:
    """Move A from E_0 (x) R into E_1 (x) R along a basis embedding.

    ``index_map`` sends a key of E_0 to a key of E_1 (for E_1 built with
    FiniteAlgebra.tensor(E_0, E'), use ``E_1.embed_index``). The map is
    checked to be multiplicative on basis pairs.
    """
    small = _finite_ext(A.ring)
    _finite_ext(big)
    E0, E1 = small.algebra, big.algebra
    mp = {k: index_map(k) for k in E0.all_keys()}
    for a in E0.all_keys():
        for b in E0.all_keys():
            lhs = {mp[k]: c for k, c in E0.mul_keys(a, b).items()}
            rhs = dict(E1.mul_keys(mp[a], mp[b]))
            if lhs != rhs:
                raise InvalidInput("index map is not an algebra embedding")
    return A.map(lambda x: big.element({mp[k]: c for k, c in x.terms.items()}), big)


def algebraic_window_value(A: Matrix, rank: RankFunction | None = None) -> Fraction:
    """The window value at W = E_0 (x) R (the whole ring)."""
    ext = _finite_ext(A.ring)
    return compress(A, full_window(ext), rank).normalized


# --- towers ---------------------------------------------------------------


@dataclass
class CompositionReport:
    tower: str
    two_step: LimitReport | None
    one_step: LimitReport | None
    errors: dict = field(default_factory=dict)

    @property
    def two_step_value(self):
        return self.two_step.stabilized_value if self.two_step and self.two_step.stabilized else None

    @property
    def one_step_value(self):
        return self.one_step.stabilized_value if self.one_step and self.one_step.stabilized else None

    @property
    def both_stabilized(self) -> bool:
        return self.two_step_value is not None and self.one_step_value is not None

    @property
    def agree(self) -> bool | None:
        if not self.both_stabilized:
            return None
        return self.two_step_value == self.one_step_value

    def to_json(self):
        return {
            "tower": self.tower,
            "two_step": None if self.two_step is None else self.two_step.to_json(),
            "one_step": None if self.one_step is None else self.one_step.to_json(),
            "two_step_value": None if self.two_step_value is None else str(self.two_step_value),
            "one_step_value": None if self.one_step_value is None else str(self.one_step_value),
            "agree": self.agree,
            "errors": self.errors,
        }


@dataclass
class Tower:
    """The rings and rank functions for both paths of a tower K in E in E'."""

    kind: str  # "finite-then-t" or "t-then-u"
    two_step: TensorExtension
    one_step: TensorExtension
    mid_rank: RankFunction
    top_schedule: str
    one_step_schedule: str


def finite_then_t_tower(E0: FiniteAlgebra, base, rank: RankFunction, var: str = "t",
                        schedule: str = "degrees:2^k,k=1..6", kappa: int = 3) -> Tower:
    """K in E_0 in E_0(t): two-step via (E_0 (x) R)[t], one-step via (K[t] (x) E_0) (x) R."""
    mid = TensorExtension(E0, base, rank=rank)
    mid_rank = as_rank_function(mid, "field:full", kappa=kappa)
    top = poly_ext(mid, var, rank=mid_rank)
    one = TensorExtension(TensorAlgebra(PolyAlgebra(base.K, var), E0), base, rank=rank)
    return Tower("finite-then-t", top, one, mid_rank, schedule, schedule)


def t_then_u_tower(base, rank: RankFunction, schedule: str = "degrees:2^k,k=1..5",
                   inner_schedule: str = "degrees:2^k,k=1..5", kappa: int = 3) -> Tower:
    """K in K(t) in K(t)(u): two nested polynomial extensions vs one in two variables."""
    mid = poly_ext(base, "t", rank=rank)
    mid_rank = as_rank_function(mid, inner_schedule, kappa=kappa)
    top = poly_ext(mid, "u", rank=mid_rank)
    one = TensorExtension(TensorAlgebra(PolyAlgebra(base.K, "t"), PolyAlgebra(base.K, "u")), base, rank=rank)
    return Tower("t-then-u", top, one, mid_rank, schedule, schedule)


def composition_check(text_or_matrix, tower: Tower, kappa: int = 3, tol=0) -> CompositionReport:
    """Compute the two-step and one-step ranks of the same matrix.

    The matrix is given as text (parsed in both rings) or as a pair
    (matrix over the two-step ring, matrix over the one-step ring).
    """
    if isinstance(text_or_matrix, tuple):
        A2, A1 = text_or_matrix
    else:
        A2 = tower.two_step.matrix(text_or_matrix)
        A1 = tower.one_step.matrix(text_or_matrix)
    out = CompositionReport(tower.kind, None, None)
    try:
        out.two_step = limit_rank(A2, tower.top_schedule, kappa, tol, defects=False)
    except NotStabilized as exc:
        out.errors["two_step"] = str(exc)
        out.two_step = None
    out.one_step = limit_rank(A1, tower.one_step_schedule, kappa, tol, defects=False)
    return out
