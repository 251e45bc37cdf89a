"""Window ranks rk_W(A) and their Folner limit rk_F(A).

For a window W with R-basis u_1..u_l and a hull W~ (basis w~_1..w~_p)
containing W * A_ij for every entry, the compression matrix B has

    row (k, i)    = outer index k over the W basis, inner i over rows of A
    column (q, j) = outer index q over the W~ basis, inner j over columns of A

and entry B[(k, i), (q, j)] = coordinate of u_k * A_ij on w~_q. The window
rank is rk(B) under the base ring's rank function; it does not depend on the
bases or on which hull is used. Along ever more invariant windows the values
rk_W(A) / dim(W) converge to their infimum, which is rk_F(A).
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import InternalError, InvalidInput, NotStabilized
from .linalg import Matrix
from .rank_functions import RankFunction
from .windows import (
    Schedule,
    Window,
    invariance_defect,
    parse_schedule,
    support_window,
    window_sum,
)

__all__ = [
    "CompressionResult",
    "compress",
    "window_rank",
    "window_rank_properties",
    "StepSample",
    "LimitReport",
    "limit_rank",
    "stabilization",
    "LimitRankFunction",
    "as_rank_function",
    "fp_module_dim",
    "embed",
]

RULES = ("normalized", "marginal")


def _ext_of(A: Matrix):
    ext = A.ring
    if not hasattr(ext, "one_key") or not hasattr(ext, "base"):
        raise InvalidInput(f"matrix is not over an extension ring: {ext!r}")
    return ext


def embed(A: Matrix, ext) -> Matrix:
    """View a matrix over ext.base (or over ext) as a matrix over ext."""
    if A.ring == ext:
        return A
    if A.ring == ext.base:
        return A.map(ext.from_base, ext)
    raise InvalidInput(f"cannot view a matrix over {A.ring!r} inside {ext!r}")


def _rank_of(ext, rank: RankFunction | None) -> RankFunction:
    rk = rank or ext.rank
    if rk is None:
        raise InvalidInput("the base ring carries no rank function")
    return rk


@dataclass
class CompressionResult:
    B: Matrix
    window: Window
    hull: Window
    dim_W: int
    rank_value: Fraction
    normalized: Fraction

    def to_json(self):
        return {
            "dim_W": self.dim_W,
            "dim_hull": self.hull.dim,
            "B_shape": [self.B.nrows, self.B.ncols],
            "rank_value": str(self.rank_value),
            "normalized": str(self.normalized),
        }


def entry_keys(A: Matrix) -> list:
    keys = set()
    for x in A.entries():
        keys.update(x.terms)
    return sorted(keys, key=A.ring.sort_key)


def compress(A: Matrix, W: Window, rank: RankFunction | None = None, hull: Window | None = None,
             build_only: bool = False) -> CompressionResult:
    """Assemble B for (A, W) and evaluate rk(B).

    ``hull`` overrides the minimal W~; it must contain every product u_k A_ij.
    """
    ext = _ext_of(A)
    if W.ext != ext:
        raise InvalidInput("window and matrix live over different extensions")
    if W.dim == 0:
        raise InvalidInput("the window must be nonzero")
    rk = None if build_only else _rank_of(ext, rank)
    R = ext.base
    user_hull = hull is not None
    if hull is None:
        hull = W.hull(entry_keys(A))
    elif hull.ext != ext:
        raise InvalidInput("hull lives over a different extension")
    n, m, l, p = A.nrows, A.ncols, W.dim, hull.dim
    zero = R.zero
    rows = [[zero] * (m * p) for _ in range(n * l)]
    for i in range(n):
        for j in range(m):
            a = A.rows[i][j]
            if not a.terms:
                continue
            for k, terms in enumerate(W.left_products(a)):
                if not terms:
                    continue
                try:
                    coords = hull.coords(terms)
                except InternalError:
                    if user_hull:
                        raise InvalidInput("the supplied hull does not contain W * A") from None
                    raise
                row = rows[k * n + i]
                for q, c in enumerate(coords):
                    if not R.is_zero(c):
                        row[q * m + j] = c
    B = Matrix(R, rows, n * l, m * p)
    value = Fraction(0) if build_only else Fraction(rk.evaluate(B))
    return CompressionResult(B, W, hull, l, value, value / l)


def window_rank(A: Matrix, W: Window, rank: RankFunction | None = None) -> Fraction:
    return compress(A, W, rank).rank_value


def window_rank_properties(A: Matrix, B: Matrix, W: Window, V: Window, C: Matrix | None = None,
                           rank: RankFunction | None = None) -> dict:
    """Check block additivity, triangular superadditivity and the W <= V bounds."""
    ext = _ext_of(A)
    if window_sum(W, V) != V:
        raise InvalidInput("need W contained in V")
    if C is None:
        C = Matrix(ext, [[ext.one] * B.ncols for _ in range(A.nrows)], A.nrows, B.ncols)
    rA, rB = window_rank(A, W, rank), window_rank(B, W, rank)
    D = Matrix.blocks([[A, None], [None, B]], ext)
    T = Matrix.blocks([[A, C], [None, B]], ext)
    rD, rT = window_rank(D, W, rank), window_rank(T, W, rank)
    rAV = window_rank(A, V, rank)
    n = A.nrows
    upper = rA + n * (V.dim - W.dim)
    return {
        "block_diagonal": {"pass": rD == rA + rB, "rk_W(diag)": str(rD), "rk_W(A)": str(rA), "rk_W(B)": str(rB)},
        "block_triangular": {"pass": rT >= rA + rB, "rk_W(T)": str(rT), "rk_W(A)+rk_W(B)": str(rA + rB)},
        "monotone": {
            "pass": rA <= rAV <= upper,
            "rk_W(A)": str(rA), "rk_V(A)": str(rAV), "upper": str(upper),
        },
    }


# --- the limit engine -----------------------------------------------------


@dataclass
class StepSample:
    step: int
    dim: int
    rank_value: Fraction
    normalized: Fraction
    defect: Fraction | None
    total: bool = False

    def to_json(self):
        return {
            "step": self.step,
            "dimW": self.dim,
            "rank_value": str(self.rank_value),
            "normalized": str(self.normalized),
            "invariance_defect": None if self.defect is None else str(self.defect),
        }


@dataclass
class LimitReport:
    samples: list = field(default_factory=list)
    running_inf: Fraction | None = None
    stabilized: bool = False
    stabilized_value: Fraction | None = None
    rule: str | None = None
    kappa: int = 3
    tol: Fraction = Fraction(0)
    schedule: str = ""
    support_dim: int = 0

    @property
    def values(self) -> list[Fraction]:
        return [s.normalized for s in self.samples]

    @property
    def dims(self) -> list[int]:
        return [s.dim for s in self.samples]

    def to_json(self):
        return {
            "schedule": self.schedule,
            "kappa": self.kappa,
            "tol": str(self.tol),
            "samples": [s.to_json() for s in self.samples],
            "running_inf": None if self.running_inf is None else str(self.running_inf),
            "stabilized": self.stabilized,
            "stabilized_value": None if self.stabilized_value is None else str(self.stabilized_value),
            "rule": self.rule,
            "support_window_dim": self.support_dim,
        }


def _close(vals: Sequence[Fraction], tol) -> bool:
    return max(vals) - min(vals) <= tol


def stabilization(samples: Sequence[StepSample], kappa: int, tol, rules: Sequence[str] = RULES):
    """Return (rule, value) if the tail of ``samples`` has stabilized, else None.

    * total-window: the last window is the whole ring, so its value is exact.
    * normalized: the last kappa values rk/dim agree within tol.
    * marginal: the last kappa increments (rk_i - rk_{i-1}) / (dim_i - dim_{i-1})
      agree within tol. Eventually affine ranks rk = c dim + e never make
      rk/dim constant when e != 0, but their increments equal c exactly, and
      rk/dim converges to the same c.
    """
    if not samples:
        return None
    last = samples[-1]
    if last.total:
        return "total-window", last.normalized
    if "normalized" in rules and len(samples) >= kappa:
        tail = [s.normalized for s in samples[-kappa:]]
        if _close(tail, tol):
            return "normalized", last.normalized
    if "marginal" in rules and len(samples) >= kappa + 1:
        tail = samples[-(kappa + 1):]
        incs = []
        for a, b in zip(tail, tail[1:]):
            if b.dim <= a.dim:
                return None
            incs.append((b.rank_value - a.rank_value) / (b.dim - a.dim))
        if _close(incs, tol):
            return "marginal", incs[-1]
    return None


def _step(args):
    A, W, rank, V = args
    res = compress(A, W, rank)
    defect = invariance_defect(W, V) if V is not None else None
    return res.rank_value, res.dim_W, defect, W.is_total()


def _windows(schedule, ext) -> Iterable[Window]:
    if isinstance(schedule, str):
        schedule = parse_schedule(schedule)
    if isinstance(schedule, Schedule):
        return schedule.windows(ext)
    return iter(schedule)


def limit_rank(A: Matrix, schedule, kappa: int = 3, tol=0, rank: RankFunction | None = None,
               rules: Sequence[str] = RULES, exhaust: bool = False, jobs: int = 1,
               defects: bool = True) -> LimitReport:
    """Run compress along the schedule until the values stabilize.

    With ``exhaust`` the whole schedule is computed and the verdict is taken
    at the end; otherwise the run stops at the first stabilized step. With
    ``jobs > 1`` steps run in worker processes and are merged in schedule
    order, so the report does not depend on ``jobs``.
    """
    if kappa < 2:
        raise InvalidInput("kappa must be >= 2")
    tol = Fraction(tol)
    if tol < 0:
        raise InvalidInput("tol must be >= 0")
    bad = [r for r in rules if r not in RULES]
    if bad:
        raise InvalidInput(f"unknown stabilization rule {bad[0]!r}")
    ext = _ext_of(A)
    rk = _rank_of(ext, rank)
    V = support_window(ext, A.entries()) if defects else None
    report = LimitReport(kappa=kappa, tol=tol, schedule=str(schedule) if not isinstance(schedule, list) else "custom",
                         support_dim=V.dim if V is not None else 0)
    wins = _windows(schedule, ext)

    def add(i, out):
        value, dim, defect, total = out
        s = StepSample(i, dim, value, value / dim, defect, total)
        report.samples.append(s)
        report.running_inf = s.normalized if report.running_inf is None else min(report.running_inf, s.normalized)
        return stabilization(report.samples, kappa, tol, rules)

    verdict = None
    if jobs > 1:
        wl = list(wins)
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outs = list(pool.map(_step, [(A, W, rk, V) for W in wl]))
        for i, out in enumerate(outs):
            verdict = add(i, out)
            if verdict and not exhaust:
                break
    else:
        for i, W in enumerate(wins):
            verdict = add(i, _step((A, W, rk, V)))
            if verdict and not exhaust:
                break
    if verdict:
        report.stabilized = True
        report.rule, report.stabilized_value = verdict
    return report


def default_jobs() -> int:
    return os.cpu_count() or 1


class LimitRankFunction(RankFunction):
    """rk_F on an extension S, evaluated by :func:`limit_rank`.

    Matrices over the base ring are embedded first, so this is directly
    comparable with the base rank. The result can serve as the base rank of
    a further extension built over S.
    """

    def __init__(self, ext, schedule, kappa: int = 3, tol=0, rank: RankFunction | None = None,
                 rules: Sequence[str] = RULES):
        self.ring = ext
        self.schedule = parse_schedule(schedule) if isinstance(schedule, str) else schedule
        self.kappa = kappa
        self.tol = Fraction(tol)
        self.base_rank = _rank_of(ext, rank)
        self.rules = tuple(rules)
        self.last_report: LimitReport | None = None

    def report(self, A: Matrix) -> LimitReport:
        A = embed(A, self.ring)
        return limit_rank(A, self.schedule, self.kappa, self.tol, self.base_rank, self.rules, defects=False)

    def evaluate(self, A: Matrix) -> Fraction:
        if A.nrows == 0 or A.ncols == 0:
            return Fraction(0)
        rep = self.report(A)
        self.last_report = rep
        if not rep.stabilized:
            raise NotStabilized("window ranks did not stabilize along the schedule", rep)
        return rep.stabilized_value

    def describe(self):
        return {"type": "limit", "schedule": str(self.schedule), "kappa": self.kappa, "tol": str(self.tol)}


def as_rank_function(ext, schedule, kappa: int = 3, tol=0, rank: RankFunction | None = None,
                     rules: Sequence[str] = RULES) -> LimitRankFunction:
    return LimitRankFunction(ext, schedule, kappa, tol, rank, rules)


def fp_module_dim(A: Matrix, schedule, kappa: int = 3, tol=0, rank: RankFunction | None = None,
                  rules: Sequence[str] = RULES) -> Fraction:
    """dim_F(S^m / S^n A) = m - rk_F(A)."""
    rk = as_rank_function(_ext_of(A), schedule, kappa, tol, rank, rules)
    return A.ncols - rk.evaluate(A)
