"""Finite approximation windows, Folner schedules and quasitilings.

A window is a finitely generated free R-submodule of an extension S. Two
shapes are supported:

* :class:`MonomialWindow`: the R-span of a finite set of basis indices
  (group elements of a crossed product, or K-basis keys of E in E (x)_K R).
* :class:`SubspaceWindow`: V (x)_K R for a K-subspace V of E, stored in
  reduced row echelon form over the key basis. Only tensor extensions carry
  these.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .errors import InternalError, InvalidInput, ParseError, TilingTooCoarse
from .linalg import inverse_matrix, row_reduce
from .rings.extensions import CrossedProduct, ExtElem, TensorExtension

__all__ = [
    "Window",
    "MonomialWindow",
    "SubspaceWindow",
    "box_window",
    "degree_window",
    "full_window",
    "support_window",
    "window_sum",
    "window_intersect",
    "window_product",
    "invariance_defect",
    "Schedule",
    "parse_schedule",
    "Quasitiling",
    "QuasitilingReport",
    "ow_quasitile_boxes",
    "kt_quasitile",
    "check_quasitiling",
]


# --- key-level plumbing ---------------------------------------------------


def key_product(ext, a, b) -> dict:
    """Product of two basis indices as key -> K-coefficient (units absorbed)."""
    if isinstance(ext, CrossedProduct):
        return {ext.group.mul(a, b): ext.K.one}
    return ext.algebra.mul_keys(a, b)


def key_times(ext, key, a: ExtElem) -> dict:
    """R-coefficients of (basis element ``key``) * a."""
    if isinstance(ext, CrossedProduct):
        return ext.unit_times(key, a)
    return ext.key_times(key, a)


def _total_keys(ext) -> list | None:
    if isinstance(ext, CrossedProduct):
        return ext.group.elements() if ext.group.finite else None
    return ext.algebra.all_keys() if ext.algebra.finite else None


class Window:
    """Common interface; see the two concrete shapes below."""

    ext = None

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def __len__(self):
        return self.dim

    def is_total(self) -> bool:
        """True when the window is the whole (finite rank) ring S."""
        keys = _total_keys(self.ext)
        return keys is not None and self.dim == len(keys)

    def as_subspace(self) -> "SubspaceWindow":
        raise NotImplementedError


class MonomialWindow(Window):
    """R-span of a finite set of basis indices."""

    __slots__ = ("ext", "keys", "_set")

    def __init__(self, ext, keys: Iterable):
        ks = set(keys)
        for k in ks:
            if not ext.valid_key(k):
                raise InvalidInput(f"invalid index {k!r} for {ext!r}")
        self.ext = ext
        self._set = frozenset(ks)
        self.keys = tuple(sorted(ks, key=ext.sort_key))

    @property
    def dim(self) -> int:
        return len(self.keys)

    def __eq__(self, other):
        if isinstance(other, MonomialWindow):
            return other.ext == self.ext and other._set == self._set
        if isinstance(other, SubspaceWindow):
            return self.as_subspace() == other
        return NotImplemented

    def __hash__(self):
        return hash(self._set)

    def __repr__(self):
        shown = ", ".join(self.ext.format_key(k) or "1" for k in self.keys[:6])
        more = ", ..." if self.dim > 6 else ""
        return f"MonomialWindow({{{shown}{more}}}, dim={self.dim})"

    def __contains__(self, key):
        return key in self._set

    def basis(self) -> list[dict]:
        one = self.ext.K.one
        return [{k: one} for k in self.keys]

    def left_products(self, a: ExtElem) -> list[dict]:
        """For each basis index u_k, the R-coefficients of u_k * a."""
        return [key_times(self.ext, k, a) for k in self.keys]

    def coords(self, terms: dict) -> list:
        zero = self.ext.base.zero
        for k in terms:
            if k not in self._set:
                raise InternalError(f"index {k!r} escapes the window")
        return [terms.get(k, zero) for k in self.keys]

    def hull(self, keys: Iterable) -> "MonomialWindow":
        """Smallest monomial window containing W * e_key for every key."""
        out = set()
        ks = list(keys)
        for a in self.keys:
            for b in ks:
                out.update(key_product(self.ext, a, b))
        return MonomialWindow(self.ext, out)

    def translate(self, g) -> "MonomialWindow":
        """g * W for a basis index g."""
        out = set()
        for k in self.keys:
            out.update(key_product(self.ext, g, k))
        return MonomialWindow(self.ext, out)

    def as_subspace(self) -> "SubspaceWindow":
        return SubspaceWindow(self.ext, self.basis())

    def to_json(self):
        return {"type": "monomial", "dim": self.dim, "indices": [_key_json(self.ext, k) for k in self.keys]}


def _key_json(ext, k):
    return ext.format_key(k) or "1"


class SubspaceWindow(Window):
    """V (x)_K R for a K-subspace V of E, in reduced row echelon form.

    ``basis`` may be any spanning list of vectors (dicts key -> K). The
    canonical echelon form decides equality. ``with_basis`` attaches a
    different basis that is used for coordinates; rank values computed
    against it must not change.
    """

    def __init__(self, ext, vectors: Iterable[dict], _custom=None):
        if not isinstance(ext, TensorExtension):
            raise InvalidInput("subspace windows are only available for tensor extensions")
        self.ext = ext
        K = ext.K
        vecs = [{k: K(c) for k, c in v.items() if c != 0} for v in vectors]
        for v in vecs:
            for k in v:
                if not ext.valid_key(k):
                    raise InvalidInput(f"invalid key {k!r}")
        universe = sorted({k for v in vecs for k in v}, key=ext.sort_key)
        index = {k: i for i, k in enumerate(universe)}
        dense = []
        for v in vecs:
            row = [K.zero] * len(universe)
            for k, c in v.items():
                row[index[k]] = c
            dense.append(row)
        red, piv = row_reduce(dense, K) if universe else ([], [])
        self.rows = tuple(
            {universe[j]: x for j, x in enumerate(r) if x != 0} for r in red
        )
        self.pivots = tuple(universe[j] for j in piv)
        self._frozen = frozenset(frozenset(r.items()) for r in self.rows)
        self._custom = _custom  # (vectors, P^-1) with custom_q = sum_r P[q][r] rows_r

    @property
    def dim(self) -> int:
        return len(self.rows)

    def __eq__(self, other):
        if isinstance(other, MonomialWindow):
            other = other.as_subspace()
        if isinstance(other, SubspaceWindow):
            return other.ext == self.ext and other._frozen == self._frozen
        return NotImplemented

    def __hash__(self):
        return hash(self._frozen)

    def __repr__(self):
        return f"SubspaceWindow(dim={self.dim})"

    def with_basis(self, P: Sequence[Sequence]) -> "SubspaceWindow":
        """Same subspace, coordinates taken in the basis custom_q = sum_r P[q][r] v_r."""
        K = self.ext.K
        P = [[K(x) for x in row] for row in P]
        if len(P) != self.dim or any(len(r) != self.dim for r in P):
            raise InvalidInput(f"basis change must be {self.dim}x{self.dim}")
        Pinv = inverse_matrix(P, K)
        vecs = []
        for row in P:
            v: dict = {}
            for c, base in zip(row, self.rows):
                if c != 0:
                    for k, x in base.items():
                        v[k] = v.get(k, K.zero) + c * x
            vecs.append({k: x for k, x in v.items() if x != 0})
        out = SubspaceWindow.__new__(SubspaceWindow)
        out.ext, out.rows, out.pivots, out._frozen = self.ext, self.rows, self.pivots, self._frozen
        out._custom = (tuple(vecs), Pinv)
        return out

    def basis(self) -> list[dict]:
        if self._custom is not None:
            return list(self._custom[0])
        return list(self.rows)

    def left_products(self, a: ExtElem) -> list[dict]:
        R = self.ext.base
        out = []
        for v in self.basis():
            acc: dict = {}
            for key, c in v.items():
                for k, r in key_times(self.ext, key, a).items():
                    x = R.scale(c, r)
                    acc[k] = acc[k] + x if k in acc else x
            out.append({k: x for k, x in acc.items() if not R.is_zero(x)})
        return out

    def coords(self, terms: dict) -> list:
        """Coordinates over R; InternalError when the element is not inside."""
        R = self.ext.base
        c = [terms.get(p, R.zero) for p in self.pivots]
        recon: dict = {}
        for coeff, row in zip(c, self.rows):
            if R.is_zero(coeff):
                continue
            for k, x in row.items():
                y = R.scale(x, coeff)
                recon[k] = recon[k] + y if k in recon else y
        for k in set(recon) | set(terms):
            if recon.get(k, R.zero) != terms.get(k, R.zero):
                raise InternalError("element escapes the subspace window")
        if self._custom is None:
            return c
        Pinv = self._custom[1]
        n = self.dim
        out = []
        for q in range(n):
            acc = R.zero
            for r in range(n):
                if Pinv[r][q] != 0 and not R.is_zero(c[r]):
                    acc = acc + R.scale(Pinv[r][q], c[r])
            out.append(acc)
        return out

    def hull(self, keys: Iterable) -> "SubspaceWindow":
        """K-span of v * e_key over basis vectors v and the given keys."""
        return SubspaceWindow(self.ext, _products(self.ext, self.rows, [{k: self.ext.K.one} for k in keys]))

    def translate(self, g) -> "SubspaceWindow":
        return SubspaceWindow(self.ext, _products(self.ext, [{g: self.ext.K.one}], self.rows))

    def as_subspace(self) -> "SubspaceWindow":
        return self

    def to_json(self):
        K = self.ext.K
        return {
            "type": "subspace",
            "dim": self.dim,
            "basis": [{_key_json(self.ext, k): K.format(x) for k, x in r.items()} for r in self.rows],
        }


def _products(ext, left: Sequence[dict], right: Sequence[dict]) -> list[dict]:
    K = ext.K
    out = []
    for u in left:
        for v in right:
            acc: dict = {}
            for a, x in u.items():
                for b, y in v.items():
                    for k, c in key_product(ext, a, b).items():
                        acc[k] = acc.get(k, K.zero) + x * y * c
            out.append(acc)
    return out


# --- constructors ---------------------------------------------------------


def box_window(ext, N: int, start: int = 0) -> MonomialWindow:
    """[start, start+N)^d inside Z^d."""
    if not isinstance(ext, CrossedProduct) or ext.group.finite:
        raise InvalidInput("box windows need a crossed product over Z^d")
    if N < 1:
        raise InvalidInput("box side must be positive")
    d = ext.group.d
    return MonomialWindow(ext, itertools.product(range(start, start + N), repeat=d))


def degree_window(ext, N: int) -> MonomialWindow:
    """span{1, t, ..., t^(N-1)} (times the finite factor, if any)."""
    if not isinstance(ext, TensorExtension) or not hasattr(ext.algebra, "degree_keys"):
        raise InvalidInput("degree windows need a polynomial tensor extension")
    if N < 1:
        raise InvalidInput("degree bound must be positive")
    return MonomialWindow(ext, ext.algebra.degree_keys(N))


def full_window(ext) -> MonomialWindow:
    keys = _total_keys(ext)
    if keys is None:
        raise InvalidInput("the full window only exists for finite groups and finite extensions")
    return MonomialWindow(ext, keys)


def support_window(ext, entries: Iterable[ExtElem]) -> MonomialWindow:
    """Monomial window spanned by the identity and all support indices."""
    keys = {ext.one_key}
    for a in entries:
        keys.update(a.terms)
    return MonomialWindow(ext, keys)


# --- lattice operations ---------------------------------------------------


def _check_pair(a: Window, b: Window):
    if a.ext != b.ext:
        raise InvalidInput("windows over different extensions")
    if type(a) is not type(b):
        raise InvalidInput("window variant mismatch (monomial vs subspace)")


def window_sum(a: Window, b: Window) -> Window:
    _check_pair(a, b)
    if isinstance(a, MonomialWindow):
        return MonomialWindow(a.ext, a._set | b._set)
    return SubspaceWindow(a.ext, list(a.rows) + list(b.rows))


def window_intersect(a: Window, b: Window) -> Window:
    _check_pair(a, b)
    if isinstance(a, MonomialWindow):
        return MonomialWindow(a.ext, a._set & b._set)
    return _zassenhaus(a, b)


def _zassenhaus(a: SubspaceWindow, b: SubspaceWindow) -> SubspaceWindow:
    """Intersection via row reduction of [[a, a], [b, 0]]."""
    ext = a.ext
    K = ext.K
    universe = sorted({k for r in a.rows + b.rows for k in r}, key=ext.sort_key)
    n = len(universe)
    if not n:
        return SubspaceWindow(ext, [])
    idx = {k: i for i, k in enumerate(universe)}

    def dense(v):
        row = [K.zero] * n
        for k, c in v.items():
            row[idx[k]] = c
        return row

    M = [dense(r) + dense(r) for r in a.rows] + [dense(r) + [K.zero] * n for r in b.rows]
    red, piv = row_reduce(M, K)
    out = []
    for r, p in zip(red, piv):
        if p >= n:
            out.append({universe[j]: r[n + j] for j in range(n) if r[n + j] != 0})
    return SubspaceWindow(ext, out)


def window_product(w: Window, v: Window) -> Window:
    """W * V: span of all products of basis elements."""
    if w.ext != v.ext:
        raise InvalidInput("windows over different extensions")
    if isinstance(w, MonomialWindow) and isinstance(v, MonomialWindow):
        return w.hull(v.keys)
    return SubspaceWindow(w.ext, _products(w.ext, w.as_subspace().rows, v.as_subspace().rows))


def invariance_defect(w: Window, v: Window) -> Fraction:
    """dim(W + W V) / dim(W) - 1; W is (V, delta)-invariant iff this is <= delta."""
    if w.dim == 0:
        raise InvalidInput("invariance is only defined for nonzero windows")
    wv = window_product(w, v)
    if isinstance(w, MonomialWindow) and isinstance(wv, MonomialWindow):
        s = window_sum(w, wv)
    else:
        s = window_sum(w.as_subspace(), wv.as_subspace())
    return Fraction(s.dim, w.dim) - 1


# --- schedules ------------------------------------------------------------


_RANGE = re.compile(r"^(-?\d+)\.\.(-?\d+)(?:\^(\d+))?$")
_GEOM = re.compile(r"^(\d+)\^k,\s*k=(\d+)\.\.(\d+)$")


@dataclass(frozen=True)
class Schedule:
    """A re-iterable description of a nested window sequence.

    kind is "box", "degrees", "group" or "field"; ``sizes`` lists box sides
    or degree bounds. ``start`` shifts boxes; ``dim`` (boxes only, from a
    literal like ``box:0..16^2``) is checked against the group rank.
    """

    kind: str
    sizes: tuple = ()
    start: int = 0
    dim: int | None = None
    text: str = ""

    def windows(self, ext) -> Iterator[Window]:
        if self.kind == "box":
            if self.dim is not None and isinstance(ext, CrossedProduct) and not ext.group.finite \
                    and ext.group.d != self.dim:
                raise InvalidInput(f"box literal has dimension {self.dim}, group has rank {ext.group.d}")
            for N in self.sizes:
                yield box_window(ext, N, self.start)
        elif self.kind == "degrees":
            for N in self.sizes:
                yield degree_window(ext, N)
        elif self.kind in ("group", "field"):
            yield full_window(ext)
        else:  # pragma: no cover - guarded by the parser
            raise InvalidInput(f"unknown schedule kind {self.kind!r}")

    def __len__(self):
        return len(self.sizes) if self.kind in ("box", "degrees") else 1

    def __str__(self):
        return self.text or f"{self.kind}:{','.join(map(str, self.sizes))}"


def _sizes(spec: str, where: str) -> tuple:
    spec = spec.strip()
    m = _GEOM.match(spec)
    if m:
        base, lo, hi = map(int, m.groups())
        if base < 2 or lo > hi:
            raise ParseError("geometric schedule needs base >= 2 and lo <= hi", where)
        return tuple(base**k for k in range(lo, hi + 1))
    try:
        vals = tuple(int(x) for x in spec.split(","))
    except ValueError:
        raise ParseError(f"cannot read sizes from {spec!r}", where) from None
    return vals


def parse_schedule(text: str, where: str = "schedule") -> Schedule:
    """Read ``box:2^k,k=2..6``, ``box:4,8,16``, ``box:0..16^2``, ``degrees:32``,
    ``degrees:2^k,k=1..6``, ``group:full`` or ``field:full``."""
    kind, sep, rest = text.strip().partition(":")
    kind = kind.strip().lower()
    if not sep:
        raise ParseError("schedule must look like kind:spec", where)
    if kind in ("group", "field"):
        if rest.strip() != "full":
            raise ParseError(f"{kind} schedules only accept 'full'", where)
        return Schedule(kind, text=text.strip())
    if kind not in ("box", "degrees"):
        raise ParseError(f"unknown schedule kind {kind!r}", where)
    m = _RANGE.match(rest.strip())
    if m and kind == "box":
        lo, hi = int(m.group(1)), int(m.group(2))
        if hi <= lo:
            raise ParseError("empty box literal", where)
        d = int(m.group(3)) if m.group(3) else None
        return Schedule("box", (hi - lo,), start=lo, dim=d, text=text.strip())
    sizes = _sizes(rest, where)
    if not sizes or any(s < 1 for s in sizes):
        raise ParseError("sizes must be positive", where)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ParseError("sizes must be strictly increasing", where)
    return Schedule(kind, sizes, text=text.strip())


# --- quasitiling ----------------------------------------------------------


@dataclass
class Quasitiling:
    tiles: list  # Windows W_1..W_n
    centers: list  # per tile, list of basis indices
    subwindows: list  # per tile, dict center -> W_{j,c}
    eps: Fraction
    coverage: Fraction | None = None

    def translates(self) -> list[tuple[int, object, Window]]:
        return [(j, c, self.subwindows[j][c].translate(c)) for j in range(len(self.tiles)) for c in self.centers[j]]


def ow_quasitile_boxes(d: int, n: int, N: int, eps, ext=None) -> Quasitiling:
    """Single-tile box tiling of [0,N)^d by translates of [0,n)^d at centers in nZ^d."""
    from .rings.groups import ZdGroup
    from .scalars import QQ

    eps = Fraction(eps)
    if not 0 < eps < 1:
        raise InvalidInput("eps must lie in (0, 1)")
    if not 1 <= n <= N:
        raise InvalidInput("need 1 <= n <= N")
    ext = ext or CrossedProduct(QQ, ZdGroup(d))
    tile = box_window(ext, n)
    q = N // n
    centers = [tuple(n * x for x in c) for c in itertools.product(range(q), repeat=d)]
    coverage = Fraction((n * q) ** d, N**d)
    if coverage < 1 - eps:
        raise TilingTooCoarse(f"coverage {coverage} < 1 - eps = {1 - eps}; increase N")
    return Quasitiling([tile], [centers], [{c: tile for c in centers}], eps, coverage)


def kt_quasitile(n: int, N: int, ext=None) -> Quasitiling:
    """span{1..t^(N-1)} as the direct sum of t^(ln) * span{1..t^(n-1)}."""
    from .rings.extensions import poly_ext
    from .scalars import QQ

    if n < 1 or N < 1 or N % n:
        raise InvalidInput("need n >= 1 dividing N")
    ext = ext or poly_ext(QQ)
    tile = degree_window(ext, n)
    centers = [_t_power(ext, l * n) for l in range(N // n)]
    return Quasitiling([tile], [centers], [{c: tile for c in centers}], Fraction(0), Fraction(1))


def _t_power(ext, k: int):
    alg = ext.algebra
    if hasattr(alg, "a"):
        return (k, alg.b.one_key)
    return k


@dataclass
class QuasitilingReport:
    conditions: dict = field(default_factory=dict)  # name -> {"pass": bool, ...}

    @property
    def ok(self) -> bool:
        return all(c["pass"] for c in self.conditions.values())

    def to_json(self):
        return self.conditions


def check_quasitiling(q: Quasitiling, target: Window) -> QuasitilingReport:
    """Check the three quasitiling conditions; failures carry witnesses."""
    eps = Fraction(q.eps)
    rep = QuasitilingReport()
    subspace = any(isinstance(w, SubspaceWindow) for w in [target, *q.tiles])

    def norm(w):
        return w.as_subspace() if subspace else w

    # (i) W_{j,c} inside W_j and large
    bad = []
    for j, tile in enumerate(q.tiles):
        for c in q.centers[j]:
            sub = q.subwindows[j][c]
            if window_sum(norm(sub), norm(tile)).dim != tile.dim:
                bad.append({"tile": j, "center": _key_json(tile.ext, c), "reason": "subwindow not inside tile"})
            elif sub.dim < (1 - eps) * tile.dim:
                bad.append({"tile": j, "center": _key_json(tile.ext, c), "reason": f"dim {sub.dim} < {(1 - eps) * tile.dim}"})
    rep.conditions["(i) subwindow size"] = {"pass": not bad, "witnesses": bad}

    # (ii) independence of the translates c W_{j,c}
    total = None
    expected = 0
    placed = []
    witness = None
    for j, c, tw in q.translates():
        tw = norm(tw)
        expected += tw.dim
        new = tw if total is None else window_sum(total, tw)
        if witness is None and new.dim < (0 if total is None else total.dim) + tw.dim:
            for j2, c2, w2 in placed:
                if window_intersect(w2, tw).dim:
                    witness = {"first": [j2, _key_json(tw.ext, c2)], "second": [j, _key_json(tw.ext, c)]}
                    break
            else:
                witness = {"first": None, "second": [j, _key_json(tw.ext, c)]}
        placed.append((j, c, tw))
        total = new
    got = total.dim if total is not None else 0
    rep.conditions["(ii) independence"] = {
        "pass": got == expected, "sum_dim": got, "sum_of_dims": expected, "dependent_pair": witness,
    }

    # (iii) full translates inside the target, with coverage
    full = None
    outside = []
    tgt = norm(target)
    for j, tile in enumerate(q.tiles):
        for c in q.centers[j]:
            tw = norm(tile.translate(c))
            if window_sum(tgt, tw).dim != tgt.dim:
                outside.append({"tile": j, "center": _key_json(tile.ext, c)})
            full = tw if full is None else window_sum(full, tw)
    cov_dim = full.dim if full is not None else 0
    coverage = Fraction(cov_dim, target.dim) if target.dim else Fraction(0)
    rep.conditions["(iii) containment and coverage"] = {
        "pass": not outside and coverage >= 1 - eps,
        "outside": outside,
        "coverage": str(coverage),
        "required": str(1 - eps),
    }
    return rep
