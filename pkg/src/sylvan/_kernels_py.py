"""Pure-Python rank kernels (fallback for the compiled ``_kernels`` module).

Both kernels do incremental row echelon reduction: each incoming row is reduced
against the stored pivot rows, in increasing order of its leading column, until
it vanishes or lands on a free column. Rows are kept as ``(start, values)``
segments so banded inputs stay cheap.
"""

from __future__ import annotations

from math import gcd


def _segment(row, mod=None):
    vals = [x % mod for x in row] if mod else list(row)
    lo = 0
    n = len(vals)
    while lo < n and not vals[lo]:
        lo += 1
    if lo == n:
        return None
    hi = n
    while not vals[hi - 1]:
        hi -= 1
    return lo, vals[lo:hi]


def rank_mod_p(rows, ncols: int, p: int) -> int:
    """Rank of an integer matrix reduced mod the prime ``p``."""
    limit = min(len(rows), ncols)
    pivots: dict[int, list[int]] = {}
    rank = 0
    for row in rows:
        if rank == limit:
            break
        seg = _segment(row, p)
        if seg is None:
            continue
        start, vals = seg
        while True:
            piv = pivots.get(start)
            if piv is None:
                inv = pow(vals[0], -1, p)
                pivots[start] = [v * inv % p for v in vals]
                rank += 1
                break
            c = vals[0]
            if len(piv) > len(vals):
                vals = vals + [0] * (len(piv) - len(vals))
            for k in range(1, len(piv)):
                vals[k] = (vals[k] - c * piv[k]) % p
            i = 1
            n = len(vals)
            while i < n and not vals[i]:
                i += 1
            if i == n:
                break
            while not vals[n - 1]:
                n -= 1
            vals = vals[i:n]
            start += i
    return rank


def rank_zz(rows, ncols: int) -> int:
    """Rank over Q of an integer matrix (fraction-free, primitive rows)."""
    limit = min(len(rows), ncols)
    pivots: dict[int, list[int]] = {}
    rank = 0
    for row in rows:
        if rank == limit:
            break
        seg = _segment(row)
        if seg is None:
            continue
        start, vals = seg
        g = gcd(*vals)
        if g > 1:
            vals = [v // g for v in vals]
        while True:
            piv = pivots.get(start)
            if piv is None:
                pivots[start] = vals
                rank += 1
                break
            a, b = piv[0], vals[0]
            g = gcd(a, b)
            a, b = a // g, b // g
            n = max(len(vals), len(piv))
            new = [0] * n
            for k in range(1, len(vals)):
                new[k] = a * vals[k]
            for k in range(1, len(piv)):
                new[k] -= b * piv[k]
            i = 1
            while i < n and not new[i]:
                i += 1
            if i == n:
                break
            while not new[n - 1]:
                n -= 1
            vals = new[i:n]
            start += i
            g = gcd(*vals)
            if g > 1:
                vals = [v // g for v in vals]
    return rank
