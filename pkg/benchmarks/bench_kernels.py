"""Time the compiled rank kernels against the pure-Python fallback.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Both backends
get identical inputs and must return identical ranks; the script exits
non-zero if they ever disagree or the compiled module is missing.
"""

from __future__ import annotations

import argparse
import random
import sys
import timeit

from sylvan import _kernels_py
from sylvan.extension_rank import compress
from sylvan.linalg import _int_rows
from sylvan.rank_functions import FieldRank
from sylvan.rings import ZdGroup
from sylvan.rings.extensions import CrossedProduct
from sylvan.scalars import QQ
from sylvan.windows import box_window

P = (1 << 61) - 1


def dense(rng, n, m, lo=-9, hi=9):
    return [[rng.randint(lo, hi) for _ in range(m)] for _ in range(n)]


def low_rank(rng, n, m, r):
    X, Y = dense(rng, n, r, -3, 3), dense(rng, r, m, -3, 3)
    return [[sum(X[i][k] * Y[k][j] for k in range(r)) for j in range(m)] for i in range(n)]


def banded(N):
    """The compression matrix of a 2x2 Laurent matrix on a box of size N."""
    S = CrossedProduct(QQ, ZdGroup(1), rank=FieldRank(QQ))
    A = S.matrix("[[1 - z^2, 3*z^-1 + z], [2 + z^-2, z - 4]]")
    B = compress(A, box_window(S, N), build_only=True).B
    return _int_rows(B), B.ncols


def cases():
    rng = random.Random(0)
    yield "dense 60x60", dense(rng, 60, 60), 60
    yield "dense 150x150", dense(rng, 150, 150), 150
    yield "rank-40 200x200", low_rank(rng, 200, 200, 40), 200
    rows, m = banded(256)
    yield f"banded {len(rows)}x{m}", rows, m


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    try:
        from sylvan import _kernels
    except ImportError:
        print("compiled kernels are not built; run `pip install -e . --no-build-isolation`", file=sys.stderr)
        return 1
    print(f"{'case':<22}{'kernel':<11}{'python s':>10}{'cython s':>10}{'speedup':>9}")
    bad = False
    for name, rows, m in cases():
        for kernel, args_ in (("rank_mod_p", (rows, m, P)), ("rank_zz", (rows, m))):
            py, cy = getattr(_kernels_py, kernel), getattr(_kernels, kernel)
            if py(*args_) != cy(*args_):
                print(f"MISMATCH on {name} / {kernel}", file=sys.stderr)
                bad = True
            t_py = min(timeit.repeat(lambda: py(*args_), number=1, repeat=args.repeat))
            t_cy = min(timeit.repeat(lambda: cy(*args_), number=1, repeat=args.repeat))
            print(f"{name:<22}{kernel:<11}{t_py:>10.4f}{t_cy:>10.4f}{t_py / t_cy:>8.1f}x")
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
