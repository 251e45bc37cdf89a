"""Select the compiled rank kernels, falling back to pure Python.

Set ``SYLVAN_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
rank_mod_p = _kernels_py.rank_mod_p
rank_zz = _kernels_py.rank_zz

if os.environ.get("SYLVAN_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        rank_mod_p = _compiled.rank_mod_p
        rank_zz = _compiled.rank_zz
        BACKEND = "cython"

__all__ = ["BACKEND", "rank_mod_p", "rank_zz"]
