"""Independent reference computations used only by the tests (sympy based)."""

from __future__ import annotations

from fractions import Fraction

import sympy
from sympy.polys.domains import GF as SymGF
from sympy.polys.matrices import DomainMatrix


def rank_qq(rows) -> int:
    if not rows or not rows[0]:
        return 0
    return sympy.Matrix([[sympy.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in r]
                         for r in rows]).rank()


def rank_gf(rows, p: int) -> int:
    if not rows or not rows[0]:
        return 0
    dom = SymGF(p)
    return DomainMatrix([[dom(int(x)) for x in r] for r in rows], (len(rows), len(rows[0])), dom).rank()


def rank_laurent(texts, var: str = "z") -> int:
    """Rank over Q(z) of a matrix of Laurent polynomial strings."""
    z = sympy.Symbol(var)
    M = sympy.Matrix([[sympy.sympify(s.replace("^", "**"), locals={var: z}) for s in r] for r in texts])
    return M.rank(simplify=True)
