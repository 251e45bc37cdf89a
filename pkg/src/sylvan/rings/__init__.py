"""Base rings, groups, key algebras and the extension rings built over them."""

from __future__ import annotations

from .algebras import FiniteAlgebra, PolyAlgebra, TensorAlgebra
from .base import (
    IdentityAutomorphism,
    LinearAutomorphism,
    MatElem,
    MatrixRing,
    ProdElem,
    ProductRing,
)
from .extensions import CrossedProduct, ExtElem, TensorExtension, poly_ext
from .groups import FiniteGroup, ZdGroup

__all__ = [
    "FiniteAlgebra",
    "PolyAlgebra",
    "TensorAlgebra",
    "IdentityAutomorphism",
    "LinearAutomorphism",
    "MatElem",
    "MatrixRing",
    "ProdElem",
    "ProductRing",
    "CrossedProduct",
    "ExtElem",
    "TensorExtension",
    "poly_ext",
    "FiniteGroup",
    "ZdGroup",
]
