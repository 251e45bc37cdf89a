"""Build rings from JSON spec objects.

Example::

    {"kind": "crossed_product",
     "base": {"type": "product_ring", "r": 2, "weights": ["1/2", "1/2"]},
     "group": {"type": "Zd", "d": 1, "names": ["z"]},
     "action": {"z": {"permutation": [1, 0]}}}

Bases: ``field``, ``matrix_ring`` (``k``), ``product_ring`` (``r``,
``weights``). Groups: ``Zd``, ``cyclic``, ``symmetric3``, ``table``,
``product``. Actions are given on group generators as ``permutation``,
``conjugate_by`` or ``matrix``; for finite groups they are extended along
words and the result is checked by the crossed product's own validation.
``cocycle`` is a |G| x |G| table of element strings (finite groups only).

``poly_ext`` takes ``base`` and ``var``. ``finite_ext`` takes ``base`` and an
``algebra``: ``{"gaussian": "i"}``, ``{"minimal_polynomial": [...], "var":
"u"}``, ``{"names": [...], "constants": [...]}`` or ``{"tensor": [a, b]}``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from ..errors import InvalidInput
from ..rank_functions import FieldRank, MatrixRingRank, ProductRingRank
from ..scalars import field_from_name
from .algebras import FiniteAlgebra
from .base import LinearAutomorphism, MatrixRing, ProductRing
from .extensions import CrossedProduct, TensorExtension, poly_ext
from .groups import FiniteGroup, ZdGroup

__all__ = ["build_base", "build_group", "build_algebra", "build_ring", "load_spec"]


def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise InvalidInput(f"{where}: missing key {key!r}")
    return obj[key]


def build_base(obj: dict | None):
    """(ring, rank function) for a base spec; default is the field Q."""
    obj = obj or {"type": "field"}
    kind = obj.get("type", "field")
    F = field_from_name(str(obj.get("field", "QQ")))
    if kind == "field":
        return F, FieldRank(F)
    if kind == "matrix_ring":
        R = MatrixRing(F, int(_need(obj, "k", "base")))
        return R, MatrixRingRank(R)
    if kind == "product_ring":
        r = int(obj.get("r", len(obj.get("weights", ())) or 0))
        R = ProductRing(F, r)
        weights = obj.get("weights") or [f"1/{r}"] * r
        return R, ProductRingRank(R, [Fraction(str(w)) for w in weights])
    raise InvalidInput(f"base: unknown type {kind!r}")


def build_group(obj: dict):
    kind = _need(obj, "type", "group")
    if kind == "Zd":
        d = int(obj.get("d", 1))
        return ZdGroup(d, obj.get("names"))
    if kind == "cyclic":
        return FiniteGroup.cyclic(int(_need(obj, "n", "group")), obj.get("name", "s"))
    if kind == "symmetric3":
        return FiniteGroup.symmetric3()
    if kind == "table":
        return FiniteGroup(_need(obj, "names", "group"), _need(obj, "table", "group"),
                           generators=obj.get("generators"))
    if kind == "product":
        factors = [build_group(f) for f in _need(obj, "factors", "group")]
        if any(not f.finite for f in factors):
            raise InvalidInput("group: products are supported for finite factors only")
        out = factors[0]
        for f in factors[1:]:
            out = FiniteGroup.direct_product(out, f)
        return out
    raise InvalidInput(f"group: unknown type {kind!r}")


def _automorphism(R, obj: dict, where: str):
    if "permutation" in obj:
        if not isinstance(R, ProductRing):
            raise InvalidInput(f"{where}: permutation actions need a product-ring base")
        return LinearAutomorphism.permutation(R, [int(x) for x in obj["permutation"]])
    if "conjugate_by" in obj:
        if not isinstance(R, MatrixRing):
            raise InvalidInput(f"{where}: conjugation actions need a matrix-ring base")
        g = R.from_rows([[R.K.parse(str(x)) for x in row] for row in obj["conjugate_by"]])
        return LinearAutomorphism.conjugation(R, g)
    if "matrix" in obj:
        if not hasattr(R, "dim"):
            raise InvalidInput(f"{where}: matrix actions need a finite-dimensional base")
        return LinearAutomorphism(R, [[R.K.parse(str(x)) for x in row] for row in obj["matrix"]])
    raise InvalidInput(f"{where}: action needs 'permutation', 'conjugate_by' or 'matrix'")


def _action(R, G, obj):
    if not obj:
        return None
    if G.finite:
        gens = G.generator_names()
    else:
        gens = {n: i for i, n in enumerate(G.names)}
    per_gen = {}
    for name, spec in obj.items():
        if name not in gens:
            raise InvalidInput(f"action: {name!r} is not a generator (known: {sorted(gens)})")
        per_gen[name] = _automorphism(R, spec, f"action[{name}]")
    if not G.finite:
        return [per_gen.get(n, LinearAutomorphism.identity(R)) for n in G.names]
    # extend along words by breadth-first search; consistency is validated later
    sig = {G.identity: LinearAutomorphism.identity(R)}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for g in frontier:
            for name, s in gens.items():
                h = G.mul(g, s)
                if h not in sig:
                    sig[h] = sig[g].compose(per_gen.get(name, LinearAutomorphism.identity(R)))
                    nxt.append(h)
        frontier = nxt
    if len(sig) != G.order():
        raise InvalidInput("action: the listed generators do not generate the group")
    return [sig[g] for g in G.elements()]


def _parse_base_elem(R, x, where):
    return R.parse(str(x), where)


def build_algebra(F, obj: dict) -> FiniteAlgebra:
    if "gaussian" in obj:
        return FiniteAlgebra.gaussian_rationals(F, str(obj["gaussian"]))
    if "minimal_polynomial" in obj:
        coeffs = [F.parse(str(c)) for c in obj["minimal_polynomial"]]
        return FiniteAlgebra.from_minimal_polynomial(F, coeffs, var=obj.get("var", "u"), names=obj.get("names"))
    if "tensor" in obj:
        a, b = (build_algebra(F, x) for x in obj["tensor"])
        return FiniteAlgebra.tensor(a, b)
    if "constants" in obj:
        consts = [[[F.parse(str(c)) for c in v] for v in row] for row in obj["constants"]]
        return FiniteAlgebra(F, _need(obj, "names", "algebra"), consts)
    raise InvalidInput("algebra: need 'gaussian', 'minimal_polynomial', 'tensor' or 'constants'")


def build_ring(obj: dict):
    """The ring S described by ``obj``; its base rank is stored as ``S.rank``."""
    if not isinstance(obj, dict):
        raise InvalidInput("spec must be a JSON object")
    kind = _need(obj, "kind", "spec")
    R, rk = build_base(obj.get("base"))
    if kind == "crossed_product":
        G = build_group(_need(obj, "group", "spec"))
        action = _action(R, G, obj.get("action"))
        cocycle = obj.get("cocycle")
        if cocycle is not None:
            cocycle = [[_parse_base_elem(R, x, f"cocycle[{i}][{j}]") for j, x in enumerate(row)]
                       for i, row in enumerate(cocycle)]
        return CrossedProduct(R, G, action=action, cocycle=cocycle, rank=rk, seed=int(obj.get("seed", 0)))
    if kind == "poly_ext":
        return poly_ext(R, obj.get("var", "t"), rank=rk)
    if kind == "finite_ext":
        return TensorExtension(build_algebra(R.K, _need(obj, "algebra", "spec")), R, rank=rk)
    raise InvalidInput(f"spec: unknown kind {kind!r}")


def load_spec(path_or_obj):
    """Read a spec from a path, a JSON string or an already-parsed object."""
    if isinstance(path_or_obj, dict):
        return build_ring(path_or_obj)
    text = str(path_or_obj)
    p = Path(text)
    if not text.lstrip().startswith("{") and p.exists():
        text = p.read_text()
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidInput(f"spec: invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    return build_ring(obj)
