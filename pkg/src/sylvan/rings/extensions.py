"""Extension rings S over R: twisted crossed products and tensor extensions.

Elements of either kind are :class:`ExtElem`: a finitely supported map from
indices to nonzero R-coefficients. For a crossed product R*Gamma the indices
are group elements and the law is

    (f s)(g t) = f sigma_s(g) u(s, t) (st).

For a tensor extension E (x)_K R the indices are K-basis keys of E and the law
comes from the key algebra's structure constants.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Sequence

from ..errors import DivisionByZero, InvalidInput
from ..expr import parse_expression
from ..linalg import Matrix, parse_matrix
from ..scalars import DEFAULT_POOL, GFElem
from .base import IdentityAutomorphism, LinearAutomorphism


class ExtElem:
    __slots__ = ("ext", "terms")

    def __init__(self, ext, terms: dict):
        self.ext = ext
        self.terms = terms

    def _other(self, o):
        if isinstance(o, ExtElem):
            if o.ext is not self.ext and o.ext != self.ext:
                raise InvalidInput("elements of different extensions")
            return o
        return self.ext.coerce(o)

    def __add__(self, o):
        o = self._other(o)
        return self.ext.add(self, o)

    __radd__ = __add__

    def __sub__(self, o):
        return self.ext.add(self, -self._other(o))

    def __rsub__(self, o):
        return self._other(o) - self

    def __neg__(self):
        return ExtElem(self.ext, {k: -c for k, c in self.terms.items()})

    def __mul__(self, o):
        return self.ext.mul(self, self._other(o))

    def __rmul__(self, o):
        return self.ext.mul(self._other(o), self)

    def __pow__(self, k: int):
        if k < 0:
            return self.ext.inverse(self) ** (-k)
        out = self.ext.one
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, o):
        if not isinstance(o, ExtElem):
            if isinstance(o, (int, Fraction, GFElem)):
                o = self.ext.coerce(o)
            else:
                return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def support(self) -> list:
        return sorted(self.terms, key=self.ext.sort_key)

    def coeff(self, key):
        return self.terms.get(key, self.ext.base.zero)

    def __repr__(self):
        return f"ExtElem({self.ext.format(self)!r})"

    def __str__(self):
        return self.ext.format(self)


class _ExtContext:
    def __init__(self, ext):
        self.S = ext
        self.base_names = ext.base.names()
        self.gen_names = ext.generator_names()

    def number(self, v):
        return self.S.coerce(v)

    def name(self, ident):
        if ident in self.gen_names:
            return self.gen_names[ident]
        if ident in self.base_names:
            return self.S.from_base(self.base_names[ident])
        raise KeyError(ident)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def div(self, a, b):
        return a * self.S.inverse(b)

    def neg(self, a):
        return -a

    def power(self, a, k):
        return a**k

    def tuple(self, items):
        R = self.S.base
        if not hasattr(R, "from_tuple"):
            raise ValueError("tuple literal not allowed for this base ring")
        vals = []
        for x in items:
            if isinstance(x, ExtElem):
                if set(x.terms) - {self.S.one_key}:
                    raise ValueError("tuple components must be scalars")
                x = x.coeff(self.S.one_key)
                x = x.parts[0] if hasattr(x, "parts") else x
            vals.append(x)
        return self.S.from_base(R.from_tuple(vals))


class _ExtensionBase:
    """Shared plumbing: element construction, addition, parsing, printing."""

    base = None
    one_key = None
    rank = None  # RankFunction on the base ring

    def __eq__(self, other):
        return type(other) is type(self) and other.uid == self.uid

    def __hash__(self):
        return hash(self.uid)

    @property
    def K(self):
        return self.base.K

    @property
    def zero(self):
        return ExtElem(self, {})

    @property
    def one(self):
        return ExtElem(self, {self.one_key: self.base.one})

    def element(self, terms: dict) -> ExtElem:
        R = self.base
        clean = {}
        for k, c in terms.items():
            if not self.valid_key(k):
                raise InvalidInput(f"invalid index {k!r} for {self!r}")
            if not R.is_zero(c):
                clean[k] = c
        return ExtElem(self, clean)

    def from_base(self, r) -> ExtElem:
        return ExtElem(self, {} if self.base.is_zero(r) else {self.one_key: r})

    def coerce(self, x) -> ExtElem:
        if isinstance(x, ExtElem) and (x.ext is self or x.ext == self):
            return x
        if isinstance(x, (int, Fraction, str)):
            return self.from_base(self.base.from_scalar(self.base.K(x)))
        return self.from_base(x)

    def add(self, a: ExtElem, b: ExtElem) -> ExtElem:
        out = dict(a.terms)
        R = self.base
        for k, c in b.terms.items():
            if k in out:
                s = out[k] + c
                if R.is_zero(s):
                    del out[k]
                else:
                    out[k] = s
            else:
                out[k] = c
        return ExtElem(self, out)

    def is_zero(self, a) -> bool:
        return not a.terms

    def scale(self, c, a: ExtElem) -> ExtElem:
        R = self.base
        return self.element({k: R.scale(c, v) for k, v in a.terms.items()})

    def from_scalar(self, c) -> ExtElem:
        return self.from_base(self.base.from_scalar(c))

    def names(self) -> dict:
        out = {n: self.from_base(v) for n, v in self.base.names().items()}
        out.update(self.generator_names())
        return out

    def parse(self, text: str, where: str | None = None) -> ExtElem:
        val = parse_expression(text, _ExtContext(self), where)
        return self.coerce(val)

    def matrix(self, text_or_obj, where: str | None = None) -> Matrix:
        """Parse a matrix over this extension (literal text or JSON object)."""
        return parse_matrix(text_or_obj, self, where)

    def format(self, a: ExtElem) -> str:
        if not a.terms:
            return "0"
        R = self.base
        parts = []
        for k in a.support():
            c = a.terms[k]
            mono = self.format_key(k)
            cs = R.format(c)
            if " " in cs and not (cs.startswith("(") and cs.endswith(")")):
                cs = f"({cs})"
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            elif cs == "-1":
                parts.append("-" + mono)
            else:
                parts.append(f"{cs}*{mono}")
        out = parts[0]
        for p in parts[1:]:
            out += " - " + p[1:] if p.startswith("-") else " + " + p
        return out

    def random_element(self, rng: random.Random, pool: Sequence = DEFAULT_POOL, keys: Sequence | None = None,
                       density: float = 0.6) -> ExtElem:
        keys = list(keys) if keys is not None else self.sample_keys()
        terms = {}
        for k in keys:
            if rng.random() < density:
                terms[k] = self.base.random_element(rng, pool)
        return self.element(terms)

    def inverse(self, a: ExtElem) -> ExtElem:
        raise DivisionByZero(f"{self.format(a)} has no known inverse")

    def inv(self, a: ExtElem) -> ExtElem:
        return self.inverse(a)


class CrossedProduct(_ExtensionBase):
    """Twisted crossed product R*Gamma with action sigma and cocycle u.

    ``action`` is a list of automorphisms: one per generator for Z^d (they
    must commute) or one per element for a finite group; ``None`` means the
    trivial action. ``cocycle`` is an |G| x |G| table of units of R (finite
    groups only); ``None`` means u = 1.
    """

    kind = "crossed_product"

    def __init__(self, base, group, action=None, cocycle=None, rank=None, validate: bool = True,
                 seed: int = 0, rank_samples: int = 10):
        self.base = base
        self.group = group
        self.one_key = group.identity
        self.rank = rank
        self.seed = seed
        R = base
        if group.finite:
            n = group.order()
            if action is None:
                self._sigma = None
            else:
                if len(action) != n:
                    raise InvalidInput(f"need one automorphism per group element ({n})")
                self._sigma = [a if a is not None else IdentityAutomorphism() for a in action]
                if all(getattr(a, "is_identity", False) for a in self._sigma):
                    self._sigma = None
            if cocycle is None:
                self._u = None
            else:
                if len(cocycle) != n or any(len(r) != n for r in cocycle):
                    raise InvalidInput(f"cocycle table must be {n}x{n}")
                self._u = [[c for c in r] for r in cocycle]
                if all(c == R.one for r in self._u for c in r):
                    self._u = None
            self._gens = None
        else:
            if cocycle is not None:
                raise InvalidInput("cocycles over Z^d are not supported (use a finite quotient model)")
            self._u = None
            if action is None or all(getattr(a, "is_identity", False) for a in action):
                self._gens = None
            else:
                if len(action) != group.d:
                    raise InvalidInput(f"need one automorphism per generator ({group.d})")
                self._gens = list(action)
                self._gen_inv = [a.inverse() for a in self._gens]
            self._sigma = None
            self._sigma_cache: dict = {}
        self.uid = repr((
            "cp",
            repr(base),
            group.to_json(),
            None if (self._sigma is None and self._gens is None) else self._action_json(),
            None if self._u is None else [[repr(c) for c in r] for r in self._u],
        ))
        self.validation: dict = {}
        if validate:
            self.validate(seed=seed, rank_samples=rank_samples)

    def __repr__(self):
        return f"CrossedProduct({self.base!r}, {self.group!r})"

    def __getstate__(self):
        state = dict(self.__dict__)
        state["_sigma_cache"] = {}
        return state

    # index plumbing
    def valid_key(self, k) -> bool:
        if self.group.finite:
            return isinstance(k, int) and 0 <= k < self.group.order()
        return isinstance(k, tuple) and len(k) == self.group.d and all(isinstance(x, int) for x in k)

    def sort_key(self, k):
        return self.group.sort_key(k)

    def format_key(self, k) -> str:
        return self.group.format(k)

    def generator_names(self) -> dict:
        return {n: self.unit(g) for n, g in self.group.generator_names().items()}

    def unit(self, g) -> ExtElem:
        return ExtElem(self, {g: self.base.one})

    def sample_keys(self):
        if self.group.finite:
            return self.group.elements()
        return [tuple(v) for v in itertools.product(range(-1, 2), repeat=self.group.d)]

    @property
    def trivial_action(self) -> bool:
        return self._sigma is None and self._gens is None

    # action and cocycle
    def sigma_map(self, g):
        if self.group.finite:
            return IdentityAutomorphism() if self._sigma is None else self._sigma[g]
        if self._gens is None:
            return IdentityAutomorphism()
        m = self._sigma_cache.get(g)
        if m is None:
            m = IdentityAutomorphism()
            for i, k in enumerate(g):
                if k:
                    step = self._gens[i] if k > 0 else self._gen_inv[i]
                    for _ in range(abs(k)):
                        m = step.compose(m) if not isinstance(m, IdentityAutomorphism) else step
            self._sigma_cache[g] = m
        return m

    def sigma(self, g, a):
        """sigma_g(a) for a in R."""
        return self.sigma_map(g).apply(a)

    def cocycle(self, s, t):
        if self._u is None:
            return self.base.one
        return self._u[s][t]

    # multiplication
    def mul(self, a: ExtElem, b: ExtElem) -> ExtElem:
        R = self.base
        G = self.group
        out: dict = {}
        trivial_u = self._u is None
        for s, f in a.terms.items():
            sig = self.sigma_map(s)
            ident = sig.is_identity
            for t, g in b.terms.items():
                c = f * (g if ident else sig.apply(g))
                if not trivial_u:
                    c = c * self._u[s][t]
                st = G.mul(s, t)
                if st in out:
                    out[st] = out[st] + c
                else:
                    out[st] = c
        return ExtElem(self, {k: c for k, c in out.items() if not R.is_zero(c)})

    def unit_times(self, s, b: ExtElem) -> dict:
        """Terms of s-bar * b as a dict, without building an ExtElem."""
        sig = self.sigma_map(s)
        G = self.group
        out = {}
        for t, g in b.terms.items():
            c = g if sig.is_identity else sig.apply(g)
            if self._u is not None:
                c = c * self._u[s][t]
            out[G.mul(s, t)] = c
        return out

    def unit_inverse(self, s) -> ExtElem:
        """(s-bar)^{-1} = sigma_s^{-1}(u(s, s^{-1})^{-1}) (s^{-1})-bar."""
        si = self.group.inv(s)
        u = self.cocycle(s, si)
        x = self.sigma_map(s).inverse().apply(self.base.inv(u))
        return ExtElem(self, {si: x})

    def inverse(self, a: ExtElem) -> ExtElem:
        if len(a.terms) != 1:
            raise DivisionByZero(f"{self.format(a)} is not a monomial unit")
        (s, c), = a.terms.items()
        return self.unit_inverse(s) * self.from_base(self.base.inv(c))

    def star(self, a: ExtElem, base_star=None) -> ExtElem:
        """(sum f_s s)* = sum u(s^{-1}, s)* sigma_{s^{-1}}(f_s*) (s^{-1})."""
        bs = base_star or (lambda x: x)
        out = {}
        for s, f in a.terms.items():
            si = self.group.inv(s)
            out[si] = bs(self.cocycle(si, s)) * self.sigma(si, bs(f))
        return self.element(out)

    # validation
    def _action_json(self):
        if self.group.finite:
            return [a.to_json() if isinstance(a, LinearAutomorphism) else "id" for a in self._sigma]
        return [a.to_json() if isinstance(a, LinearAutomorphism) else "id" for a in self._gens]

    def validate(self, seed: int = 0, rank_samples: int = 10) -> dict:
        """Check the twisted-action conditions; raise InvalidInput on failure."""
        R = self.base
        G = self.group
        report = {"seed": seed, "exhaustive": None, "checked_triples": 0}
        for sig in (self._sigma or []) + (self._gens or []):
            probs = sig.check()
            if probs:
                raise InvalidInput(f"action is not an automorphism: {probs[0]}")
        if G.finite:
            e = G.identity
            if not self.sigma_map(e).is_identity:
                raise InvalidInput("sigma_e must be the identity")
            elems = G.elements()
            for s in elems:
                if self.cocycle(e, s) != R.one or self.cocycle(s, e) != R.one:
                    raise InvalidInput("cocycle must be normalized: u(e,s) = u(s,e) = 1")
            for s in elems:
                for t in elems:
                    u = self.cocycle(s, t)
                    try:
                        R.inv(u)
                    except (DivisionByZero, InvalidInput):
                        raise InvalidInput(f"cocycle value u({G.format(s)},{G.format(t)}) is not a unit") from None
            basis = self._base_basis()
            # sigma_s sigma_t = Ad(u(s,t)) sigma_st on generators of R
            for s in elems:
                for t in elems:
                    u = self.cocycle(s, t)
                    ui = R.inv(u)
                    for b in basis:
                        lhs = self.sigma(s, self.sigma(t, b))
                        rhs = u * self.sigma(G.mul(s, t), b) * ui
                        if lhs != rhs:
                            raise InvalidInput(
                                f"sigma_s sigma_t != Ad(u) sigma_st at s={G.format(s) or 'e'}, t={G.format(t) or 'e'}"
                            )
            n = G.order()
            if n <= 16:
                triples = itertools.product(elems, repeat=3)
                report["exhaustive"] = True
            else:
                rng = random.Random(seed)
                triples = [(rng.choice(elems), rng.choice(elems), rng.choice(elems)) for _ in range(4000)]
                report["exhaustive"] = False
            count = 0
            for g, s, t in triples:
                count += 1
                lhs = self.sigma(g, self.cocycle(s, t)) * self.cocycle(g, G.mul(s, t))
                rhs = self.cocycle(g, s) * self.cocycle(G.mul(g, s), t)
                if lhs != rhs:
                    raise InvalidInput(
                        f"cocycle identity fails at ({G.format(g) or 'e'}, {G.format(s) or 'e'}, {G.format(t) or 'e'})"
                    )
            report["checked_triples"] = count
        elif self._gens is not None:
            basis = self._base_basis()
            for i, a in enumerate(self._gens):
                for j, b in enumerate(self._gens):
                    for x in basis:
                        if a.apply(b.apply(x)) != b.apply(a.apply(x)):
                            raise InvalidInput(f"generator actions {i + 1} and {j + 1} do not commute")
        if self.rank is not None and not self.trivial_action and rank_samples:
            rng = random.Random(seed)
            gens = G.elements() if G.finite else G.generators()
            # basis elements (idempotents, matrix units) first: dense random
            # matrices are almost always of full rank and see no asymmetry
            probes = [Matrix(R, [[b]]) for b in self._base_basis()]
            for _ in range(rank_samples):
                n, m = rng.randint(1, 3), rng.randint(1, 3)
                A = Matrix(R, [[R.random_element(rng) for _ in range(m)] for _ in range(n)], n, m)
                X = Matrix(R, [[R.random_element(rng)] for _ in range(n)], n, 1)
                probes += [A, X @ Matrix(R, [[R.random_element(rng) for _ in range(m)]], 1, m)]
            for A in probes:
                for g in gens:
                    if self.rank.evaluate(A.map(lambda x: self.sigma(g, x))) != self.rank.evaluate(A):
                        raise InvalidInput(f"sigma_{G.format(g)} does not preserve the base rank function")
        self.validation = report
        return report

    def _base_basis(self):
        R = self.base
        if not hasattr(R, "dim") or not hasattr(R, "from_coords"):
            return [R.one]
        F = R.K
        out = []
        for e in range(R.dim):
            c = [F.zero] * R.dim
            c[e] = F.one
            out.append(R.from_coords(c))
        return out

    def to_json(self):
        return {"kind": "crossed_product", "group": self.group.to_json(), "base": getattr(self.base, "to_json", repr)()}


class TensorExtension(_ExtensionBase):
    """E (x)_K R for a commutative key algebra E (K[t], E_0, or products)."""

    kind = "tensor"

    def __init__(self, algebra, base, rank=None):
        if algebra.K != base.K:
            raise InvalidInput("algebra and base ring over different fields")
        self.algebra = algebra
        self.base = base
        self.one_key = algebra.one_key
        self.rank = rank
        self.uid = repr(("tensor", repr(algebra), repr(base)))

    def __repr__(self):
        return f"TensorExtension({self.algebra!r}, {self.base!r})"

    def valid_key(self, k) -> bool:
        return self.algebra.valid_key(k)

    def sort_key(self, k):
        return self.algebra.sort_key(k)

    def format_key(self, k) -> str:
        return self.algebra.format_key(k)

    def generator_names(self) -> dict:
        R = self.base
        return {n: ExtElem(self, {k: R.one}) for n, k in self.algebra.key_names().items()}

    def unit(self, k) -> ExtElem:
        return ExtElem(self, {k: self.base.one})

    def sample_keys(self):
        if self.algebra.finite:
            return self.algebra.all_keys()
        return self.algebra.degree_keys(3)

    def sigma(self, g, a):
        return a

    def mul(self, a: ExtElem, b: ExtElem) -> ExtElem:
        R = self.base
        A = self.algebra
        out: dict = {}
        if A.monomial:
            for k1, c1 in a.terms.items():
                for k2, c2 in b.terms.items():
                    k = A.mul_key(k1, k2)
                    c = c1 * c2
                    out[k] = out[k] + c if k in out else c
        else:
            for k1, c1 in a.terms.items():
                for k2, c2 in b.terms.items():
                    prod = c1 * c2
                    for k, s in A.mul_keys(k1, k2).items():
                        c = R.scale(s, prod)
                        out[k] = out[k] + c if k in out else c
        return ExtElem(self, {k: c for k, c in out.items() if not R.is_zero(c)})

    def key_times(self, key, b: ExtElem) -> dict:
        """Terms of e_key * b (e_key a basis element of E)."""
        A = self.algebra
        R = self.base
        out = {}
        if A.monomial:
            for k2, c2 in b.terms.items():
                out[A.mul_key(key, k2)] = c2
            return out
        for k2, c2 in b.terms.items():
            for k, s in A.mul_keys(key, k2).items():
                c = R.scale(s, c2)
                out[k] = out[k] + c if k in out else c
        return {k: c for k, c in out.items() if not R.is_zero(c)}

    def inverse(self, a: ExtElem) -> ExtElem:
        if len(a.terms) == 1 and self.one_key in a.terms:
            return self.from_base(self.base.inv(a.terms[self.one_key]))
        raise DivisionByZero(f"{self.format(a)} is not invertible here")

    def to_json(self):
        return {"kind": "tensor", "algebra": self.algebra.to_json(), "base": getattr(self.base, "to_json", repr)()}


def poly_ext(base, var: str = "t", rank=None) -> TensorExtension:
    """R[t] (the polynomial part of K(t) (x)_K R)."""
    from .algebras import PolyAlgebra

    return TensorExtension(PolyAlgebra(base.K, var), base, rank=rank)


__all__ = ["ExtElem", "CrossedProduct", "TensorExtension", "poly_ext"]
