"""Groups indexing crossed products: Z^d and finite groups given by tables."""

from __future__ import annotations

import itertools
import random
from typing import Sequence

from ..errors import InvalidInput


class ZdGroup:
    """Z^d; elements are integer tuples of length d."""

    finite = False

    def __init__(self, d: int, names: Sequence[str] | None = None):
        if d < 1:
            raise InvalidInput("Z^d needs d >= 1")
        self.d = d
        if names is None:
            names = ["z"] if d == 1 else [f"z{i + 1}" for i in range(d)]
        if len(names) != d:
            raise InvalidInput("one variable name per coordinate")
        self.names = tuple(names)
        self.identity = (0,) * d

    def __repr__(self):
        return f"Z^{self.d}"

    def __eq__(self, other):
        return isinstance(other, ZdGroup) and other.d == self.d and other.names == self.names

    def __hash__(self):
        return hash(("Zd", self.d, self.names))

    def mul(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def inv(self, a):
        return tuple(-x for x in a)

    def generators(self):
        return [tuple(1 if i == j else 0 for j in range(self.d)) for i in range(self.d)]

    def generator_names(self) -> dict:
        return dict(zip(self.names, self.generators()))

    def sort_key(self, a):
        return a

    def format(self, a) -> str:
        parts = []
        for name, k in zip(self.names, a):
            if k == 1:
                parts.append(name)
            elif k:
                parts.append(f"{name}^{k}")
        return "*".join(parts)

    def order(self):
        return None

    def to_json(self):
        return {"type": "Zd", "d": self.d, "names": list(self.names)}


class FiniteGroup:
    """Finite group on elements 0..n-1 with a multiplication table."""

    finite = True

    def __init__(
        self,
        names: Sequence[str],
        mul_table: Sequence[Sequence[int]],
        inverse_table: Sequence[int] | None = None,
        identity: int | None = None,
        generators: dict[str, int] | None = None,
        seed: int = 0,
    ):
        n = len(names)
        if n == 0:
            raise InvalidInput("empty group")
        table = [list(map(int, r)) for r in mul_table]
        if len(table) != n or any(len(r) != n for r in table):
            raise InvalidInput(f"multiplication table must be {n}x{n}")
        for r in table:
            if sorted(r) != list(range(n)):
                raise InvalidInput("multiplication table rows must be permutations")
        for c in range(n):
            if sorted(table[r][c] for r in range(n)) != list(range(n)):
                raise InvalidInput("multiplication table columns must be permutations")
        if identity is None:
            identity = next((e for e in range(n) if table[e] == list(range(n))), None)
            if identity is None:
                raise InvalidInput("no identity element")
        if table[identity] != list(range(n)) or [table[r][identity] for r in range(n)] != list(range(n)):
            raise InvalidInput(f"{names[identity]!r} is not an identity")
        inv = [next(b for b in range(n) if table[a][b] == identity) for a in range(n)]
        if inverse_table is not None and list(map(int, inverse_table)) != inv:
            raise InvalidInput("inverse table is inconsistent with the multiplication table")
        self.names = tuple(names)
        self.table = tuple(tuple(r) for r in table)
        self.inverse = tuple(inv)
        self.identity = identity
        self.n = n
        self.assoc_seed = None
        self._check_associative(seed)
        gens = generators if generators is not None else {}
        self.gens = dict(gens)

    def _check_associative(self, seed: int):
        n = self.n
        T = self.table
        if n <= 64:
            triples = itertools.product(range(n), repeat=3)
        else:
            rng = random.Random(seed)
            self.assoc_seed = seed
            triples = [(rng.randrange(n), rng.randrange(n), rng.randrange(n)) for _ in range(20000)]
        for a, b, c in triples:
            if T[T[a][b]][c] != T[a][T[b][c]]:
                raise InvalidInput(
                    f"not associative at ({self.names[a]}, {self.names[b]}, {self.names[c]})"
                )

    def __repr__(self):
        return f"FiniteGroup(order={self.n})"

    def __eq__(self, other):
        return isinstance(other, FiniteGroup) and other.table == self.table and other.names == self.names

    def __hash__(self):
        return hash(self.table)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def elements(self) -> list[int]:
        return list(range(self.n))

    def order(self) -> int:
        return self.n

    def sort_key(self, a: int):
        return a

    def format(self, a: int) -> str:
        return "" if a == self.identity else self.names[a]

    def generator_names(self) -> dict:
        out = {name: i for i, name in enumerate(self.names) if name.isidentifier() and i != self.identity}
        out.update(self.gens)
        return out

    def to_json(self):
        return {
            "type": "table",
            "elements": list(self.names),
            "mul_table": [list(r) for r in self.table],
            "inverse_table": list(self.inverse),
            "identity": self.identity,
        }

    # constructors
    @classmethod
    def from_generators(cls, perms: dict[str, Sequence[int]]) -> "FiniteGroup":
        """Permutation group generated by named permutations (words become names)."""
        gens = {k: tuple(v) for k, v in perms.items()}
        deg = len(next(iter(gens.values())))
        ident = tuple(range(deg))

        def compose(p, q):  # apply p then q (left-to-right words)
            return tuple(q[p[i]] for i in range(deg))

        names = {ident: "e"}
        order = [ident]
        frontier = [ident]
        while frontier:
            nxt = []
            for g in frontier:
                for gname, p in gens.items():
                    h = compose(g, p)
                    if h not in names:
                        word = gname if names[g] == "e" else _append_word(names[g], gname)
                        names[h] = word
                        order.append(h)
                        nxt.append(h)
            frontier = nxt
        index = {g: i for i, g in enumerate(order)}
        table = [[index[compose(a, b)] for b in order] for a in order]
        return cls([names[g] for g in order], table, identity=0, generators={k: index[v] for k, v in gens.items()})

    @classmethod
    def cyclic(cls, n: int, name: str = "s") -> "FiniteGroup":
        if n < 1:
            raise InvalidInput("cyclic group order must be positive")
        names = ["e"] + [name if k == 1 else f"{name}^{k}" for k in range(1, n)]
        table = [[(a + b) % n for b in range(n)] for a in range(n)]
        return cls(names, table, identity=0, generators={name: 1 % n} if n > 1 else {})

    @classmethod
    def symmetric3(cls) -> "FiniteGroup":
        """S_3 generated by a 3-cycle r and a transposition f."""
        return cls.from_generators({"r": (1, 2, 0), "f": (1, 0, 2)})

    @classmethod
    def direct_product(cls, g: "FiniteGroup", h: "FiniteGroup") -> "FiniteGroup":
        pairs = [(a, b) for a in range(g.n) for b in range(h.n)]
        index = {p: i for i, p in enumerate(pairs)}

        def name(p):
            a, b = p
            parts = [x for x in (g.format(a), h.format(b)) if x]
            return "*".join(parts) if parts else "e"

        table = [[index[(g.mul(a1, a2), h.mul(b1, b2))] for (a2, b2) in pairs] for (a1, b1) in pairs]
        gens = {k: index[(v, h.identity)] for k, v in g.generator_names().items()}
        gens.update({k: index[(g.identity, v)] for k, v in h.generator_names().items()})
        return cls([name(p) for p in pairs], table, identity=index[(g.identity, h.identity)], generators=gens)


def _append_word(word: str, gen: str) -> str:
    """Append a generator to a word, collapsing a trailing power."""
    head, _, last = word.rpartition("*")
    base, _, exp = last.partition("^")
    if base == gen:
        k = int(exp or 1) + 1
        new_last = f"{gen}^{k}"
        return f"{head}*{new_last}" if head else new_last
    return f"{word}*{gen}"


__all__ = ["ZdGroup", "FiniteGroup"]
