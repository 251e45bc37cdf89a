"""Small recursive-descent parser for ring element text.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' ['-'] INT)?
    atom   := NUMBER | NAME | '(' expr (',' expr)* ')'

The parser evaluates eagerly against a context object, so the same code reads
rationals, polynomials, Laurent polynomials, crossed-product elements and
tuples for product rings.
"""

from __future__ import annotations

import re
from typing import Any, Protocol

from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


class Context(Protocol):
    def number(self, value: int) -> Any: ...
    def name(self, ident: str) -> Any: ...
    def add(self, a, b): ...
    def sub(self, a, b): ...
    def mul(self, a, b): ...
    def div(self, a, b): ...
    def neg(self, a): ...
    def power(self, a, k: int): ...


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # pragma: no cover - regex always matches a char
            break
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            out.append(("int", m.group(1), start))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), start))
        else:
            out.append(("op", m.group(3), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, ctx, where: str | None):
        self.text = text
        self.ctx = ctx
        self.where = where
        self.toks = _tokenize(text)
        self.i = 0

    def error(self, msg: str, pos: int | None = None):
        if pos is None:
            pos = self.toks[self.i][2]
        loc = f"col {pos + 1}"
        if self.where:
            loc = f"{self.where}, {loc}"
        raise ParseError(f"{msg} in {self.text!r}", loc)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, op: str):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            self.error(f"expected {op!r}", tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        val = self.expr()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return val

    def expr(self):
        val = self.term()
        while True:
            kind, tok, _ = self.peek()
            if kind == "op" and tok in "+-":
                self.take()
                rhs = self.term()
                val = self.ctx.add(val, rhs) if tok == "+" else self.ctx.sub(val, rhs)
            else:
                return val

    def term(self):
        val = self.unary()
        while True:
            kind, tok, pos = self.peek()
            if kind == "op" and tok in "*/":
                self.take()
                rhs = self.unary()
                try:
                    val = self.ctx.mul(val, rhs) if tok == "*" else self.ctx.div(val, rhs)
                except ParseError:
                    raise
                except (ValueError, ZeroDivisionError, TypeError) as exc:
                    self.error(str(exc), pos)
            else:
                return val

    def unary(self):
        kind, tok, _ = self.peek()
        if kind == "op" and tok in "+-":
            self.take()
            val = self.unary()
            return self.ctx.neg(val) if tok == "-" else val
        return self.power()

    def power(self):
        base = self.atom()
        kind, tok, pos = self.peek()
        if kind == "op" and tok == "^":
            self.take()
            sign = 1
            if self.peek()[:2] == ("op", "-"):
                self.take()
                sign = -1
            kind, tok, pos = self.take()
            if kind != "int":
                self.error("expected integer exponent", pos)
            try:
                return self.ctx.power(base, sign * int(tok))
            except ParseError:
                raise
            except (ValueError, ZeroDivisionError, TypeError) as exc:
                self.error(str(exc), pos)
        return base

    def atom(self):
        kind, tok, pos = self.take()
        if kind == "int":
            return self.ctx.number(int(tok))
        if kind == "name":
            try:
                return self.ctx.name(tok)
            except ParseError:
                raise
            except (KeyError, ValueError) as exc:
                self.error(f"unknown name {tok!r} ({exc})", pos)
        if kind == "op" and tok == "(":
            items = [self.expr()]
            while self.peek()[:2] == ("op", ","):
                self.take()
                items.append(self.expr())
            self.expect(")")
            if len(items) == 1:
                return items[0]
            if not hasattr(self.ctx, "tuple"):
                self.error("tuple literal not supported here", pos)
            try:
                return self.ctx.tuple(items)
            except (ValueError, TypeError) as exc:
                self.error(str(exc), pos)
        self.error("unexpected token" if kind != "end" else "unexpected end", pos)


def parse_expression(text: str, ctx, where: str | None = None):
    """Parse ``text`` and evaluate it in ``ctx``."""
    if not isinstance(text, str):
        raise ParseError(f"expected a string, got {type(text).__name__}", where)
    return _Parser(text, ctx, where).parse()


def split_matrix_literal(text: str, where: str | None = None) -> list[list[str]]:
    """Split ``"[[a, b], [c, d]]"`` into entry strings, respecting parentheses."""
    s = text.strip()
    if not (s.startswith("[") and s.endswith("]")):
        raise ParseError("matrix literal must be enclosed in [...]", where)
    body = s[1:-1].strip()
    rows: list[list[str]] = []
    depth = 0
    i = 0
    while i < len(body):
        ch = body[i]
        if ch.isspace() or ch == ",":
            i += 1
            continue
        if ch != "[":
            raise ParseError(f"expected '[' at col {i + 2}", where)
        j = i + 1
        entries, cur = [], []
        depth = 0
        while j < len(body):
            c = body[j]
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
            if depth == 0 and c in ",]":
                piece = "".join(cur).strip()
                if piece:
                    entries.append(piece)
                elif c == "," or entries:
                    raise ParseError(f"empty entry at col {j + 2}", where)
                cur = []
                if c == "]":
                    break
            else:
                cur.append(c)
            j += 1
        else:
            raise ParseError("unterminated row", where)
        rows.append(entries)
        i = j + 1
    return rows
