"""Expression syntax for path polynomials and the JSON quiver format.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor ('*'? factor)*        # bare juxtaposition only in single-char mode
    factor := atom ('^' uint)?
    atom   := ident | number | '(' expr ')' | ('+' | '-') factor
    ident  := letter (letter | digit | '_')* '*'?
    number := int ('/' uint)? 'i'?

A trailing ``*`` belongs to an identifier only when the starred name is a
declared arrow and the next character cannot start an atom (or the unstarred
name is not an arrow). So on a doubled quiver ``x*y`` is ``x`` times ``y``
while ``x**y``, ``x* * y`` and ``x*^2`` involve ``x*``.
``e<vertex>`` is the trivial path at a vertex unless an arrow has that name.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path as FsPath
from typing import Union

from .calculus import Necklace
from .ncalg import (ONE, GaussRat, Path, PathPoly, Quiver, double_quiver,
                    poly_mul, quiver_create, trivial)


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class CompositionWarning(UserWarning):
    """A product of nonzero factors vanished because the paths do not compose."""


class SchemaError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


# AST

@dataclass(frozen=True)
class Num:
    value: GaussRat
    pos: int


@dataclass(frozen=True)
class Gen:
    name: str
    pos: int


@dataclass(frozen=True)
class Idem:
    vertex: str
    pos: int


@dataclass(frozen=True)
class Prod:
    factors: tuple
    pos: int


@dataclass(frozen=True)
class Sum:
    terms: tuple  # (sign, node)
    pos: int


@dataclass(frozen=True)
class Pow:
    base: object
    exp: int
    pos: int


ExprAST = Union[Num, Gen, Idem, Prod, Sum, Pow]


class _Parser:
    def __init__(self, src: str, q: Quiver, juxtapose: bool):
        self.src = src
        self.q = q
        self.i = 0
        self.juxtapose = juxtapose

    def error(self, msg, pos=None):
        raise ParseError(msg, self.i if pos is None else pos)

    def skip(self):
        while self.i < len(self.src) and self.src[self.i].isspace():
            self.i += 1

    def peek(self) -> str:
        self.skip()
        return self.src[self.i] if self.i < len(self.src) else ""

    def starts_atom(self, ch: str) -> bool:
        return ch.isalpha() or ch.isdigit() or ch == "(" or ch == "_"

    def parse(self):
        if not self.src.strip():
            self.error("empty expression", 0)
        node = self.expr()
        if self.peek():
            self.error(f"unexpected {self.peek()!r}")
        return node

    def expr(self):
        pos = self.i
        terms = [(1, self.term())]
        while self.peek() in ("+", "-"):
            sign = 1 if self.src[self.i] == "+" else -1
            self.i += 1
            terms.append((sign, self.term()))
        return terms[0][1] if len(terms) == 1 else Sum(tuple(terms), pos)

    def term(self):
        pos = self.i
        factors = [self.factor()]
        while True:
            ch = self.peek()
            if ch == "*":
                self.i += 1
                factors.append(self.factor())
            elif self.juxtapose and self.starts_atom(ch):
                factors.append(self.factor())
            else:
                break
        return factors[0] if len(factors) == 1 else Prod(tuple(factors), pos)

    def factor(self):
        pos = self.i
        base = self.atom()
        if self.peek() == "^":
            self.i += 1
            self.skip()
            start = self.i
            while self.i < len(self.src) and self.src[self.i].isdigit():
                self.i += 1
            if start == self.i:
                self.error("expected a non-negative integer exponent")
            return Pow(base, int(self.src[start:self.i]), pos)
        return base

    def atom(self):
        ch = self.peek()
        pos = self.i
        if not ch:
            self.error("unexpected end of input")
        if ch in "+-":
            self.i += 1
            inner = self.factor()
            return inner if ch == "+" else Prod((Num(GaussRat(-1), pos), inner), pos)
        if ch == "(":
            self.i += 1
            node = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.i += 1
            return node
        if ch.isdigit():
            return self.number()
        if ch.isalpha() or ch == "_":
            return self.ident()
        self.error(f"unexpected {ch!r}")

    def number(self):
        pos = self.i
        src = self.src
        start = self.i
        while self.i < len(src) and src[self.i].isdigit():
            self.i += 1
        value = Fraction(int(src[start:self.i]))
        if self.i < len(src) and src[self.i] == "/":
            self.i += 1
            dstart = self.i
            while self.i < len(src) and src[self.i].isdigit():
                self.i += 1
            if dstart == self.i:
                self.error("expected a denominator")
            den = int(src[dstart:self.i])
            if den == 0:
                self.error("zero denominator", dstart)
            value = value / den
        if (self.i < len(src) and src[self.i] == "i"
                and not (self.i + 1 < len(src) and (src[self.i + 1].isalnum() or src[self.i + 1] == "_"))):
            self.i += 1
            return Num(GaussRat(0, value), pos)
        return Num(GaussRat(value), pos)

    def ident(self):
        pos = self.i
        src = self.src
        arrows = self.q.arrow_index
        if self.juxtapose:
            name = src[self.i]
            self.i += 1
            if name == "e" and name not in arrows and name + "*" not in arrows:
                # longest run that names a vertex
                j = self.i
                while j < len(src) and (src[j].isalnum() or src[j] == "_"):
                    j += 1
                for end in range(j, self.i, -1):
                    if src[self.i:end] in self.q.vertex_index:
                        vertex = src[self.i:end]
                        self.i = end
                        return Idem(vertex, pos)
        else:
            while self.i < len(src) and (src[self.i].isalnum() or src[self.i] == "_"):
                self.i += 1
            name = src[pos:self.i]
        if self.i < len(src) and src[self.i] == "*" and name + "*" in arrows:
            nxt = src[self.i + 1] if self.i + 1 < len(src) else ""
            if name not in arrows or not self.starts_atom(nxt):
                self.i += 1
                return Gen(name + "*", pos)
        if name not in arrows and name.startswith("e") and name[1:] in self.q.vertex_index:
            return Idem(name[1:], pos)
        return Gen(name, pos)


def parse_expr(src: str, q: Quiver, juxtapose: bool | None = None) -> ExprAST:
    if juxtapose is None:
        juxtapose = q.single_char
    if juxtapose and any(len(a.name.rstrip("*")) != 1 for a in q.arrows):
        raise ValueError("juxtaposition needs single-character generator names")
    return _Parser(src, q, juxtapose).parse()


def lower(node: ExprAST, q: Quiver) -> PathPoly:
    """Turn an AST into a path polynomial, resolving names against ``q``."""
    if isinstance(node, Num):
        return PathPoly.scalar(q, node.value)
    if isinstance(node, Gen):
        if node.name not in q.arrow_index:
            raise ParseError(f"unknown generator {node.name!r}", node.pos)
        return PathPoly(q, {Path((q.arrow_index[node.name],)): ONE})
    if isinstance(node, Idem):
        return PathPoly(q, {trivial(q.vertex_index[node.vertex]): ONE})
    if isinstance(node, Sum):
        out = PathPoly(q)
        for sign, t in node.terms:
            out = out + lower(t, q) * sign
        return out
    if isinstance(node, Prod):
        out = None
        for fac in node.factors:
            val = lower(fac, q)
            if out is None:
                out = val
                continue
            prod = poly_mul(out, val)
            if out and val and not prod:
                warnings.warn("non-composable product lowered to 0", CompositionWarning, stacklevel=3)
            out = prod
        return out
    if isinstance(node, Pow):
        base = lower(node.base, q)
        out = PathPoly.one(q)
        for _ in range(node.exp):
            out = poly_mul(out, base)
        return out
    raise TypeError(f"unknown node {node!r}")


def parse_poly(src: str, q: Quiver, juxtapose: bool | None = None) -> PathPoly:
    return lower(parse_expr(src, q, juxtapose), q)


def _coeff_text(c: GaussRat) -> tuple[int, str]:
    """(sign, magnitude text); magnitude '' means unit."""
    if c.is_real():
        sign = -1 if c.re < 0 else 1
        mag = abs(c.re)
        return sign, "" if mag == 1 else str(GaussRat(mag))
    if not c.re:
        sign = -1 if c.im < 0 else 1
        return sign, f"{GaussRat(abs(c.im))}i"
    return 1, f"({c})"


def _word_text(q: Quiver, path: Path) -> str:
    if not path.arrows:
        return f"e{q.vertices[path.vertex]}"
    runs = []
    arrows = path.arrows
    k = 0
    while k < len(arrows):
        j = k
        while j < len(arrows) and arrows[j] == arrows[k]:
            j += 1
        runs.append((q.arrows[arrows[k]].name, j - k))
        k = j
    parts = []
    for name, count in runs:
        # starred names are bracketed inside products so "x*(x*)" never reads as "x*x*"
        if name.endswith("*") and (len(runs) > 1 or count > 1):
            name = f"({name})"
        parts.append(name if count == 1 else f"{name}^{count}")
    return "*".join(parts)


def format_poly(f: PathPoly | Necklace) -> str:
    """Canonical text; ``parse_poly(format_poly(f), q) == f``.

    Trivial paths are always written out, so the unit of a one-vertex
    algebra prints as ``e1``.
    """
    if isinstance(f, Necklace):
        f = f.as_poly()
    q = f.quiver
    if not f:
        return "0"
    out = []
    for path, c in f:
        sign, mag = _coeff_text(c)
        body = _word_text(q, path)
        text = f"{mag}*{body}" if mag else body
        if not out:
            out.append(("-" if sign < 0 else "") + text)
        else:
            out.append((" - " if sign < 0 else " + ") + text)
    return "".join(out)


# quiver files

_TOP_KEYS = {"vertices", "arrows", "double", "singleChar", "pairs"}


def quiver_from_dict(data) -> Quiver:
    if not isinstance(data, dict):
        raise SchemaError("$", "top level must be an object")
    for key in data:
        if key not in _TOP_KEYS:
            raise SchemaError(key, "unknown key")
    if "vertices" not in data:
        raise SchemaError("vertices", "missing")
    if "arrows" not in data:
        raise SchemaError("arrows", "missing")
    vertices = data["vertices"]
    if not isinstance(vertices, list) or not vertices:
        raise SchemaError("vertices", "must be a non-empty list of strings")
    for k, v in enumerate(vertices):
        if not isinstance(v, str):
            raise SchemaError(f"vertices[{k}]", "must be a string")
    arrows = data["arrows"]
    if not isinstance(arrows, list):
        raise SchemaError("arrows", "must be a list")
    triples = []
    for k, a in enumerate(arrows):
        if not isinstance(a, dict):
            raise SchemaError(f"arrows[{k}]", "must be an object")
        for key in ("name", "src", "dst"):
            if key not in a:
                raise SchemaError(f"arrows[{k}].{key}", "missing")
            if not isinstance(a[key], str):
                raise SchemaError(f"arrows[{k}].{key}", "must be a string")
        for key in a:
            if key not in ("name", "src", "dst"):
                raise SchemaError(f"arrows[{k}].{key}", "unknown key")
        triples.append((a["name"], a["src"], a["dst"]))
    double = data.get("double", False)
    if not isinstance(double, bool):
        raise SchemaError("double", "must be a boolean")
    single = data.get("singleChar", False)
    if not isinstance(single, bool):
        raise SchemaError("singleChar", "must be a boolean")
    pairs = data.get("pairs")
    if pairs is not None:
        if double:
            raise SchemaError("pairs", "cannot be combined with double=true")
        if not isinstance(pairs, list) or not all(
                isinstance(p, list) and len(p) == 2 and all(isinstance(s, str) for s in p) for p in pairs):
            raise SchemaError("pairs", "must be a list of [star, base] name pairs")
    try:
        q = quiver_create(vertices, triples, pairs=[tuple(p) for p in pairs or ()], single_char=single)
    except ValueError as exc:
        raise SchemaError("arrows" if pairs is None else "pairs", str(exc)) from None
    return double_quiver(q) if double else q


def load_quiver(path) -> Quiver:
    """Read a quiver description file.

    ``{"vertices": [...], "arrows": [{"name", "src", "dst"}, ...],
    "double": bool, "singleChar": bool, "pairs": [[star, base], ...]}``
    """
    text = FsPath(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    return quiver_from_dict(data)


def quiver_to_dict(q: Quiver) -> dict:
    """Inverse of :func:`quiver_from_dict` (pairs written out explicitly)."""
    out = {
        "vertices": list(q.vertices),
        "arrows": [{"name": a.name, "src": q.vertices[a.source], "dst": q.vertices[a.target]}
                   for a in q.arrows],
    }
    if q.pairs:
        out["pairs"] = [[q.arrows[s].name, q.arrows[b].name] for b, s in q.pairs]
    if q.single_char:
        out["singleChar"] = True
    return out
