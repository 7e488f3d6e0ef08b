"""Quivers, paths and exact path-algebra arithmetic over the Gaussian rationals.

A free algebra on n generators is the quiver with one vertex and n loops; no
separate type exists for it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Iterator, NamedTuple

STAR = "*"


class GaussRat:
    """Exact element re + im*i of Q(i)."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussRat is immutable")

    @classmethod
    def coerce(cls, value) -> GaussRat:
        if isinstance(value, GaussRat):
            return value
        if isinstance(value, (int, Rational)):
            return cls(value)
        if isinstance(value, complex):
            raise TypeError("floating complex values are not exact; build a GaussRat")
        if isinstance(value, str):
            return cls.parse(value)
        raise TypeError(f"cannot convert {type(value).__name__} to GaussRat")

    # arithmetic

    def __add__(self, other):
        try:
            other = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRat(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussRat(-self.re, -self.im)

    def __sub__(self, other):
        try:
            other = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        return GaussRat(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            other = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        if not self.im and not other.im:
            return GaussRat(self.re * other.re)
        return GaussRat(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conjugate(self) -> GaussRat:
        return GaussRat(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __truediv__(self, other):
        try:
            other = GaussRat.coerce(other)
        except TypeError:
            return NotImplemented
        n = other.norm2()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        num = self * other.conjugate()
        return GaussRat(num.re / n, num.im / n)

    def __rtruediv__(self, other):
        return GaussRat.coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return GaussRat(1) / (self ** (-k))
        out = GaussRat(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussRat):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return not self.im and self.re == other
        if isinstance(other, complex):
            return self.re == other.real and self.im == other.imag
        return NotImplemented

    def __hash__(self):
        if not self.im:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self) -> bool:
        return self.im == 0

    # text

    def __str__(self):
        re_s, im_s = _fmt_frac(self.re), _fmt_frac(self.im)
        if not self.im:
            return re_s
        if not self.re:
            return f"{im_s}i"
        sign = "-" if self.im < 0 else "+"
        return f"{re_s}{sign}{_fmt_frac(abs(self.im))}i"

    def __repr__(self):
        return f"GaussRat({self})"

    _PARSE = re.compile(
        r"^\s*(?:(?P<re>[+-]?\d+(?:/\d+)?)(?P<im>[+-]\d+(?:/\d+)?)i"
        r"|(?P<pure>[+-]?\d+(?:/\d+)?)(?P<unit>i?))\s*$"
    )

    @classmethod
    def parse(cls, text: str) -> GaussRat:
        """Inverse of ``str``: accepts ``3``, ``-1/2``, ``3/4i``, ``1/2-3/4i``."""
        m = cls._PARSE.match(text)
        if not m:
            raise ValueError(f"not a Gaussian rational: {text!r}")
        if m.group("re") is not None:
            return cls(Fraction(m.group("re")), Fraction(m.group("im")))
        value = Fraction(m.group("pure"))
        return cls(0, value) if m.group("unit") else cls(value)


def _fmt_frac(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


ZERO = GaussRat(0)
ONE = GaussRat(1)
I = GaussRat(0, 1)


class Arrow(NamedTuple):
    name: str
    source: int
    target: int


@dataclass(frozen=True)
class Quiver:
    """Directed multigraph. Arrow endpoints are vertex indices.

    ``pairs`` holds ``(base, star)`` arrow-index pairs when the quiver carries
    a symplectic pairing (always the case after :func:`double_quiver`).
    ``single_char`` is an input-syntax hint for the expression parser.
    """

    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]
    pairs: tuple[tuple[int, int], ...] = ()
    single_char: bool = field(default=False, compare=False)

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def arrow_index(self) -> dict[str, int]:
        return {a.name: i for i, a in enumerate(self.arrows)}

    @cached_property
    def partner(self) -> dict[int, int]:
        out = {}
        for base, star in self.pairs:
            out[base] = star
            out[star] = base
        return out

    @cached_property
    def _src(self) -> tuple[int, ...]:
        return tuple(a.source for a in self.arrows)

    @cached_property
    def _tgt(self) -> tuple[int, ...]:
        return tuple(a.target for a in self.arrows)

    @property
    def is_double(self) -> bool:
        return bool(self.pairs) and len(self.partner) == len(self.arrows)

    @property
    def originals(self) -> list[int]:
        return [base for base, _ in self.pairs]

    def arrow(self, name: str) -> int:
        try:
            return self.arrow_index[name]
        except KeyError:
            raise KeyError(f"unknown arrow {name!r}") from None

    def vertex(self, name: str) -> int:
        try:
            return self.vertex_index[name]
        except KeyError:
            raise KeyError(f"unknown vertex {name!r}") from None

    def source(self, path: Path) -> int:
        return path.vertex if not path.arrows else self._src[path.arrows[-1]]

    def target(self, path: Path) -> int:
        return path.vertex if not path.arrows else self._tgt[path.arrows[0]]

    def is_cycle(self, path: Path) -> bool:
        return self.source(path) == self.target(path)

    def word(self, path: Path) -> str:
        if not path.arrows:
            return f"e{self.vertices[path.vertex]}"
        return " ".join(self.arrows[a].name for a in path.arrows)


def quiver_create(vertices: Iterable[str], arrows: Iterable[tuple[str, str, str]],
                  pairs: Iterable[tuple[str, str]] | None = None,
                  single_char: bool = False) -> Quiver:
    """Validate and build a quiver.

    ``arrows`` are ``(name, source, target)`` triples naming declared vertices.
    ``pairs`` optionally declares ``(star, base)`` partners for quivers that
    are doubles written out by hand (e.g. the plane with ``y`` dual to ``x``).
    """
    vertices = tuple(str(v) for v in vertices)
    if len(set(vertices)) != len(vertices):
        raise ValueError("duplicate vertex name")
    vidx = {v: i for i, v in enumerate(vertices)}
    built = []
    seen = set()
    for name, src, dst in arrows:
        if name in seen:
            raise ValueError(f"duplicate arrow name {name!r}")
        seen.add(name)
        for end in (src, dst):
            if str(end) not in vidx:
                raise ValueError(f"arrow {name!r} references undeclared vertex {end!r}")
        built.append(Arrow(name, vidx[str(src)], vidx[str(dst)]))
    aidx = {a.name: i for i, a in enumerate(built)}
    pair_idx = []
    used = set()
    for star, base in pairs or ():
        if star not in aidx or base not in aidx:
            raise ValueError(f"pair ({star!r}, {base!r}) names an unknown arrow")
        s, b = aidx[star], aidx[base]
        if s in used or b in used or s == b:
            raise ValueError(f"arrow reused in pairs: ({star!r}, {base!r})")
        if built[s].source != built[b].target or built[s].target != built[b].source:
            raise ValueError(f"{star!r} does not run opposite to {base!r}")
        used.update((s, b))
        pair_idx.append((b, s))
    return Quiver(vertices, tuple(built), tuple(pair_idx), single_char)


def double_quiver(q: Quiver) -> Quiver:
    """Append ``xi*: j -> i`` for every arrow ``xi: i -> j``."""
    if q.pairs:
        raise ValueError("quiver already carries a pairing")
    names = {a.name for a in q.arrows}
    for a in q.arrows:
        if a.name.endswith(STAR) or a.name + STAR in names:
            raise ValueError(f"arrow name {a.name!r} collides with the star marker")
    m = len(q.arrows)
    starred = tuple(Arrow(a.name + STAR, a.target, a.source) for a in q.arrows)
    return Quiver(q.vertices, q.arrows + starred,
                  tuple((i, m + i) for i in range(m)), q.single_char)


def one_vertex_quiver(*loops: str, vertex: str = "1") -> Quiver:
    return quiver_create([vertex], [(x, vertex, vertex) for x in loops])


def free_plane() -> Quiver:
    """Loops ``x`` and ``y`` at one vertex, with ``y`` paired as ``x*``."""
    return quiver_create(["1"], [("x", "1", "1"), ("y", "1", "1")],
                         pairs=[("y", "x")], single_char=True)


class Path(NamedTuple):
    """A path, written left to right as composition: ``arrows[0]`` acts last.

    Trivial paths have ``arrows == ()`` and carry their vertex; for nontrivial
    paths ``vertex`` is -1 and the endpoints are read from the quiver.
    """

    arrows: tuple[int, ...]
    vertex: int = -1

    @property
    def length(self) -> int:
        return len(self.arrows)

    def sort_key(self):
        return (len(self.arrows), self.arrows, self.vertex)


def trivial(v: int) -> Path:
    return Path((), v)


def make_path(q: Quiver, arrows: Iterable[int]) -> Path:
    arrows = tuple(arrows)
    if not arrows:
        raise ValueError("use trivial() for length-0 paths")
    for left, right in zip(arrows, arrows[1:]):
        if q.arrows[left].source != q.arrows[right].target:
            raise ValueError("arrows are not composable")
    return Path(arrows)


def _concat(q: Quiver, p1: Path, p2: Path) -> Path | None:
    if q.source(p1) != q.target(p2):
        return None
    if not p1.arrows:
        return p2
    if not p2.arrows:
        return p1
    return Path(p1.arrows + p2.arrows)


class PathPoly:
    """Finite Q(i)-combination of paths in one quiver. Treated as immutable."""

    __slots__ = ("quiver", "terms")

    def __init__(self, quiver: Quiver, terms: dict[Path, GaussRat] | None = None):
        self.quiver = quiver
        self.terms = {p: c for p, c in (terms or {}).items() if c}

    @classmethod
    def zero(cls, q: Quiver) -> PathPoly:
        return cls(q)

    @classmethod
    def one(cls, q: Quiver) -> PathPoly:
        return cls(q, {trivial(i): ONE for i in range(len(q.vertices))})

    @classmethod
    def idempotent(cls, q: Quiver, vertex: str | int) -> PathPoly:
        v = vertex if isinstance(vertex, int) else q.vertex(vertex)
        return cls(q, {trivial(v): ONE})

    @classmethod
    def gen(cls, q: Quiver, name: str) -> PathPoly:
        return cls(q, {Path((q.arrow(name),)): ONE})

    @classmethod
    def word(cls, q: Quiver, *names: str, coeff=1) -> PathPoly:
        return cls(q, {make_path(q, (q.arrow(n) for n in names)): GaussRat.coerce(coeff)})

    @classmethod
    def scalar(cls, q: Quiver, c) -> PathPoly:
        return poly_scale(cls.one(q), c)

    def __iter__(self) -> Iterator[tuple[Path, GaussRat]]:
        return iter(sorted(self.terms.items(), key=lambda kv: kv[0].sort_key()))

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, PathPoly):
            return self.quiver == other.quiver and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        return poly_add(self, other)

    def __sub__(self, other):
        return poly_add(self, poly_scale(other, -1))

    def __neg__(self):
        return poly_scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, PathPoly):
            return poly_mul(self, other)
        return poly_scale(self, other)

    def __rmul__(self, other):
        return poly_scale(self, other)

    def __pow__(self, k: int):
        out = PathPoly.one(self.quiver)
        for _ in range(k):
            out = out * self
        return out

    def degree(self) -> int:
        return max((p.length for p in self.terms), default=-1)

    def homogeneous(self, length: int) -> PathPoly:
        return PathPoly(self.quiver, {p: c for p, c in self.terms.items() if p.length == length})

    def component(self, target: int, source: int) -> PathPoly:
        """The part lying in e_target * A * e_source."""
        q = self.quiver
        return PathPoly(q, {p: c for p, c in self.terms.items()
                            if q.target(p) == target and q.source(p) == source})

    def __repr__(self):
        if not self.terms:
            return "PathPoly(0)"
        parts = [f"{c}*{self.quiver.word(p)}" for p, c in self]
        return "PathPoly(" + " + ".join(parts) + ")"


def _check_same(a: Quiver, b: Quiver):
    if a is not b and a != b:
        raise ValueError("operands belong to different quivers")


def path_mul(q: Quiver, p1: Path, p2: Path) -> PathPoly:
    """Concatenation p1*p2, or zero when s(p1) != t(p2)."""
    out = _concat(q, p1, p2)
    return PathPoly(q, {} if out is None else {out: ONE})


def poly_add(f: PathPoly, g: PathPoly) -> PathPoly:
    _check_same(f.quiver, g.quiver)
    terms = dict(f.terms)
    for p, c in g.terms.items():
        terms[p] = terms[p] + c if p in terms else c
    return PathPoly(f.quiver, terms)


def poly_scale(f: PathPoly, c) -> PathPoly:
    c = GaussRat.coerce(c)
    if not c:
        return PathPoly(f.quiver)
    return PathPoly(f.quiver, {p: c * a for p, a in f.terms.items()})


def poly_mul(f: PathPoly, g: PathPoly) -> PathPoly:
    _check_same(f.quiver, g.quiver)
    q = f.quiver
    src, tgt = q._src, q._tgt
    terms: dict[Path, GaussRat] = {}
    gitems = [(p, c, p.vertex if not p.arrows else tgt[p.arrows[0]]) for p, c in g.terms.items()]
    for p1, c1 in f.terms.items():
        s1 = p1.vertex if not p1.arrows else src[p1.arrows[-1]]
        for p2, c2, t2 in gitems:
            if s1 != t2:
                continue
            if not p1.arrows:
                p = p2
            elif not p2.arrows:
                p = p1
            else:
                p = Path(p1.arrows + p2.arrows)
            c = c1 * c2
            terms[p] = terms[p] + c if p in terms else c
    return PathPoly(q, terms)


def poly_commutator(f: PathPoly, g: PathPoly) -> PathPoly:
    return poly_mul(f, g) - poly_mul(g, f)
