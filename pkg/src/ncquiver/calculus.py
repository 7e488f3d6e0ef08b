"""Degree 0 and degree 1 calculus on path algebras, relative to the vertex idempotents.

Functions live in the space of necklaces (cycles up to rotation); 1-forms are
stored in the normal form ``sum_xi p_xi dxi`` with ``p_xi`` running opposite
to ``xi``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator

from .ncalg import (ONE, GaussRat, Path, PathPoly, Quiver, _check_same,
                    poly_commutator, poly_mul, trivial)


class NotExact(ValueError):
    """A 1-form has no primitive."""


def least_rotation(word: tuple[int, ...]) -> int:
    """Booth's algorithm: start index of the lexicographically least rotation."""
    s = word + word
    n = len(s)
    f = [-1] * n
    k = 0
    for j in range(1, n):
        sj = s[j]
        i = f[j - k - 1]
        while i != -1 and sj != s[k + i + 1]:
            if sj < s[k + i + 1]:
                k = j - i - 1
            i = f[i]
        if sj != s[k + i + 1]:
            if sj < s[k]:
                k = j
            f[j - k] = -1
        else:
            f[j - k] = i + 1
    return k


def canonical_cycle(path: Path) -> Path:
    if not path.arrows:
        return path
    k = least_rotation(path.arrows)
    return Path(path.arrows[k:] + path.arrows[:k])


class Necklace:
    """Linear combination of necklace words; keys are canonical rotations."""

    __slots__ = ("quiver", "terms")

    def __init__(self, quiver: Quiver, terms: dict[Path, GaussRat] | None = None):
        self.quiver = quiver
        self.terms = {p: c for p, c in (terms or {}).items() if c}

    @classmethod
    def zero(cls, q: Quiver) -> Necklace:
        return cls(q)

    def __iter__(self) -> Iterator[tuple[Path, GaussRat]]:
        return iter(sorted(self.terms.items(), key=lambda kv: kv[0].sort_key()))

    def __len__(self):
        return len(self.terms)

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, Necklace):
            return self.quiver == other.quiver and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: Necklace) -> Necklace:
        _check_same(self.quiver, other.quiver)
        terms = dict(self.terms)
        for p, c in other.terms.items():
            terms[p] = terms[p] + c if p in terms else c
        return Necklace(self.quiver, terms)

    def __neg__(self):
        return self * -1

    def __sub__(self, other: Necklace) -> Necklace:
        return self + (-other)

    def __mul__(self, c) -> Necklace:
        c = GaussRat.coerce(c)
        return Necklace(self.quiver, {p: c * a for p, a in self.terms.items()})

    __rmul__ = __mul__

    def as_poly(self) -> PathPoly:
        """The canonical representatives as a path polynomial."""
        return PathPoly(self.quiver, self.terms)

    def modulo_constants(self) -> Necklace:
        return Necklace(self.quiver, {p: c for p, c in self.terms.items() if p.arrows})

    def homogeneous(self, length: int) -> Necklace:
        return Necklace(self.quiver, {p: c for p, c in self.terms.items() if p.length == length})

    def degree(self) -> int:
        return max((p.length for p in self.terms), default=-1)

    def __repr__(self):
        if not self.terms:
            return "Necklace(0)"
        return "Necklace(" + " + ".join(f"{c}*[{self.quiver.word(p)}]" for p, c in self) + ")"


def necklace_class(f: PathPoly) -> Necklace:
    """Project onto A/[A,A]: rotate cycles to canonical form, drop non-cycles."""
    q = f.quiver
    terms: dict[Path, GaussRat] = {}
    for p, c in f.terms.items():
        if q.source(p) != q.target(p):
            continue
        key = canonical_cycle(p)
        terms[key] = terms[key] + c if key in terms else c
    return Necklace(q, terms)


def _rotations_after(word: tuple[int, ...], xi: int) -> Iterator[tuple[int, ...]]:
    for k, a in enumerate(word):
        if a == xi:
            yield word[k + 1:] + word[:k]


def _derivative_terms(q: Quiver, terms: Iterable[tuple[Path, GaussRat]], xi: int) -> PathPoly:
    out: dict[Path, GaussRat] = {}
    empty = trivial(q.arrows[xi].target)
    for p, c in terms:
        for rest in _rotations_after(p.arrows, xi):
            key = Path(rest) if rest else empty
            out[key] = out[key] + c if key in out else c
    return PathPoly(q, out)


def necklace_derivative(f: Necklace, xi: int | str) -> PathPoly:
    """Sum over occurrences of ``xi`` of the word read from just after it.

    Every term runs from t(xi) to s(xi).
    """
    q = f.quiver
    if isinstance(xi, str):
        xi = q.arrow(xi)
    elif not 0 <= xi < len(q.arrows):
        raise KeyError(f"unknown arrow index {xi}")
    return _derivative_terms(q, f.terms.items(), xi)


class OneForm:
    """Normal form ``sum_xi coeffs[xi] dxi``."""

    __slots__ = ("quiver", "coeffs")

    def __init__(self, quiver: Quiver, coeffs: dict[int, PathPoly] | None = None):
        self.quiver = quiver
        self.coeffs = {}
        for xi, p in (coeffs or {}).items():
            if isinstance(xi, str):
                xi = quiver.arrow(xi)
            _check_same(quiver, p.quiver)
            arrow = quiver.arrows[xi]
            for path in p.terms:
                if quiver.source(path) != arrow.target or quiver.target(path) != arrow.source:
                    raise ValueError(
                        f"coefficient of d{arrow.name} has a term not running opposite to it")
            if p:
                self.coeffs[xi] = p

    def __getitem__(self, xi: int | str) -> PathPoly:
        if isinstance(xi, str):
            xi = self.quiver.arrow(xi)
        return self.coeffs.get(xi, PathPoly(self.quiver))

    def __eq__(self, other):
        if isinstance(other, OneForm):
            return self.quiver == other.quiver and self.coeffs == other.coeffs
        if other == 0:
            return not self.coeffs
        return NotImplemented

    def __bool__(self):
        return bool(self.coeffs)

    def __add__(self, other: OneForm) -> OneForm:
        _check_same(self.quiver, other.quiver)
        out = dict(self.coeffs)
        for xi, p in other.coeffs.items():
            out[xi] = out[xi] + p if xi in out else p
        return OneForm(self.quiver, out)

    def __mul__(self, c) -> OneForm:
        return OneForm(self.quiver, {xi: p * c for xi, p in self.coeffs.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __repr__(self):
        q = self.quiver
        parts = [f"({p}) d{q.arrows[xi].name}" for xi, p in sorted(self.coeffs.items())]
        return "OneForm(" + " + ".join(parts or ["0"]) + ")"


def differential(f: Necklace) -> OneForm:
    q = f.quiver
    nontrivial = [(p, c) for p, c in f.terms.items() if p.arrows]
    return OneForm(q, {xi: _derivative_terms(q, nontrivial, xi) for xi in range(len(q.arrows))})


def normalize_one_form(raw: Iterable[tuple[PathPoly, PathPoly]]) -> OneForm:
    """Normal form of ``sum a db`` by Leibniz expansion and cyclic moves.

    ``a * u dxi v`` becomes ``(v a u) dxi``; products that do not compose vanish.
    """
    out: dict[int, dict[Path, GaussRat]] = {}
    quiver = None
    for a, b in raw:
        _check_same(a.quiver, b.quiver)
        q = quiver = a.quiver if quiver is None else quiver
        for pb, cb in b.terms.items():
            word = pb.arrows
            for k, xi in enumerate(word):
                arrow = q.arrows[xi]
                left = PathPoly(q, {Path(word[:k]) if k else trivial(arrow.target): ONE})
                right = PathPoly(q, {Path(word[k + 1:]) if k + 1 < len(word)
                                     else trivial(arrow.source): ONE})
                coeff = poly_mul(poly_mul(right, a), left)
                bucket = out.setdefault(xi, {})
                for p, c in coeff.terms.items():
                    c = c * cb
                    bucket[p] = bucket[p] + c if p in bucket else c
    if quiver is None:
        raise ValueError("empty input; use OneForm(quiver) for the zero form")
    return OneForm(quiver, {xi: PathPoly(quiver, t) for xi, t in out.items()})


def b_map(alpha: OneForm) -> PathPoly:
    """``u dv -> [u, v]`` on the normal form."""
    q = alpha.quiver
    out = PathPoly(q)
    for xi, p in alpha.coeffs.items():
        out = out + poly_commutator(p, PathPoly(q, {Path((xi,)): ONE}))
    return out


def euler_primitive(alpha: OneForm) -> Necklace:
    """``sum_l (1/l) [sum_xi p_xi^(l-1) xi]`` without any exactness check."""
    q = alpha.quiver
    buckets: dict[Path, GaussRat] = {}
    for xi, p in alpha.coeffs.items():
        for path, c in p.terms.items():
            word = path.arrows + (xi,)
            if q.arrows[word[-1]].source != q.target(path):
                continue
            key = Path(word)
            c = c * Fraction(1, len(word))
            buckets[key] = buckets[key] + c if key in buckets else c
    return necklace_class(PathPoly(q, buckets))


def integrate_one_form(alpha: OneForm, precheck: bool = True) -> Necklace:
    """A necklace ``f`` with ``differential(f) == alpha``, defined modulo constants.

    Raises :class:`NotExact` when re-differentiation does not give back
    ``alpha``. On one-vertex quivers ``b_map(alpha) != 0`` is used first as a
    cheap rejection (disable with ``precheck=False``).
    """
    q = alpha.quiver
    if precheck and len(q.vertices) == 1 and b_map(alpha):
        raise NotExact("b(alpha) != 0")
    f = euler_primitive(alpha)
    if differential(f) != alpha:
        raise NotExact("re-differentiating the Euler primitive does not recover the form")
    return f


def euler_sum(f: Necklace) -> Necklace:
    """``[sum_xi (df/dxi) xi]``; equals ``l * f`` on homogeneous degree ``l``."""
    q = f.quiver
    total = PathPoly(q)
    for xi, p in differential(f).coeffs.items():
        total = total + poly_mul(p, PathPoly(q, {Path((xi,)): ONE}))
    return necklace_class(total)
