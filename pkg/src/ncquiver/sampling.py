"""Random quivers, paths, polynomials and necklaces for property checks."""

from __future__ import annotations

import random
from fractions import Fraction

from .calculus import Necklace, OneForm, necklace_class
from .ncalg import GaussRat, Path, PathPoly, Quiver, quiver_create, trivial


def random_coeff(rng: random.Random, complex_prob: float = 0.3) -> GaussRat:
    def frac():
        num = 0
        while num == 0:
            num = rng.randint(-6, 6)
        return Fraction(num, rng.randint(1, 4))

    if rng.random() < complex_prob:
        return GaussRat(frac() if rng.random() < 0.5 else 0, frac())
    return GaussRat(frac())


def random_quiver(rng: random.Random, max_vertices: int = 3, max_arrows: int = 5) -> Quiver:
    """Random quiver with at least one cycle."""
    while True:
        nv = rng.randint(1, max_vertices)
        na = rng.randint(1, max_arrows)
        vertices = [str(i + 1) for i in range(nv)]
        arrows = [(f"a{k}", rng.choice(vertices), rng.choice(vertices)) for k in range(na)]
        q = quiver_create(vertices, arrows)
        if random_cycle(q, rng, rng.randint(1, 4)) is not None or any(
                a.source == a.target for a in q.arrows):
            return q


def _incoming(q: Quiver) -> dict[int, list[int]]:
    into: dict[int, list[int]] = {v: [] for v in range(len(q.vertices))}
    for i, a in enumerate(q.arrows):
        into[a.target].append(i)
    return into


def random_path(q: Quiver, rng: random.Random, length: int, start: int | None = None) -> Path | None:
    """Random path of the given length whose last arrow leaves ``start``.

    Built right to left so the result is composable; None on a dead end.
    """
    if start is None:
        start = rng.randrange(len(q.vertices))
    if length == 0:
        return trivial(start)
    outgoing = {v: [i for i, a in enumerate(q.arrows) if a.source == v] for v in range(len(q.vertices))}
    word = []
    v = start
    for _ in range(length):
        choices = outgoing[v]
        if not choices:
            return None
        xi = rng.choice(choices)
        word.append(xi)
        v = q.arrows[xi].target
    return Path(tuple(reversed(word)))


def random_cycle(q: Quiver, rng: random.Random, length: int, tries: int = 50) -> Path | None:
    for _ in range(tries):
        p = random_path(q, rng, length)
        if p is not None and q.source(p) == q.target(p):
            return p
    return None


def random_poly(q: Quiver, rng: random.Random, max_terms: int = 4, max_len: int = 4) -> PathPoly:
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        p = random_path(q, rng, rng.randint(0, max_len))
        if p is not None:
            terms[p] = random_coeff(rng)
    return PathPoly(q, terms)


def random_necklace(q: Quiver, rng: random.Random, max_terms: int = 4, max_len: int = 6,
                    min_len: int = 1, homogeneous: int | None = None) -> Necklace:
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        length = homogeneous if homogeneous is not None else rng.randint(min_len, max_len)
        p = random_cycle(q, rng, length)
        if p is not None:
            terms[p] = random_coeff(rng)
    return necklace_class(PathPoly(q, terms))


def random_one_form(q: Quiver, rng: random.Random, max_terms: int = 3, max_len: int = 3) -> OneForm:
    coeffs = {}
    for xi, a in enumerate(q.arrows):
        terms = {}
        for _ in range(rng.randint(0, max_terms)):
            p = random_path(q, rng, rng.randint(0, max_len), start=a.target)
            if p is not None and q.target(p) == a.source:
                terms[p] = random_coeff(rng)
        coeffs[xi] = PathPoly(q, terms)
    return OneForm(q, coeffs)
