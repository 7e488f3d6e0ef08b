"""Randomised identity suites over a given quiver, for ``ncquiver check``."""

from __future__ import annotations

import random

from .calculus import (NotExact, _derivative_terms, b_map, differential,
                       euler_sum, integrate_one_form)
from .ncalg import Path, Quiver
from .sampling import random_necklace
from .symplectic import (canonical_two_form, derivation_commutator,
                         hamiltonian_derivation, is_symplectic,
                         poisson_bracket, poisson_bracket_pairs)


def _rotation_independent(f) -> bool:
    q = f.quiver
    for path, c in f.terms.items():
        w = path.arrows
        for xi in set(w):
            ref = _derivative_terms(q, [(path, c)], xi)
            for k in range(1, len(w)):
                if _derivative_terms(q, [(Path(w[k:] + w[:k]), c)], xi) != ref:
                    return False
    return True


def _endpoints_ok(f) -> bool:
    q = f.quiver
    d = differential(f)
    for xi, p in d.coeffs.items():
        a = q.arrows[xi]
        if any(q.source(path) != a.target or q.target(path) != a.source for path in p.terms):
            return False
    return True


def calculus_suite(q: Quiver, rng: random.Random, count: int):
    fs = [random_necklace(q, rng, max_len=6) for _ in range(count)]
    yield "necklace derivative rotation independence", all(map(_rotation_independent, fs))
    yield "necklace derivative endpoint typing", all(map(_endpoints_ok, fs))
    yield "b(df) = 0", all(not b_map(differential(f)) for f in fs)
    euler = True
    for _ in range(count):
        ell = rng.randint(1, 5)
        f = random_necklace(q, rng, homogeneous=ell)
        euler &= euler_sum(f) == f * ell
    yield "Euler identity", euler
    roundtrip = True
    for f in fs:
        try:
            roundtrip &= integrate_one_form(differential(f)) == f.modulo_constants()
        except NotExact:
            roundtrip = False
    yield "integrate(df) = f mod constants", roundtrip


def symplectic_suite(q: Quiver, rng: random.Random, count: int):
    omega = canonical_two_form(q)
    skew = routes = jacobi = morph = sympl = True
    for _ in range(count):
        f, g, h = (random_necklace(q, rng, max_terms=2, max_len=4) for _ in range(3))
        fg = poisson_bracket(f, g, omega)
        skew &= fg == -poisson_bracket(g, f, omega)
        routes &= fg == poisson_bracket_pairs(f, g, omega)
        jac = (poisson_bracket(f, poisson_bracket(g, h, omega), omega)
               + poisson_bracket(g, poisson_bracket(h, f, omega), omega)
               + poisson_bracket(h, fg, omega))
        jacobi &= not jac
        tf, tg = hamiltonian_derivation(f, omega), hamiltonian_derivation(g, omega)
        morph &= hamiltonian_derivation(fg, omega) == derivation_commutator(tf, tg)
        sympl &= bool(is_symplectic(tf, omega))
    yield "bracket skew-symmetry", skew
    yield "bracket contraction = pair sum", routes
    yield "Jacobi identity", jacobi
    yield "theta_{f,g} = [theta_f, theta_g]", morph
    yield "Hamiltonian derivations are symplectic", sympl


def run_all(q: Quiver, seed: int = 0, count: int = 20) -> list[tuple[str, bool, str]]:
    rng = random.Random(seed)
    out = [(name, ok, f"({count} samples)") for name, ok in calculus_suite(q, rng, count)]
    if q.is_double:
        out += [(name, ok, f"({count} samples)") for name, ok in symplectic_suite(q, rng, count)]
    return out
