import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from ncquiver.calculus import Necklace, differential, necklace_class
from ncquiver.ncalg import GaussRat, PathPoly, free_plane
from ncquiver.sampling import random_necklace
from ncquiver.symplectic import (Derivation, apply_derivation, canonical_two_form,
                                 contract, derivation_commutator,
                                 hamiltonian_derivation, is_symplectic,
                                 poisson_bracket, poisson_bracket_pairs)
from ncquiver.textio import parse_poly
from strategies import rngs


def nk(q, text):
    return necklace_class(parse_poly(text, q))


def gen(q, name):
    return PathPoly.gen(q, name)


# canonical form

def test_plane_form(plane_omega, plane):
    assert plane_omega.pairs == ((plane.arrow("y"), plane.arrow("x")),)


def test_gh_form_pairs(q2bar):
    omega = canonical_two_form(q2bar)
    names = {(q2bar.arrows[s].name, q2bar.arrows[b].name) for s, b in omega.pairs}
    assert names == {("a*", "a"), ("x*", "x"), ("y2*", "y2")}


def test_undoubled_rejected(q2):
    with pytest.raises(ValueError):
        canonical_two_form(q2)


# Hamiltonian derivations

def test_free_particle_field(plane, plane_omega):
    theta = hamiltonian_derivation(nk(plane, "1/2*y^2"), plane_omega)
    assert theta["x"] == gen(plane, "y")
    assert theta["y"] == 0


def test_quartic_field(plane, plane_omega):
    theta = hamiltonian_derivation(nk(plane, "1/2*x*y*x*y"), plane_omega)
    assert theta["x"] == parse_poly("x*y*x", plane)
    assert theta["y"] == parse_poly("-y*x*y", plane)


def test_harmonic_field(plane, plane_omega):
    theta = hamiltonian_derivation(nk(plane, "1/2*y^2 + 2*x^2"), plane_omega)
    assert theta["x"] == gen(plane, "y")
    assert theta["y"] == gen(plane, "x") * -4


def test_derivation_must_be_parallel(q2):
    with pytest.raises(ValueError):
        Derivation(q2, {"x": gen(q2, "a")})


def test_apply_derivation_leibniz(plane):
    theta = Derivation(plane, {"x": gen(plane, "y")})
    assert apply_derivation(theta, parse_poly("x*x", plane)) == parse_poly("y*x + x*y", plane)
    assert apply_derivation(theta, PathPoly.one(plane)) == 0


def test_derivation_on_necklace(plane):
    theta = Derivation(plane, {"x": gen(plane, "y")})
    assert theta(nk(plane, "x^2")) == nk(plane, "2*x*y")


def test_contract(plane):
    theta = Derivation(plane, {"x": gen(plane, "y")})
    assert contract(theta, differential(nk(plane, "1/2*x^2"))) == nk(plane, "x*y")


# brackets

def test_bracket_example(plane, plane_omega):
    assert poisson_bracket(nk(plane, "1/2*y^2"), nk(plane, "1/2*x^2"), plane_omega) == nk(plane, "x*y")


def test_bracket_with_coordinate(plane, plane_omega):
    assert poisson_bracket(nk(plane, "1/2*y^2"), nk(plane, "x"), plane_omega) == nk(plane, "y")


def test_bracket_constant(plane, plane_omega):
    c = Necklace(plane, {}) + nk(plane, "e1") * 5
    f = nk(plane, "x*y*y")
    assert poisson_bracket(c, f, plane_omega) == 0
    assert poisson_bracket(f, c, plane_omega) == 0


def test_bracket_self(plane, plane_omega):
    f = nk(plane, "x*y*x*y + 3*x^3")
    assert poisson_bracket(f, f, plane_omega) == 0


def _triples(q, seed, count):
    rng = random.Random(seed)
    return [tuple(random_necklace(q, rng, max_terms=2, max_len=4) for _ in range(3))
            for _ in range(count)]


@pytest.mark.parametrize("which", ["plane", "q2bar"])
def test_bracket_axioms(which, plane, q2bar):
    q = plane if which == "plane" else q2bar
    omega = canonical_two_form(q)
    for f, g, h in _triples(q, 3, 25):
        fg = poisson_bracket(f, g, omega)
        assert fg == -poisson_bracket(g, f, omega)
        assert fg == poisson_bracket_pairs(f, g, omega)
        jac = (poisson_bracket(f, poisson_bracket(g, h, omega), omega)
               + poisson_bracket(g, poisson_bracket(h, f, omega), omega)
               + poisson_bracket(h, fg, omega))
        assert jac == 0
        tf, tg = hamiltonian_derivation(f, omega), hamiltonian_derivation(g, omega)
        assert hamiltonian_derivation(fg, omega) == derivation_commutator(tf, tg)


@settings(max_examples=40, deadline=None)
@given(rngs)
def test_bracket_leibniz_by_hamiltonian_field(rng):
    # {f, g} = theta_f(g) on necklaces
    q = free_plane()
    omega = canonical_two_form(q)
    f, g = (random_necklace(q, rng, max_terms=2, max_len=4) for _ in range(2))
    assert poisson_bracket(f, g, omega) == hamiltonian_derivation(f, omega)(g)


# symplectic derivations

def test_shear_is_symplectic(plane, plane_omega):
    check = is_symplectic(Derivation(plane, {"x": gen(plane, "y")}), plane_omega)
    assert check and check.conclusive and check.method == "commutator"


def test_scaling_is_not_symplectic(plane, plane_omega):
    check = is_symplectic(Derivation(plane, {"x": gen(plane, "x")}), plane_omega)
    assert not check and check.conclusive


def test_hamiltonian_fields_symplectic(plane, plane_omega, q2bar, q2bar_omega):
    rng = random.Random(5)
    for _ in range(10):
        h = random_necklace(plane, rng, max_len=5)
        assert is_symplectic(hamiltonian_derivation(h, plane_omega), plane_omega)
        h = random_necklace(q2bar, rng, max_len=5)
        check = is_symplectic(hamiltonian_derivation(h, q2bar_omega), q2bar_omega)
        assert check and check.method == "exactness" and check.conclusive


def test_multi_vertex_negative_is_flagged(q2bar, q2bar_omega):
    theta = Derivation(q2bar, {"a": parse_poly("a*a*", q2bar, juxtapose=False)})
    check = is_symplectic(theta, q2bar_omega)
    assert not check
    assert check.method == "exactness" and not check.conclusive


def test_rational_scaling_of_field(plane, plane_omega):
    h = nk(plane, "x*y")
    theta = hamiltonian_derivation(h * GaussRat(Fraction(1, 3)), plane_omega)
    assert theta == hamiltonian_derivation(h, plane_omega) * GaussRat(Fraction(1, 3))
