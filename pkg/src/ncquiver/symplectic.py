"""Canonical symplectic forms on doubled quivers, Hamiltonian derivations and the
necklace Poisson bracket.

Sign convention: ``theta_f = -omega_sharp(df)`` with ``omega = sum dxi* dxi``,
so ``theta_f(xi) = df/dxi*`` and ``theta_f(xi*) = -df/dxi``. With this choice
``{1/2 y^2, x} = y``.
"""

from __future__ import annotations

from dataclasses import dataclass

from .calculus import (Necklace, NotExact, OneForm, integrate_one_form,
                       necklace_class, necklace_derivative)
from .ncalg import (ONE, Path, PathPoly, Quiver, _check_same,
                    poly_commutator, poly_mul)


@dataclass(frozen=True)
class CanonicalTwoForm:
    """``sum over original arrows of dxi* dxi``, kept as its list of pairs."""

    quiver: Quiver
    pairs: tuple[tuple[int, int], ...]  # (star, base)

    def __repr__(self):
        names = [f"d{self.quiver.arrows[s].name} d{self.quiver.arrows[b].name}"
                 for s, b in self.pairs]
        return "CanonicalTwoForm(" + " + ".join(names) + ")"


def canonical_two_form(q: Quiver) -> CanonicalTwoForm:
    if not q.is_double:
        raise ValueError("quiver is not a recorded double (every arrow needs a partner)")
    return CanonicalTwoForm(q, tuple((star, base) for base, star in q.pairs))


class Derivation:
    """B-linear derivation, determined by its values on arrows.

    ``images[xi]`` runs from s(xi) to t(xi); missing arrows map to zero.
    """

    __slots__ = ("quiver", "images")

    def __init__(self, quiver: Quiver, images: dict[int, PathPoly] | None = None):
        self.quiver = quiver
        self.images = {}
        for xi, p in (images or {}).items():
            if isinstance(xi, str):
                xi = quiver.arrow(xi)
            _check_same(quiver, p.quiver)
            arrow = quiver.arrows[xi]
            for path in p.terms:
                if quiver.source(path) != arrow.source or quiver.target(path) != arrow.target:
                    raise ValueError(f"image of {arrow.name} is not a path parallel to it")
            if p:
                self.images[xi] = p

    def __getitem__(self, xi: int | str) -> PathPoly:
        if isinstance(xi, str):
            xi = self.quiver.arrow(xi)
        return self.images.get(xi, PathPoly(self.quiver))

    def __call__(self, f):
        if isinstance(f, Necklace):
            return apply_derivation_necklace(self, f)
        return apply_derivation(self, f)

    def __eq__(self, other):
        if not isinstance(other, Derivation):
            return NotImplemented
        return self.quiver == other.quiver and self.images == other.images

    def __add__(self, other: Derivation) -> Derivation:
        _check_same(self.quiver, other.quiver)
        out = dict(self.images)
        for xi, p in other.images.items():
            out[xi] = out[xi] + p if xi in out else p
        return Derivation(self.quiver, out)

    def __mul__(self, c) -> Derivation:
        return Derivation(self.quiver, {xi: p * c for xi, p in self.images.items()})

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def __repr__(self):
        q = self.quiver
        parts = [f"{q.arrows[xi].name} -> {p}" for xi, p in sorted(self.images.items())]
        return "Derivation(" + ", ".join(parts) + ")"


def _check_form(q: Quiver, omega: CanonicalTwoForm):
    _check_same(q, omega.quiver)


def hamiltonian_derivation(h: Necklace, omega: CanonicalTwoForm) -> Derivation:
    _check_form(h.quiver, omega)
    images = {}
    for star, base in omega.pairs:
        images[base] = necklace_derivative(h, star)
        images[star] = -necklace_derivative(h, base)
    return Derivation(omega.quiver, images)


def apply_derivation(theta: Derivation, f: PathPoly) -> PathPoly:
    """Leibniz extension; trivial paths are killed."""
    q = theta.quiver
    _check_same(q, f.quiver)
    out = PathPoly(q)
    for path, c in f.terms.items():
        word = path.arrows
        for k, xi in enumerate(word):
            img = theta.images.get(xi)
            if img is None:
                continue
            term = img * c
            if k:
                term = poly_mul(PathPoly(q, {Path(word[:k]): ONE}), term)
            if k + 1 < len(word):
                term = poly_mul(term, PathPoly(q, {Path(word[k + 1:]): ONE}))
            out = out + term
    return out


def apply_derivation_necklace(theta: Derivation, f: Necklace) -> Necklace:
    return necklace_class(apply_derivation(theta, f.as_poly()))


def derivation_commutator(theta: Derivation, eta: Derivation) -> Derivation:
    """``[theta, eta](xi) = theta(eta(xi)) - eta(theta(xi))``."""
    _check_same(theta.quiver, eta.quiver)
    q = theta.quiver
    images = {}
    for xi in range(len(q.arrows)):
        images[xi] = apply_derivation(theta, eta[xi]) - apply_derivation(eta, theta[xi])
    return Derivation(q, images)


def contract(theta: Derivation, alpha: OneForm) -> Necklace:
    """Pairing ``i_theta(sum p_xi dxi) = [sum p_xi theta(xi)]``."""
    _check_same(theta.quiver, alpha.quiver)
    total = PathPoly(theta.quiver)
    for xi, p in alpha.coeffs.items():
        img = theta.images.get(xi)
        if img is not None:
            total = total + poly_mul(p, img)
    return necklace_class(total)


def poisson_bracket(f: Necklace, g: Necklace, omega: CanonicalTwoForm) -> Necklace:
    """``{f, g} = i_{theta_f}(dg)``."""
    _check_form(f.quiver, omega)
    _check_form(g.quiver, omega)
    theta_f = hamiltonian_derivation(f, omega)
    total = PathPoly(omega.quiver)
    for xi in range(len(omega.quiver.arrows)):
        img = theta_f.images.get(xi)
        if img is None:
            continue
        dg = necklace_derivative(g, xi)
        if dg:
            total = total + poly_mul(dg, img)
    return necklace_class(total)


def poisson_bracket_pairs(f: Necklace, g: Necklace, omega: CanonicalTwoForm) -> Necklace:
    """Same bracket from the pair sum ``[df/dxi* dg/dxi - df/dxi dg/dxi*]``."""
    _check_form(f.quiver, omega)
    _check_form(g.quiver, omega)
    total = PathPoly(omega.quiver)
    for star, base in omega.pairs:
        total = total + poly_mul(necklace_derivative(f, star), necklace_derivative(g, base))
        total = total - poly_mul(necklace_derivative(f, base), necklace_derivative(g, star))
    return necklace_class(total)


def contract_omega(theta: Derivation, omega: CanonicalTwoForm) -> OneForm:
    """``i_theta(omega) = sum (theta(xi*) dxi - theta(xi) dxi*)``."""
    _check_form(theta.quiver, omega)
    coeffs: dict[int, PathPoly] = {}
    for star, base in omega.pairs:
        coeffs[base] = theta[star]
        coeffs[star] = -theta[base]
    return OneForm(omega.quiver, coeffs)


@dataclass(frozen=True)
class SymplecticCheck:
    """Outcome of :func:`is_symplectic`; truthy when the derivation is symplectic.

    ``conclusive`` is False for a negative answer on a multi-vertex quiver,
    where only exactness of ``i_theta(omega)`` is tested.
    """

    symplectic: bool
    method: str
    conclusive: bool

    def __bool__(self):
        return self.symplectic


def is_symplectic(theta: Derivation, omega: CanonicalTwoForm) -> SymplecticCheck:
    _check_form(theta.quiver, omega)
    q = omega.quiver
    if len(q.vertices) == 1:
        total = PathPoly(q)
        for star, base in omega.pairs:
            total = total + poly_commutator(theta[star], PathPoly(q, {Path((base,)): ONE}))
            total = total - poly_commutator(theta[base], PathPoly(q, {Path((star,)): ONE}))
        return SymplecticCheck(not total, "commutator", True)
    try:
        integrate_one_form(contract_omega(theta, omega))
    except NotExact:
        return SymplecticCheck(False, "exactness", False)
    return SymplecticCheck(True, "exactness", True)

