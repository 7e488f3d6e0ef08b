"""Noncommutative symplectic calculus on quiver path algebras, with a matrix backend
for Calogero-Moser type dynamics."""

from .calculus import (Necklace, NotExact, OneForm, b_map, differential,
                       integrate_one_form, necklace_class, necklace_derivative,
                       normalize_one_form)
from .ncalg import (GaussRat, Path, PathPoly, Quiver, double_quiver,
                    free_plane, one_vertex_quiver, path_mul, poly_add,
                    poly_commutator, poly_mul, poly_scale, quiver_create)
from .symplectic import (CanonicalTwoForm, Derivation, apply_derivation,
                         canonical_two_form, hamiltonian_derivation,
                         is_symplectic, poisson_bracket)
from .textio import format_poly, load_quiver, parse_poly

__all__ = [
    "GaussRat", "Path", "PathPoly", "Quiver", "double_quiver", "free_plane",
    "one_vertex_quiver", "path_mul", "poly_add", "poly_commutator", "poly_mul",
    "poly_scale", "quiver_create",
    "Necklace", "NotExact", "OneForm", "b_map", "differential",
    "integrate_one_form", "necklace_class", "necklace_derivative",
    "normalize_one_form",
    "CanonicalTwoForm", "Derivation", "apply_derivation", "canonical_two_form",
    "hamiltonian_derivation", "is_symplectic", "poisson_bracket",
    "format_poly", "load_quiver", "parse_poly",
]
