"""Matrix representations of quivers and what path-algebra objects induce on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .calculus import Necklace
from .ncalg import Path, PathPoly, Quiver, _check_same
from .symplectic import CanonicalTwoForm, Derivation


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=complex)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Representation:
    """A point of Rep(Q, d): one ``d_t x d_s`` complex block per arrow."""

    quiver: Quiver
    dims: tuple[int, ...]
    blocks: tuple[np.ndarray, ...]

    def __post_init__(self):
        q = self.quiver
        dims = tuple(int(d) for d in self.dims)
        if len(dims) != len(q.vertices) or any(d < 1 for d in dims):
            raise ValueError(f"bad dimension vector {self.dims}")
        if len(self.blocks) != len(q.arrows):
            raise ValueError("one block per arrow required")
        blocks = tuple(_frozen(b) for b in self.blocks)
        for arrow, b in zip(q.arrows, blocks):
            want = (dims[arrow.target], dims[arrow.source])
            if b.shape != want:
                raise ValueError(f"block {arrow.name} has shape {b.shape}, expected {want}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_mapping(cls, q: Quiver, dims: Sequence[int], blocks: Mapping[str, np.ndarray]):
        return cls(q, tuple(dims), tuple(blocks[a.name] for a in q.arrows))

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(int(x) for x in np.concatenate([[0], np.cumsum(self.dims)[:-1]]))

    def __getitem__(self, name: str | int) -> np.ndarray:
        if isinstance(name, str):
            name = self.quiver.arrow(name)
        return self.blocks[name]

    def replace(self, **named: np.ndarray) -> Representation:
        blocks = list(self.blocks)
        for name, b in named.items():
            blocks[self.quiver.arrow(name)] = b
        return Representation(self.quiver, self.dims, tuple(blocks))

    def embed(self, block: np.ndarray, target: int, source: int) -> np.ndarray:
        off = self.offsets
        out = np.zeros((self.total_dim, self.total_dim), dtype=complex)
        out[off[target]:off[target] + self.dims[target],
            off[source]:off[source] + self.dims[source]] = block
        return out

    def extract(self, full: np.ndarray, target: int, source: int) -> np.ndarray:
        off = self.offsets
        return full[off[target]:off[target] + self.dims[target],
                    off[source]:off[source] + self.dims[source]]


@dataclass(frozen=True, eq=False)
class Tangent:
    """Tangent vector at a representation: one block per arrow, same shapes."""

    quiver: Quiver
    dims: tuple[int, ...]
    blocks: tuple[np.ndarray, ...]

    def __getitem__(self, name: str | int) -> np.ndarray:
        if isinstance(name, str):
            name = self.quiver.arrow(name)
        return self.blocks[name]


def random_representation(q: Quiver, dims: Sequence[int], rng: np.random.Generator,
                          scale: float = 1.0, real: bool = False) -> Representation:
    blocks = []
    for a in q.arrows:
        shape = (dims[a.target], dims[a.source])
        b = rng.standard_normal(shape)
        if not real:
            b = b + 1j * rng.standard_normal(shape)
        blocks.append(scale * b)
    return Representation(q, tuple(dims), tuple(blocks))


def path_block(path: Path, rho: Representation) -> np.ndarray:
    """``rho(path)`` as a ``d_t x d_s`` block."""
    if not path.arrows:
        return np.eye(rho.dims[path.vertex], dtype=complex)
    out = rho.blocks[path.arrows[0]]
    for a in path.arrows[1:]:
        out = out @ rho.blocks[a]
    return out


def evaluate(f: PathPoly, rho: Representation) -> np.ndarray:
    """Full ``d x d`` block-embedded matrix of ``f``."""
    _check_same(f.quiver, rho.quiver)
    q = f.quiver
    off = rho.offsets
    out = np.zeros((rho.total_dim, rho.total_dim), dtype=complex)
    for path, c in f.terms.items():
        t, s = q.target(path), q.source(path)
        out[off[t]:off[t] + rho.dims[t], off[s]:off[s] + rho.dims[s]] += complex(c) * path_block(path, rho)
    return out


def trace_function(f: Necklace, rho: Representation) -> complex:
    _check_same(f.quiver, rho.quiver)
    total = 0j
    for path, c in f.terms.items():
        total += complex(c) * np.trace(path_block(path, rho))
    return complex(total)


def group_act(g: Sequence[np.ndarray], rho: Representation) -> Representation:
    """``xi -> g_t rho(xi) g_s^{-1}``."""
    g = [np.asarray(x, dtype=complex) for x in g]
    if len(g) != len(rho.dims):
        raise ValueError("one group element per vertex required")
    inv = []
    for gi, d in zip(g, rho.dims):
        if gi.shape != (d, d):
            raise ValueError(f"group element has shape {gi.shape}, expected {(d, d)}")
        if np.linalg.matrix_rank(gi) < d:
            raise ValueError("singular group element")
        inv.append(np.linalg.inv(gi))
    blocks = tuple(g[a.target] @ b @ inv[a.source]
                   for a, b in zip(rho.quiver.arrows, rho.blocks))
    return Representation(rho.quiver, rho.dims, blocks)


def _compiled(p: PathPoly) -> list[tuple[complex, Path]]:
    return [(complex(c), path) for path, c in p.terms.items()]


def induced_tangent(theta: Derivation, rho: Representation) -> Tangent:
    """Block for ``xi`` is ``rho(theta(xi))``."""
    _check_same(theta.quiver, rho.quiver)
    q = rho.quiver
    blocks = []
    for xi, a in enumerate(q.arrows):
        b = np.zeros((rho.dims[a.target], rho.dims[a.source]), dtype=complex)
        for c, path in _compiled(theta[xi]):
            b += c * path_block(path, rho)
        blocks.append(b)
    return Tangent(q, rho.dims, tuple(blocks))


def tangent_from_blocks(rho: Representation, blocks: Sequence[np.ndarray]) -> Tangent:
    blocks = tuple(np.asarray(b, dtype=complex) for b in blocks)
    for b, ref in zip(blocks, rho.blocks):
        if b.shape != ref.shape:
            raise ValueError("tangent block shape mismatch")
    return Tangent(rho.quiver, rho.dims, blocks)


def symplectic_pairing(omega: CanonicalTwoForm, t1: Tangent, t2: Tangent) -> complex:
    """``sum tr(t1(xi*) t2(xi) - t2(xi*) t1(xi))``."""
    _check_same(omega.quiver, t1.quiver)
    _check_same(omega.quiver, t2.quiver)
    for a, b in zip(t1.blocks, t2.blocks):
        if a.shape != b.shape:
            raise ValueError("tangent shapes differ")
    total = 0j
    for star, base in omega.pairs:
        total += np.trace(t1.blocks[star] @ t2.blocks[base]) - np.trace(t2.blocks[star] @ t1.blocks[base])
    return complex(total)


def moment_map(rho: Representation) -> list[np.ndarray]:
    """Per-vertex ``sum_{t(xi)=i} xi xi* - sum_{s(xi)=i} xi* xi`` over original arrows."""
    q = rho.quiver
    if not q.is_double:
        raise ValueError("moment map needs a doubled quiver")
    mu = [np.zeros((d, d), dtype=complex) for d in rho.dims]
    for base, star in q.pairs:
        a = q.arrows[base]
        x, xs = rho.blocks[base], rho.blocks[star]
        mu[a.target] += x @ xs
        mu[a.source] -= xs @ x
    return mu


# finite-difference oracles

def fd_step(z: complex) -> float:
    return 1e-6 * (1.0 + abs(z))


def fd_gradient(F: Callable[[Representation], complex], rho: Representation) -> list[np.ndarray]:
    """Central differences of a holomorphic ``F`` in every block entry."""
    grads = []
    for k, b in enumerate(rho.blocks):
        g = np.zeros(b.shape, dtype=complex)
        for idx in np.ndindex(b.shape):
            h = fd_step(b[idx])
            plus, minus = b.copy(), b.copy()
            plus[idx] += h
            minus[idx] -= h
            blocks_p = rho.blocks[:k] + (plus,) + rho.blocks[k + 1:]
            blocks_m = rho.blocks[:k] + (minus,) + rho.blocks[k + 1:]
            g[idx] = (F(Representation(rho.quiver, rho.dims, blocks_p))
                      - F(Representation(rho.quiver, rho.dims, blocks_m))) / (2 * h)
        grads.append(g)
    return grads


def fd_matrix_bracket(F, G, rho: Representation, omega: CanonicalTwoForm) -> complex:
    """Canonical bracket of two functions on Rep, by finite differences.

    ``tr(dxi* ^ dxi)`` pairs entry ``(a, b)`` of ``xi*`` with entry ``(b, a)``
    of ``xi``, hence the transposes.
    """
    dF, dG = fd_gradient(F, rho), fd_gradient(G, rho)
    total = 0j
    for star, base in omega.pairs:
        total += np.sum(dF[star] * dG[base].T) - np.sum(dF[base].T * dG[star])
    return complex(total)


def fd_directional(F, rho: Representation, t: Tangent) -> complex:
    """``d/ds F(rho + s t)`` at ``s = 0`` by central differences."""
    scale = max(1.0, max(float(np.max(np.abs(b))) for b in rho.blocks if b.size))
    h = 1e-6 * scale
    plus = Representation(rho.quiver, rho.dims, tuple(b + h * tb for b, tb in zip(rho.blocks, t.blocks)))
    minus = Representation(rho.quiver, rho.dims, tuple(b - h * tb for b, tb in zip(rho.blocks, t.blocks)))
    return complex((F(plus) - F(minus)) / (2 * h))
