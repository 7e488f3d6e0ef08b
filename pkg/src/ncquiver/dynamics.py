"""Matrix flows on representation spaces and their projection to particle systems.

Rational, harmonic and hyperbolic Calogero-Moser systems come from flows on
the plane; the Gibbons-Hermsen system from free motion on the doubled framed
quiver ``Q_r``.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .ncalg import Quiver, double_quiver, free_plane, quiver_create
from .repspace import Representation, moment_map, path_block
from .symplectic import Derivation

MIN_GAP = 1e-9


class FlowDivergence(RuntimeError):
    def __init__(self, message: str, last_time: float):
        super().__init__(f"{message} (last finite state at t={last_time:g})")
        self.last_time = last_time


class TrackingWarning(UserWarning):
    """Eigenvalues moved too far between samples for reliable matching."""


@dataclass
class Trajectory:
    times: np.ndarray
    states: list[Representation]
    projected: np.ndarray | None = None  # (len(times), n) eigenvalue tracks

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if len(self.times) != len(self.states):
            raise ValueError("one state per sample time")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("sample times must be strictly increasing")
        shapes = {tuple(b.shape for b in s.blocks) for s in self.states}
        if len(shapes) > 1:
            raise ValueError("state shapes vary along the trajectory")
        if self.projected is not None and len(self.projected) != len(self.times):
            raise ValueError("projected tracks do not match the sample count")

    def __len__(self):
        return len(self.times)


# plane helpers

def _plane_pair(rho: Representation, pair: tuple[str, str] | None) -> tuple[int, int]:
    q = rho.quiver
    if pair is not None:
        return q.arrow(pair[0]), q.arrow(pair[1])
    if len(q.vertices) == 1 and len(q.arrows) == 2:
        return 0, 1
    raise ValueError("flow needs a one-vertex two-loop representation or an explicit (position, momentum) pair")


def flow_free_exact(rho: Representation, t: float, pair: tuple[str, str] | None = None) -> Representation:
    """``(X, Y) -> (X + tY, Y)``; other blocks are left alone."""
    ix, iy = _plane_pair(rho, pair)
    blocks = list(rho.blocks)
    blocks[ix] = rho.blocks[ix] + t * rho.blocks[iy]
    return Representation(rho.quiver, rho.dims, tuple(blocks))


def flow_harmonic_exact(rho: Representation, t: float, omega0: complex,
                        pair: tuple[str, str] | None = None) -> Representation:
    if omega0 == 0:
        raise ValueError("omega0 must be nonzero; use flow_free_exact")
    ix, iy = _plane_pair(rho, pair)
    X, Y = rho.blocks[ix], rho.blocks[iy]
    c, s = np.cos(omega0 * t), np.sin(omega0 * t)
    blocks = list(rho.blocks)
    blocks[ix] = X * c + Y * (s / omega0)
    blocks[iy] = Y * c - X * (omega0 * s)
    return Representation(rho.quiver, rho.dims, tuple(blocks))


def compile_field(theta: Derivation) -> Callable[[tuple[np.ndarray, ...], tuple[int, ...]], list[np.ndarray]]:
    """Vector field ``rho(xi) -> rho(theta(xi))`` on raw block tuples."""
    q = theta.quiver
    plan = [[(complex(c), p) for p, c in theta[xi].terms.items()] for xi in range(len(q.arrows))]

    def field_(blocks, dims):
        rho = _RawRep(blocks, dims)
        out = []
        for xi, a in enumerate(q.arrows):
            b = np.zeros(blocks[xi].shape, dtype=complex)
            for c, path in plan[xi]:
                b += c * path_block(path, rho)
            out.append(b)
        return out

    return field_


class _RawRep:
    """Duck-typed stand-in for Representation inside the integrator hot loop."""

    __slots__ = ("blocks", "dims")

    def __init__(self, blocks, dims):
        self.blocks = blocks
        self.dims = dims


def flow_rk4(theta: Derivation, rho: Representation, t_end: float, steps: int) -> Trajectory:
    """Classical fixed-step RK4 for ``d rho(xi)/dt = rho(theta(xi))``."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if theta.quiver != rho.quiver:
        raise ValueError("derivation and representation belong to different quivers")
    f = compile_field(theta)
    dims = rho.dims
    h = t_end / steps
    y = tuple(np.array(b) for b in rho.blocks)
    times = [0.0]
    states = [rho]
    # overflow is detected below, so numpy's own warnings are noise
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(steps):
            k1 = f(y, dims)
            k2 = f(tuple(a + 0.5 * h * d for a, d in zip(y, k1)), dims)
            k3 = f(tuple(a + 0.5 * h * d for a, d in zip(y, k2)), dims)
            k4 = f(tuple(a + h * d for a, d in zip(y, k3)), dims)
            y = tuple(a + (h / 6) * (d1 + 2 * d2 + 2 * d3 + d4)
                      for a, d1, d2, d3, d4 in zip(y, k1, k2, k3, k4))
            if not all(np.all(np.isfinite(b)) for b in y):
                raise FlowDivergence("non-finite state in RK4 flow", times[-1])
            times.append((k + 1) * h)
            states.append(Representation(rho.quiver, dims, y))
    return Trajectory(np.array(times), states)


def sample_flow(flow: Callable[[float], Representation], times: Sequence[float]) -> Trajectory:
    return Trajectory(np.asarray(times, dtype=float), [flow(t) for t in times])


# eigenvalue projection

def _sort_key(z: complex):
    return (round(z.real, 12), round(z.imag, 12))


def match_tracks(samples: Sequence[np.ndarray]) -> np.ndarray:
    """Order each sample's eigenvalues to continue the previous sample's tracks.

    The first sample is sorted by (real, imag); later ones are matched by
    greedy nearest neighbour over all (previous, current) pairs.
    """
    first = sorted(np.asarray(samples[0], dtype=complex), key=_sort_key)
    tracks = [np.array(first)]
    warned = False
    for current in samples[1:]:
        prev = tracks[-1]
        current = np.asarray(current, dtype=complex)
        n = len(prev)
        dist = np.abs(prev[:, None] - current[None, :])
        order = np.argsort(dist, axis=None, kind="stable")
        assigned = np.full(n, -1)
        used = np.zeros(n, dtype=bool)
        for flat in order:
            i, j = divmod(int(flat), n)
            if assigned[i] < 0 and not used[j]:
                assigned[i] = j
                used[j] = True
        nxt = current[assigned]
        if n > 1 and not warned:
            sep = np.abs(prev[:, None] - prev[None, :])
            sep = sep[~np.eye(n, dtype=bool)].min()
            if np.max(np.abs(nxt - prev)) > 0.5 * sep:
                warnings.warn("eigenvalue motion per sample exceeds half the track separation; "
                              "increase the sampling density", TrackingWarning, stacklevel=2)
                warned = True
        tracks.append(nxt)
    return np.array(tracks)


def eigen_projection(traj: Trajectory, arrow: str | int = 0) -> np.ndarray:
    """Continuous eigenvalue tracks of the block of ``arrow`` along ``traj``."""
    samples = []
    for rho in traj.states:
        X = rho[arrow]
        if X.shape[0] != X.shape[1]:
            raise ValueError("projection needs a square block")
        try:
            samples.append(np.linalg.eigvals(X))
        except np.linalg.LinAlgError as exc:
            raise RuntimeError("eigenvalue solver did not converge") from exc
    tracks = match_tracks(samples)
    traj.projected = tracks
    return tracks


# Calogero-Moser

@dataclass
class CMConfig:
    """Particle data. ``f`` (n x r) and ``e`` (r x n) are optional spins with
    rows ``f_i`` and columns ``e_i`` normalised to ``<f_i, e_i> = 1``."""

    q: np.ndarray
    p: np.ndarray
    tau: complex = 1.0
    f: np.ndarray | None = None
    e: np.ndarray | None = None
    n: int = field(init=False)

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=complex).ravel()
        self.p = np.asarray(self.p, dtype=complex).ravel()
        self.n = len(self.q)
        if len(self.p) != self.n:
            raise ValueError("q and p must have the same length")
        if self.tau == 0:
            raise ValueError("coupling tau must be nonzero")
        check_distinct(self.q)
        if (self.f is None) != (self.e is None):
            raise ValueError("spins need both f and e")
        if self.f is not None:
            self.f = np.asarray(self.f, dtype=complex)
            self.e = np.asarray(self.e, dtype=complex)
            if self.f.ndim != 2 or self.f.shape[0] != self.n or self.e.shape != self.f.shape[::-1]:
                raise ValueError("f must be n x r and e must be r x n")

    @property
    def r(self) -> int | None:
        return None if self.f is None else self.f.shape[1]


def check_distinct(q: np.ndarray):
    q = np.asarray(q)
    if len(q) > 1:
        gaps = np.abs(q[:, None] - q[None, :])[~np.eye(len(q), dtype=bool)]
        if gaps.min() <= MIN_GAP:
            raise ValueError("particle positions must be pairwise distinct")


def _gap_matrix(q: np.ndarray) -> np.ndarray:
    diff = q[:, None] - q[None, :]
    np.fill_diagonal(diff, 1.0)
    return diff


def cm_point(cfg: CMConfig, quiver: Quiver | None = None) -> Representation:
    """``X = diag(q)``, ``Y_ii = p_i``, ``Y_ij = i tau / (q_i - q_j)``."""
    q = quiver or free_plane()
    n = cfg.n
    Y = 1j * cfg.tau / _gap_matrix(cfg.q)
    Y[np.diag_indices(n)] = cfg.p
    return Representation(q, (n,), (np.diag(cfg.q), Y))


def cm_orbit_matrix(n: int, tau: complex) -> np.ndarray:
    return 1j * tau * (np.ones((n, n)) - np.eye(n))


def cm_hamiltonian(q, p, tau, omega0: complex | None = None) -> complex:
    q = np.asarray(q, dtype=complex)
    p = np.asarray(p, dtype=complex)
    check_distinct(q)
    inv2 = 1.0 / _gap_matrix(q) ** 2
    np.fill_diagonal(inv2, 0.0)
    h = 0.5 * np.sum(p ** 2) + 0.5 * tau ** 2 * np.sum(inv2)
    if omega0:
        h += 0.5 * omega0 ** 2 * np.sum(q ** 2)
    return complex(h)


def cm_direct_rhs(q, p, tau, omega0: complex | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Hamilton's equations of the reduced Calogero-Moser Hamiltonian."""
    q = np.asarray(q, dtype=complex)
    p = np.asarray(p, dtype=complex)
    check_distinct(q)
    inv3 = 1.0 / _gap_matrix(q) ** 3
    np.fill_diagonal(inv3, 0.0)
    pdot = 2 * tau ** 2 * inv3.sum(axis=1)
    if omega0:
        pdot = pdot - omega0 ** 2 * q
    return p.copy(), pdot


def fd_grad_q(H: Callable[[np.ndarray], complex], q: np.ndarray) -> np.ndarray:
    q = np.asarray(q, dtype=complex)
    g = np.zeros(len(q), dtype=complex)
    for i in range(len(q)):
        h = 1e-6 * (1 + abs(q[i]))
        qp, qm = q.copy(), q.copy()
        qp[i] += h
        qm[i] -= h
        g[i] = (H(qp) - H(qm)) / (2 * h)
    return g


def verify_cm_gradient(q, p, tau, omega0=None, rtol: float = 1e-6) -> float:
    """Check the analytic force against central differences; return the relative error."""
    _, pdot = cm_direct_rhs(q, p, tau, omega0)
    fd = -fd_grad_q(lambda x: cm_hamiltonian(x, p, tau, omega0), np.asarray(q, dtype=complex))
    err = float(np.max(np.abs(pdot - fd)) / max(1.0, float(np.max(np.abs(fd)))))
    if err > rtol:
        raise AssertionError(f"analytic CM force disagrees with finite differences (rel {err:.2e})")
    return err


def integrate_cm_direct(q, p, tau, t_end: float, steps: int,
                        omega0: complex | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """RK4 of the particle equations; returns ``(times, q_samples, p_samples)``."""
    q = np.asarray(q, dtype=complex)
    p = np.asarray(p, dtype=complex)
    verify_cm_gradient(q, p, tau, omega0)
    h = t_end / steps
    qs, ps = [q], [p]
    for _ in range(steps):
        k1 = cm_direct_rhs(q, p, tau, omega0)
        k2 = cm_direct_rhs(q + 0.5 * h * k1[0], p + 0.5 * h * k1[1], tau, omega0)
        k3 = cm_direct_rhs(q + 0.5 * h * k2[0], p + 0.5 * h * k2[1], tau, omega0)
        k4 = cm_direct_rhs(q + h * k3[0], p + h * k3[1], tau, omega0)
        q = q + (h / 6) * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        p = p + (h / 6) * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        qs.append(q)
        ps.append(p)
    return np.linspace(0.0, t_end, steps + 1), np.array(qs), np.array(ps)


def order_like_tracks(q0: np.ndarray) -> np.ndarray:
    """Permutation putting particle labels in the order used for track starts."""
    return np.array(sorted(range(len(q0)), key=lambda i: _sort_key(complex(q0[i]))))


def hyperbolic_reduced_hamiltonian(q, p, tau) -> complex:
    """Value of ``1/2 tr(XYXY)`` at the CM point, in particle coordinates."""
    q = np.asarray(q, dtype=complex)
    p = np.asarray(p, dtype=complex)
    check_distinct(q)
    pair = np.outer(q, q) / _gap_matrix(q) ** 2
    np.fill_diagonal(pair, 0.0)
    return complex(0.5 * np.sum(q ** 2 * p ** 2) + 0.5 * tau ** 2 * np.sum(pair))


def log_variables(q, p) -> tuple[np.ndarray, np.ndarray]:
    """``(log q_i, q_i p_i)``; requires every ``q_i`` in the right half-plane."""
    q = np.asarray(q, dtype=complex)
    p = np.asarray(p, dtype=complex)
    if np.any(q.real <= 0):
        raise ValueError("log variables need Re(q_i) > 0")
    return np.log(q), q * p


def hyperbolic_sinh_hamiltonian(theta, ptilde, tau) -> complex:
    """``1/2 sum ptilde^2 + (tau^2/8) sum_{i != j} sinh((theta_i - theta_j)/2)^-2``."""
    theta = np.asarray(theta, dtype=complex)
    ptilde = np.asarray(ptilde, dtype=complex)
    s = np.sinh((theta[:, None] - theta[None, :]) / 2)
    np.fill_diagonal(s, 1.0)
    inv = 1.0 / s ** 2
    np.fill_diagonal(inv, 0.0)
    return complex(0.5 * np.sum(ptilde ** 2) + tau ** 2 / 8 * np.sum(inv))


# Gibbons-Hermsen

def gh_quiver(r: int) -> Quiver:
    """Double of ``Q_r``: loop ``a`` at 1, ``x: 2 -> 1``, ``y_i: 1 -> 2`` for i = 2..r."""
    if r < 1:
        raise ValueError("r must be >= 1")
    arrows = [("a", "1", "1"), ("x", "2", "1")] + [(f"y{i}", "1", "2") for i in range(2, r + 1)]
    return double_quiver(quiver_create(["1", "2"], arrows))


def random_spins(n: int, r: int, rng: np.random.Generator, real: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Spins ``f`` (n x r), ``e`` (r x n) with ``<f_i, e_i> = 1``."""
    f = rng.standard_normal((n, r))
    e = rng.standard_normal((r, n))
    if not real:
        f = f + 1j * rng.standard_normal((n, r))
        e = e + 1j * rng.standard_normal((r, n))
    for i in range(n):
        s = f[i] @ e[:, i]
        while abs(s) < 0.2:
            f[i] = rng.standard_normal(r)
            s = f[i] @ e[:, i]
        f[i] = f[i] / s
    return f.astype(complex), e.astype(complex)


def gh_point(cfg: CMConfig, tol: float = 1e-10) -> Representation:
    """Point of Rep(Q_r double, (n, 1)) in the level set ``mu_1 = tau I``.

    The n x r matrix ``F = (-v_1, v_2, ..., v_r)`` equals ``-tau f`` and the
    r x n matrix with rows ``w_1..w_r`` equals ``e``. Then
    ``Y_ij = <F_i, e_j> / (q_i - q_j)`` solves the off-diagonal constraint.
    """
    if cfg.f is None:
        raise ValueError("Gibbons-Hermsen point needs spins")
    n, r = cfg.n, cfg.r
    diag = np.einsum("ij,ji->i", cfg.f, cfg.e)
    if np.max(np.abs(diag - 1)) > tol:
        raise ValueError("spins violate <f_i, e_i> = 1")
    F = -cfg.tau * cfg.f
    FE = F @ cfg.e
    Y = FE / _gap_matrix(cfg.q)
    Y[np.diag_indices(n)] = cfg.p
    quiver = gh_quiver(r)
    blocks = {"a": np.diag(cfg.q), "a*": Y,
              "x": -F[:, [0]], "x*": cfg.e[[0], :]}
    for i in range(2, r + 1):
        blocks[f"y{i}"] = cfg.e[[i - 1], :]
        blocks[f"y{i}*"] = F[:, [i - 1]]
    rho = Representation.from_mapping(quiver, (n, 1), blocks)
    mu = moment_map(rho)[0]
    if np.max(np.abs(mu - cfg.tau * np.eye(n))) > tol * max(1.0, float(np.max(np.abs(FE)))):
        raise ValueError("moment constraint mu_1 = tau I violated")
    return rho


def gh_reduced_hamiltonian(q, p, f, e, tau) -> complex:
    """``1/2 sum p^2 - (tau^2/2) sum_{i != j} <f_i,e_j><f_j,e_i> / (q_i - q_j)^2``.

    Spins normalised by ``<f_i, e_i> = 1``; the minus sign is what the level
    set ``mu_1 = tau I`` forces with ``F = -tau f``.
    """
    q = np.asarray(q, dtype=complex)
    p = np.asarray(p, dtype=complex)
    check_distinct(q)
    G = np.asarray(f, dtype=complex) @ np.asarray(e, dtype=complex)
    inter = G * G.T / _gap_matrix(q) ** 2
    np.fill_diagonal(inter, 0.0)
    return complex(0.5 * np.sum(p ** 2) - 0.5 * tau ** 2 * np.sum(inter))


# export

def _num(x: float) -> str:
    return repr(float(x))


def trajectory_csv(times: Sequence[float], tracks: np.ndarray,
                   extra: dict[str, np.ndarray] | None = None,
                   matrices: Sequence[Representation] | None = None) -> str:
    """CSV text: ``t``, then ``re_q{k}, im_q{k}`` per particle, then extra columns.

    Extra complex columns are split into ``re_``/``im_`` pairs; with
    ``matrices`` every block entry is dumped as well. Floats use ``repr`` so
    output is byte-stable.
    """
    tracks = np.asarray(tracks, dtype=complex)
    n = tracks.shape[1]
    header = ["t"]
    for k in range(n):
        header += [f"re_q{k + 1}", f"im_q{k + 1}"]
    extra = extra or {}
    for name, col in extra.items():
        col = np.asarray(col)
        if col.ndim == 1:
            header += [f"re_{name}", f"im_{name}"]
        else:
            for k in range(col.shape[1]):
                header += [f"re_{name}{k + 1}", f"im_{name}{k + 1}"]
    if matrices is not None:
        rho0 = matrices[0]
        for a, b in zip(rho0.quiver.arrows, rho0.blocks):
            for i, j in np.ndindex(b.shape):
                header += [f"re_{a.name}_{i}{j}", f"im_{a.name}_{i}{j}"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row_i, t in enumerate(times):
        row = [_num(t)]
        for z in tracks[row_i]:
            row += [_num(z.real), _num(z.imag)]
        for col in extra.values():
            val = np.atleast_1d(np.asarray(col)[row_i]).astype(complex)
            for z in val:
                row += [_num(z.real), _num(z.imag)]
        if matrices is not None:
            for b in matrices[row_i].blocks:
                for z in b.ravel():
                    row += [_num(z.real), _num(z.imag)]
        w.writerow(row)
    return buf.getvalue()


def max_track_deviation(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def relative_deviation(a: np.ndarray, b: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(b))))
    return max_track_deviation(a, b) / scale


def harmonic_period(omega0: float) -> float:
    return 2 * math.pi / omega0
