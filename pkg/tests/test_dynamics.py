import math
import warnings

import numpy as np
import pytest

from ncquiver.calculus import necklace_class
from ncquiver.dynamics import (CMConfig, FlowDivergence, TrackingWarning,
                               Trajectory, cm_direct_rhs, cm_hamiltonian,
                               cm_orbit_matrix, cm_point, eigen_projection,
                               flow_free_exact, flow_harmonic_exact, flow_rk4,
                               fd_grad_q, gh_point, gh_quiver,
                               gh_reduced_hamiltonian, harmonic_period,
                               hyperbolic_reduced_hamiltonian,
                               hyperbolic_sinh_hamiltonian,
                               integrate_cm_direct, log_variables,
                               match_tracks, order_like_tracks, random_spins,
                               sample_flow, trajectory_csv, verify_cm_gradient)
from ncquiver.repspace import (Representation, group_act, moment_map,
                               random_representation, trace_function)
from ncquiver.symplectic import hamiltonian_derivation
from ncquiver.textio import parse_poly


def nk(q, text):
    return necklace_class(parse_poly(text, q))


@pytest.fixture
def gen():
    return np.random.default_rng(77)


def spread_q(gen, n, gap=0.6):
    """Real positions with pairwise gaps of at least ``gap``."""
    return np.sort(gen.uniform(-1, 1, n)) + gap * np.arange(n)


def close(a, b):
    return max(np.max(np.abs(x - y)) for x, y in zip(a.blocks, b.blocks))


# exact flows

def test_free_flow_identity_and_composition(plane, gen):
    rho = random_representation(plane, [3], gen)
    assert close(flow_free_exact(rho, 0.0), rho) == 0
    two = flow_free_exact(flow_free_exact(rho, 0.3), 0.5)
    assert close(two, flow_free_exact(rho, 0.8)) < 1e-14


def test_free_flow_preserves_moment(plane, gen):
    rho = random_representation(plane, [3], gen)
    mu0 = moment_map(rho)[0]
    for t in (0.1, 1.0, 7.0):
        assert np.max(np.abs(moment_map(flow_free_exact(rho, t))[0] - mu0)) < 1e-12 * (1 + t)


def test_free_flow_wrong_quiver(q2bar, gen):
    rho = random_representation(q2bar, [2, 1], gen)
    with pytest.raises(ValueError):
        flow_free_exact(rho, 1.0)


def test_harmonic_flow(plane, gen):
    rho = random_representation(plane, [3], gen)
    w = 1.7
    assert close(flow_harmonic_exact(rho, 0.0, w), rho) < 1e-15
    assert close(flow_harmonic_exact(rho, harmonic_period(w), w), rho) < 1e-12
    energy = lambda r: 0.5 * np.trace(r["y"] @ r["y"] + w ** 2 * r["x"] @ r["x"])  # noqa: E731
    e0 = energy(rho)
    for t in np.linspace(0, 3, 13):
        assert abs(energy(flow_harmonic_exact(rho, t, w)) - e0) < 1e-10


def test_harmonic_flow_needs_frequency(plane, gen):
    with pytest.raises(ValueError):
        flow_harmonic_exact(random_representation(plane, [2], gen), 1.0, 0.0)


# RK4

def test_rk4_free(plane, plane_omega, gen):
    rho = random_representation(plane, [3], gen)
    theta = hamiltonian_derivation(nk(plane, "1/2*y^2"), plane_omega)
    traj = flow_rk4(theta, rho, 1.0, 10)
    for t, state in zip(traj.times, traj.states):
        assert close(state, flow_free_exact(rho, t)) < 1e-12


def test_rk4_harmonic(plane, plane_omega, gen):
    rho = random_representation(plane, [3], gen)
    theta = hamiltonian_derivation(nk(plane, "1/2*y^2 + 1/2*x^2"), plane_omega)
    traj = flow_rk4(theta, rho, 1.0, 1000)
    exact = flow_harmonic_exact(rho, 1.0, 1.0)
    scale = max(np.max(np.abs(b)) for b in exact.blocks)
    assert close(traj.states[-1], exact) / scale < 1e-8


def test_rk4_quartic_energy_drift(plane, plane_omega, gen):
    H = nk(plane, "1/2*x*y*x*y")
    rho = random_representation(plane, [3], gen, scale=0.5)
    traj = flow_rk4(hamiltonian_derivation(H, plane_omega), rho, 1.0, 2000)
    e = np.array([trace_function(H, s) for s in traj.states])
    assert np.max(np.abs(e - e[0])) < 1e-7
    mu = [moment_map(s)[0] for s in traj.states]
    assert max(np.max(np.abs(m - mu[0])) for m in mu) < 1e-8


def test_rk4_moment_conserved_on_gh(q2bar, q2bar_omega, gen):
    H = nk(q2bar, "1/2*(a*)^2 + 1/3*a*a*(a*) + x*(x*)*a")
    rho = random_representation(q2bar, [3, 1], gen, scale=0.4)
    traj = flow_rk4(hamiltonian_derivation(H, q2bar_omega), rho, 1.0, 400)
    mu0 = moment_map(rho)
    for s in traj.states[::50]:
        for a, b in zip(moment_map(s), mu0):
            assert np.max(np.abs(a - b)) < 1e-8


def test_rk4_divergence(plane, plane_omega):
    theta = hamiltonian_derivation(nk(plane, "1/3*y^3 + 1/3*x^3"), plane_omega)
    big = Representation.from_mapping(plane, [1], {"x": np.array([[40.0]]), "y": np.array([[40.0]])})
    with pytest.raises(FlowDivergence) as err:
        flow_rk4(theta, big, 50.0, 200)
    assert err.value.last_time >= 0


def test_trajectory_validation(plane, gen):
    rho = random_representation(plane, [2], gen)
    with pytest.raises(ValueError):
        Trajectory(np.array([0.0, 0.0]), [rho, rho])


# CM point

def test_cm_point_n1():
    rho = cm_point(CMConfig([0.3], [1.2], tau=1.0))
    assert np.allclose(rho["x"], [[0.3]]) and np.allclose(rho["y"], [[1.2]])


@pytest.mark.parametrize("n", [2, 3, 5])
def test_cm_point_moment_and_energy(n, gen):
    q, p = spread_q(gen, n), gen.standard_normal(n)
    cfg = CMConfig(q, p, tau=1.0)
    rho = cm_point(cfg)
    X, Y = rho["x"], rho["y"]
    assert np.max(np.abs(X @ Y - Y @ X - cm_orbit_matrix(n, 1.0))) < 1e-12
    assert abs(0.5 * np.trace(Y @ Y) - cm_hamiltonian(q, p, 1.0)) < 1e-10


def test_cm_rejects_collisions():
    with pytest.raises(ValueError):
        CMConfig([0.0, 1e-12], [0.0, 0.0])
    with pytest.raises(ValueError):
        CMConfig([0.0, 1.0], [0.0, 0.0], tau=0)


# projection

def test_projection_of_diagonal(plane):
    X = np.diag([3.0, -1.0, 2.0])
    traj = sample_flow(lambda t: Representation(plane, (3,), (X, np.zeros((3, 3)))), [0.0])
    assert np.allclose(eigen_projection(traj)[0], [-1.0, 2.0, 3.0])


def test_projection_conjugation_invariant(plane, gen):
    q, p = spread_q(gen, 4), gen.standard_normal(4)
    rho = cm_point(CMConfig(q, p))
    g = gen.standard_normal((4, 4)) + 3 * np.eye(4)
    times = np.linspace(0, 1, 41)
    a = eigen_projection(sample_flow(lambda t: flow_free_exact(rho, t), times))
    b = eigen_projection(sample_flow(lambda t: flow_free_exact(group_act([g], rho), t), times))
    assert np.max(np.abs(a - b)) < 1e-8


def test_match_tracks_follows_crossing_free_motion():
    samples = [np.array([1.0 - t, -1.0 + t]) for t in np.linspace(0, 0.8, 9)]
    tracks = match_tracks(samples)
    assert np.allclose(tracks[:, 0].real, [-1.0 + t for t in np.linspace(0, 0.8, 9)])


def test_tracking_warning():
    samples = [np.array([0.0, 1.0]), np.array([0.6, 1.4])]
    with pytest.warns(TrackingWarning):
        match_tracks(samples)


# direct particle equations

def test_direct_rhs_free_particles(gen):
    q, p = spread_q(gen, 3), gen.standard_normal(3)
    qdot, pdot = cm_direct_rhs(q, p, 0.0)
    assert np.allclose(qdot, p) and np.allclose(pdot, 0)


def test_two_body_forces_balance():
    _, pdot = cm_direct_rhs([0.2, 1.5], [0.0, 0.0], 1.0)
    assert abs(pdot.sum()) < 1e-15 and pdot[0] != 0


@pytest.mark.parametrize("omega0", [None, 1.0])
def test_direct_force_matches_fd(omega0, gen):
    for _ in range(5):
        n = int(gen.integers(2, 6))
        q, p = spread_q(gen, n), gen.standard_normal(n)
        _, pdot = cm_direct_rhs(q, p, 1.0, omega0)
        fd = -fd_grad_q(lambda x: cm_hamiltonian(x, p, 1.0, omega0), q)
        assert np.max(np.abs(pdot - fd)) <= 1e-6 * max(1.0, np.max(np.abs(fd)))
        assert verify_cm_gradient(q, p, 1.0, omega0) < 1e-6


@pytest.mark.parametrize("n", [2, 3])
def test_projection_matches_direct(n, gen):
    q, p = spread_q(gen, n, gap=1.0), 0.5 * gen.standard_normal(n)
    rho = cm_point(CMConfig(q, p))
    times, qs, _ = integrate_cm_direct(q, p, 1.0, 1.0, 400)
    tracks = eigen_projection(sample_flow(lambda t: flow_free_exact(rho, t), times))
    direct = qs[:, order_like_tracks(q)]
    assert np.max(np.abs(tracks - direct)) < 1e-6


def test_direct_energy_conserved(gen):
    q, p = spread_q(gen, 3, gap=1.0), gen.standard_normal(3)
    _, qs, ps = integrate_cm_direct(q, p, 1.0, 1.0, 500, omega0=1.0)
    e = [cm_hamiltonian(a, b, 1.0, 1.0) for a, b in zip(qs, ps)]
    assert max(abs(x - e[0]) for x in e) < 1e-8


# hyperbolic

@pytest.mark.parametrize("n", [2, 3, 4])
def test_hyperbolic_matches_trace(n, plane, gen):
    q, p = spread_q(gen, n) + 3.0, gen.standard_normal(n)
    rho = cm_point(CMConfig(q, p))
    h = 0.5 * trace_function(nk(plane, "x*y*x*y"), rho)
    assert abs(hyperbolic_reduced_hamiltonian(q, p, 1.0) - h) < 1e-9


def test_sinh_form_agrees(gen):
    for tau in (1.0, 0.7, 2j):
        q, p = spread_q(gen, 4) + 3.0, gen.standard_normal(4)
        th, pt = log_variables(q, p)
        assert abs(hyperbolic_sinh_hamiltonian(th, pt, tau) - hyperbolic_reduced_hamiltonian(q, p, tau)) < 1e-10


def test_hyperbolic_tau_zero(gen):
    q, p = spread_q(gen, 3) + 2.0, gen.standard_normal(3)
    assert np.isclose(hyperbolic_reduced_hamiltonian(q, p, 0.0), 0.5 * np.sum((q * p) ** 2))


def test_log_variables_domain():
    with pytest.raises(ValueError):
        log_variables([-1.0, 2.0], [0.0, 0.0])


# Gibbons-Hermsen

def gh_cfg(gen, n, r, tau=1.0):
    f, e = random_spins(n, r, gen)
    return CMConfig(spread_q(gen, n), gen.standard_normal(n), tau=tau, f=f, e=e)


@pytest.mark.parametrize("n,r", [(1, 1), (2, 1), (3, 2), (4, 3)])
def test_gh_point_moment(n, r, gen):
    cfg = gh_cfg(gen, n, r, tau=1.3)
    rho = gh_point(cfg)
    assert np.max(np.abs(moment_map(rho)[0] - 1.3 * np.eye(n))) < 1e-10
    assert rho.quiver == gh_quiver(r)


def test_gh_bad_spins(gen):
    f, e = random_spins(3, 2, gen)
    cfg = CMConfig(spread_q(gen, 3), np.zeros(3), f=2 * f, e=e)
    with pytest.raises(ValueError):
        gh_point(cfg)


def test_gh_free_flow_fixes_spins(gen):
    rho = gh_point(gh_cfg(gen, 3, 2))
    moved = flow_free_exact(rho, 0.7, pair=("a", "a*"))
    for name in ("x", "x*", "y2", "y2*"):
        assert np.array_equal(moved[name], rho[name])
    mu0 = moment_map(rho)
    for t in np.linspace(0, 1, 11):
        for a, b in zip(moment_map(flow_free_exact(rho, t, pair=("a", "a*"))), mu0):
            assert np.max(np.abs(a - b)) < 1e-9


def test_gh_rank_one(gen):
    cfg = gh_cfg(gen, 3, 1)
    rho = gh_point(cfg)
    Y0 = rho["a*"]
    e0 = 0.5 * np.trace(Y0 @ Y0)
    assert np.isfinite(e0)
    for t in (0.2, 0.9):
        Y = flow_free_exact(rho, t, pair=("a", "a*"))["a*"]
        assert abs(0.5 * np.trace(Y @ Y) - e0) < 1e-12


@pytest.mark.parametrize("n,r", [(2, 2), (3, 2), (4, 3), (5, 4)])
def test_gh_reduced_hamiltonian(n, r, gen):
    cfg = gh_cfg(gen, n, r, tau=0.8)
    Y = gh_point(cfg)["a*"]
    assert abs(0.5 * np.trace(Y @ Y) - gh_reduced_hamiltonian(cfg.q, cfg.p, cfg.f, cfg.e, 0.8)) < 1e-8


def test_gh_decoupled_and_single(gen):
    n, r = 3, 3
    f, e = np.eye(n, r, dtype=complex), np.eye(r, n, dtype=complex)
    q, p = spread_q(gen, n), gen.standard_normal(n)
    assert np.isclose(gh_reduced_hamiltonian(q, p, f, e, 1.0), 0.5 * np.sum(p ** 2))
    assert np.isclose(gh_reduced_hamiltonian([0.4], [2.0], [[1.0]], [[1.0]], 1.0), 2.0)


def test_gh_r1_matches_rational_cm(gen):
    # one spin component with <f_i, e_i> = 1 collapses the coupling to -tau^2/2 sum (q_i-q_j)^-2,
    # i.e. the rational CM value at coupling i*tau
    n = 4
    e = gen.standard_normal((1, n))
    f = (1.0 / e).T
    q, p = spread_q(gen, n), gen.standard_normal(n)
    assert np.isclose(gh_reduced_hamiltonian(q, p, f, e, 1.0), cm_hamiltonian(q, p, 1j))


# export

def test_csv_deterministic(gen):
    q, p = spread_q(gen, 3), gen.standard_normal(3)
    rho = cm_point(CMConfig(q, p))
    times = np.linspace(0, 1, 11)

    def run():
        traj = sample_flow(lambda t: flow_free_exact(rho, t), times)
        return trajectory_csv(times, eigen_projection(traj), matrices=traj.states)

    a, b = run(), run()
    assert a == b
    header = a.splitlines()[0].split(",")
    assert header[:7] == ["t", "re_q1", "im_q1", "re_q2", "im_q2", "re_q3", "im_q3"]
    assert len(a.splitlines()) == 12


def test_harmonic_period_value():
    assert math.isclose(harmonic_period(2.0), math.pi)


def test_no_spurious_tracking_warning(gen):
    q, p = spread_q(gen, 3, gap=1.0), gen.standard_normal(3)
    rho = cm_point(CMConfig(q, p))
    with warnings.catch_warnings():
        warnings.simplefilter("error", TrackingWarning)
        eigen_projection(sample_flow(lambda t: flow_free_exact(rho, t), np.linspace(0, 1, 101)))


def test_quartic_flow_closed_form(plane, plane_omega, gen):
    # L = XY is constant along (XYX, -YXY), hence X(t) = exp(tL) X(0)
    q, p = 1.0 + 1.5 * np.arange(3), 0.3 * gen.standard_normal(3)
    rho = cm_point(CMConfig(q, p))
    traj = flow_rk4(hamiltonian_derivation(nk(plane, "1/2*x*y*x*y"), plane_omega), rho, 1.0, 1000)
    L = rho["x"] @ rho["y"]
    w, V = np.linalg.eig(L)
    Xt = V @ np.diag(np.exp(w)) @ np.linalg.inv(V) @ rho["x"]
    end = traj.states[-1]
    assert np.max(np.abs(end["x"] @ end["y"] - L)) < 1e-8 * np.max(np.abs(L))
    assert np.max(np.abs(end["x"] - Xt)) < 1e-8 * np.max(np.abs(Xt))
