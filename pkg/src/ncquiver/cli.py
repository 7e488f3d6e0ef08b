"""Command line entry point: ``ncquiver <subcommand> ...``.

Exit status 0 on success, 1 on a domain error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import re
import sys
import warnings

import numpy as np

from . import checks
from .calculus import necklace_class, necklace_derivative
from .dynamics import (CMConfig, cm_point, eigen_projection, flow_free_exact,
                       flow_harmonic_exact, flow_rk4, gh_point,
                       gh_reduced_hamiltonian, integrate_cm_direct,
                       order_like_tracks, random_spins, sample_flow,
                       trajectory_csv)
from .repspace import moment_map, random_representation, trace_function
from .symplectic import canonical_two_form, hamiltonian_derivation, poisson_bracket
from .textio import SchemaError, format_poly, load_quiver, parse_poly


class UsageError(Exception):
    pass


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",") if x.strip()])
    except ValueError:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from None


def _write(text: str, out: str | None):
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def cmd_derive(args):
    q = load_quiver(args.quiver)
    f = necklace_class(parse_poly(args.expr, q))
    print(format_poly(necklace_derivative(f, args.arrow)))


def cmd_bracket(args):
    q = load_quiver(args.quiver)
    omega = canonical_two_form(q)
    f = necklace_class(parse_poly(args.f, q))
    g = necklace_class(parse_poly(args.g, q))
    print(format_poly(poisson_bracket(f, g, omega)))


def cmd_hamfield(args):
    q = load_quiver(args.quiver)
    theta = hamiltonian_derivation(necklace_class(parse_poly(args.H, q)), canonical_two_form(q))
    for xi, a in enumerate(q.arrows):
        print(f"{a.name}: {format_poly(theta[xi])}")


def cmd_check(args):
    q = load_quiver(args.quiver)
    results = checks.run_all(q, seed=args.seed, count=args.count)
    ok = True
    for name, passed, detail in results:
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
    return 0 if ok else 1


def cmd_cm_solve(args):
    q0, p0 = _floats(args.q), _floats(args.p)
    if len(q0) != args.n or len(p0) != args.n:
        raise UsageError("--q and --p need exactly n values")
    cfg = CMConfig(q0, p0, args.tau)
    rho = cm_point(cfg)
    times = np.linspace(0.0, args.t_end, args.steps + 1)
    if args.omega0:
        traj = sample_flow(lambda t: flow_harmonic_exact(rho, t, args.omega0), times)
    else:
        traj = sample_flow(lambda t: flow_free_exact(rho, t), times)
    tracks = eigen_projection(traj)
    _, qd, _ = integrate_cm_direct(cfg.q, cfg.p, args.tau, args.t_end, args.steps, args.omega0 or None)
    qd = qd[:, order_like_tracks(cfg.q)]
    dev = np.max(np.abs(tracks - qd), axis=1)
    _write(trajectory_csv(times, tracks, {"direct_q": qd, "deviation": dev}), args.out)
    print(f"max |eigen - direct| = {dev.max():.3e}", file=sys.stderr)


def cmd_gh_solve(args):
    rng = np.random.default_rng(args.seed)
    if args.q:
        q0 = _floats(args.q)
    else:
        q0 = np.sort(rng.uniform(-2, 2, args.n)) + np.arange(args.n)
    p0 = _floats(args.p) if args.p else rng.uniform(-1, 1, args.n)
    if len(q0) != args.n or len(p0) != args.n:
        raise UsageError("--q and --p need exactly n values")
    f, e = random_spins(args.n, args.r, rng)
    cfg = CMConfig(q0, p0, args.tau, f, e)
    rho = gh_point(cfg)
    times = np.linspace(0.0, args.t_end, args.steps + 1)
    traj = sample_flow(lambda t: flow_free_exact(rho, t, pair=("a", "a*")), times)
    tracks = eigen_projection(traj, "a")
    energy = np.array([0.5 * np.trace(s["a*"] @ s["a*"]) for s in traj.states])
    reduced = np.full(len(times), gh_reduced_hamiltonian(cfg.q, cfg.p, f, e, args.tau))
    mu_dev = np.array([np.max(np.abs(moment_map(s)[0] - args.tau * np.eye(args.n))) for s in traj.states])
    _write(trajectory_csv(times, tracks, {"energy": energy, "reduced_H": reduced,
                                          "moment_residual": mu_dev}), args.out)


def cmd_flow(args):
    q = load_quiver(args.quiver)
    omega = canonical_two_form(q)
    h = necklace_class(parse_poly(args.H, q))
    theta = hamiltonian_derivation(h, omega)
    dims = [int(d) for d in args.dim.split(",")]
    if len(dims) == 1:
        dims = dims * len(q.vertices)
    if len(dims) != len(q.vertices):
        raise UsageError("--dim needs one value or one per vertex")
    rho = random_representation(q, dims, np.random.default_rng(args.seed), scale=args.scale)
    traj = flow_rk4(theta, rho, args.t_end, args.steps)
    energy = np.array([trace_function(h, s) for s in traj.states])
    lines = ["t,re_energy,im_energy"]
    for t, en in zip(traj.times, energy):
        lines.append(f"{float(t)!r},{float(en.real)!r},{float(en.imag)!r}")
    _write("\n".join(lines) + "\n", args.out)
    print(f"energy drift = {np.max(np.abs(energy - energy[0])):.3e}", file=sys.stderr)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ncquiver", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("derive", help="necklace derivative of an expression")
    s.add_argument("quiver")
    s.add_argument("expr")
    s.add_argument("arrow")
    s.set_defaults(func=cmd_derive)

    s = sub.add_parser("bracket", help="necklace Poisson bracket")
    s.add_argument("quiver")
    s.add_argument("f")
    s.add_argument("g")
    s.set_defaults(func=cmd_bracket)

    s = sub.add_parser("hamfield", help="Hamiltonian derivation per arrow")
    s.add_argument("quiver")
    s.add_argument("H")
    s.set_defaults(func=cmd_hamfield)

    s = sub.add_parser("check", help="run the randomised identity checks on a quiver")
    s.add_argument("quiver")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--count", type=int, default=20)
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("cm-solve", help="Calogero-Moser by projection, with a direct cross-check")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--q", required=True, help="comma-separated initial positions")
    s.add_argument("--p", required=True, help="comma-separated initial momenta")
    s.add_argument("--omega0", type=float, default=0.0)
    s.add_argument("--t-end", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_cm_solve)

    s = sub.add_parser("gh-solve", help="Gibbons-Hermsen by projection")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--r", type=int, default=2)
    s.add_argument("--tau", type=float, default=1.0)
    s.add_argument("--q", default=None)
    s.add_argument("--p", default=None)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--t-end", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=200)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_gh_solve)

    s = sub.add_parser("flow", help="RK4 flow of a Hamiltonian necklace")
    s.add_argument("quiver")
    s.add_argument("H")
    s.add_argument("--dim", default="2")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--scale", type=float, default=0.5)
    s.add_argument("--t-end", type=float, default=1.0)
    s.add_argument("--steps", type=int, default=1000)
    s.add_argument("--out", default="-")
    s.set_defaults(func=cmd_flow)
    return p


_LIST_OPTS = ("--q", "--p")


def _glue_negative_lists(argv: list[str]) -> list[str]:
    """``--q -1,2`` -> ``--q=-1,2``; argparse would read ``-1,2`` as an option."""
    out = []
    k = 0
    while k < len(argv):
        tok = argv[k]
        if tok in _LIST_OPTS and k + 1 < len(argv) and re.fullmatch(r"-[\d.][\d.,eE+-]*", argv[k + 1]):
            out.append(f"{tok}={argv[k + 1]}")
            k += 2
            continue
        out.append(tok)
        k += 1
    return out


def cli_run(argv=None) -> int:
    parser = build_parser()
    argv = _glue_negative_lists(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            status = args.func(args)
    except UsageError as exc:
        print(f"ncquiver: usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, ZeroDivisionError, ArithmeticError, SchemaError,
            OSError, RuntimeError, AssertionError) as exc:
        print(f"ncquiver: error: {exc}", file=sys.stderr)
        return 1
    return status or 0


def main():
    sys.exit(cli_run())


if __name__ == "__main__":
    main()
