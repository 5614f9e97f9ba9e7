"""Command line entry point.

Exit codes: 0 success / member / all checks pass, 1 usage or config error,
2 non-member or failed check.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from . import __version__
from .environments import GainFileError, Noise, StochasticInstance, gaps, load_gains
from .experiments import (
    SUITES,
    ConfigError,
    ExperimentConfig,
    GridSpec,
    fig1,
    fig1_config,
    fig2,
    fig2_config,
    parse_bounds,
    parse_number,
    parse_vector,
    run_suite,
    write_csv,
)
from .frontier import (
    BoundVector,
    InfeasibleBoundError,
    contains,
    harmonic_point,
    lower_bound_certificate,
    power_point,
    uniform_point,
)
from .simulation import PolicySpec, child_seed, monte_carlo, run_adversarial, run_episode
from .verification import report_rows

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)
    p.add_argument("--out")
    p.add_argument("--config", help="JSON config file; flags override its fields")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="paretobandit", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name in ("fig1", "fig2"):
        p = sub.add_parser(name, help=f"reproduce {name} as CSV")
        _common(p)
        p.add_argument("--b", help="bound spec for Unbalanced MOSS")
        p.add_argument("--grid", help="start,stop,step for delta")

    fr = sub.add_parser("frontier", help="achievable-set geometry")
    fsub = fr.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = fsub.add_parser("check", help="membership of a bound vector")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--b", required=True)
    p = fsub.add_parser("point", help="canonical frontier point")
    p.add_argument("--kind", choices=("uniform", "harmonic", "power"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--b1", help="favoured-arm bound (harmonic)")
    p.add_argument("--p", help="exponent (power)")
    p.add_argument("--precision", type=int, default=4)
    p = fsub.add_parser("certificate", help="lower-bound certificate for a regret vector")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", required=True)

    p = sub.add_parser("verify", help="statistical checks of the bounds")
    p.add_argument("suite", choices=SUITES)
    _common(p)

    p = sub.add_parser("simulate", help="Monte Carlo run of one policy on one instance")
    _common(p)
    p.add_argument("--policy", required=True, choices=("umoss", "uucb", "ucb", "exp3g", "moss"))
    p.add_argument("--means", help="comma-separated arm means")
    p.add_argument("--noise", default="gaussian", choices=[m.value for m in Noise])
    p.add_argument("--b", help="bound spec (umoss, uucb)")
    p.add_argument("--ucb-eps", type=float, default=0.05)
    p.add_argument("--b1", help="favoured-arm bound (exp3g)")
    p.add_argument("--gains", help="gain CSV (exp3g)")
    p.add_argument("--trace", help="write the trace of replication 0 to this CSV")
    return parser


def _figure_config(args, base: ExperimentConfig) -> ExperimentConfig:
    cfg = base
    if args.config:
        cfg = ExperimentConfig.load(args.config, cfg)
    over = {k: v for k, v in (("n", args.n), ("K", args.k), ("reps", args.reps), ("seed", args.seed),
                              ("threads", args.threads), ("out", args.out), ("b", args.b))
            if v is not None}
    if args.grid:
        vals = parse_vector(args.grid, name="grid")
        if len(vals) != 3:
            raise ConfigError("grid: expected start,stop,step")
        over["grid"] = GridSpec(*vals)
    return dataclasses.replace(cfg, **over).validate()


def _emit(cfg_out, meta, header, rows) -> None:
    write_csv(cfg_out if cfg_out else sys.stdout, meta, header, rows)


def cmd_figure(args) -> int:
    base = fig1_config() if args.command == "fig1" else fig2_config()
    cfg = _figure_config(args, base)
    res = (fig1 if args.command == "fig1" else fig2)(cfg)
    _emit(cfg.out, cfg.resolved(), res.header, res.rows)
    return EXIT_OK


def _print_report(bv: BoundVector, rep, precision: int | None = None) -> None:
    fmt = (lambda x: f"{x:.{precision}f}") if precision is not None else repr
    print(",".join(fmt(x) for x in bv.bounds))
    print("member: " + ("true" if rep.member else "false"))
    print("slack: " + ",".join(repr(s) for s in rep.slack))


def cmd_frontier(args) -> int:
    if args.action == "check":
        vals = parse_vector(args.b, args.n, name="b")
        try:
            bv = BoundVector(args.n, tuple(vals))
        except ValueError as exc:
            raise ConfigError(f"b: {exc}") from None
        rep = contains(bv)
        _print_report(bv, rep)
    elif args.action == "point":
        if args.kind == "uniform":
            bv = uniform_point(args.n, args.k)
        elif args.kind == "harmonic":
            if args.b1 is None:
                raise UsageError("--b1 is required for --kind harmonic")
            bv = harmonic_point(parse_number(args.b1, args.n), args.n, args.k)
        else:
            if args.p is None:
                raise UsageError("--p is required for --kind power")
            bv = power_point(parse_number(args.p), args.n, args.k)
        rep = contains(bv)
        _print_report(bv, rep, args.precision)
    else:
        r = parse_vector(args.r, args.n, name="r")
        rep = lower_bound_certificate(r, args.n)
        cert = np.minimum(float(args.n), 8.0 * (np.asarray(r) + len(r)))
        _print_report(BoundVector(args.n, tuple(cert)), rep)
    return EXIT_OK if rep.member else EXIT_NEGATIVE


def cmd_verify(args) -> int:
    seed = args.seed if args.seed is not None else 1
    n = args.n if args.n is not None else 5000
    reports = run_suite(args.suite, seed=seed, reps=args.reps, threads=args.threads or 1, n=n)
    meta = {"suite": args.suite, "seed": seed, "reps": args.reps, "n": n, "version": __version__}
    rows = report_rows(reports)
    text = sys.stdout if args.out else sys.stderr
    for r in reports:
        print(r.text(), file=text)
    _emit(args.out, meta, rows[0], rows[1:])
    failed = [r for r in reports if r.status == "fail"]
    inconclusive = [r for r in reports if r.status == "inconclusive"]
    print(f"{len(reports)} checks: {len(failed)} failed, {len(inconclusive)} inconclusive", file=text)
    return EXIT_NEGATIVE if failed else EXIT_OK


def cmd_simulate(args) -> int:
    seed = args.seed if args.seed is not None else 1
    reps = args.reps if args.reps is not None else 2000
    threads = args.threads or 1
    if args.policy == "exp3g":
        if not args.gains or args.b1 is None:
            raise UsageError("exp3g needs --gains and --b1")
        gains = load_gains(args.gains)
        B1 = parse_number(args.b1, gains.n)
        est = run_adversarial(PolicySpec("exp3g", B1=B1), gains, reps, seed, threads)
        meta = {"policy": "exp3g", "B1": B1, "gains": args.gains, "n": gains.n, "K": gains.K,
                "reps": reps, "seed": seed, "version": __version__}
        header = ["arm", "mean_pulls"]
        rows = [[a + 1, est.mean_pulls[a]] for a in range(gains.K)]
        rows.append(["regret", est.regret])
        rows.append(["stderr", est.stderr])
        _emit(args.out, meta, header, rows)
        return EXIT_OK
    if not args.means:
        raise UsageError("--means is required for index policies")
    means = parse_vector(args.means, name="means")
    inst = StochasticInstance(tuple(means), Noise(args.noise))
    n = args.n if args.n is not None else 5000
    K = inst.K
    if args.k is not None and args.k != K:
        raise ConfigError(f"k: --k {args.k} disagrees with {K} means")
    if args.policy == "moss":
        policy = PolicySpec.moss(n, K)
    elif args.policy == "ucb":
        policy = PolicySpec("ucb", ucb_eps=args.ucb_eps)
    else:
        policy = PolicySpec(args.policy, parse_bounds(args.b or "uniform", n, K), args.ucb_eps)
    est = monte_carlo(policy, inst, n, reps, seed, threads)
    meta = {"policy": policy.describe(), "means": list(inst.means), "noise": inst.noise.value,
            "n": n, "reps": reps, "seed": seed, "version": __version__}
    header = ["arm", "mean", "gap", "mean_pulls", "regret", "stderr"]
    g = gaps(inst)
    rows = [[a + 1, inst.means[a], g.delta[a], est.mean_pulls[a], est.mean[a], est.stderr[a]]
            for a in range(K)]
    _emit(args.out, meta, header, rows)
    if args.trace:
        ep = run_episode(policy, inst, n, child_seed(seed, 0), trace=True)
        trows = [[t + 1, int(a) + 1, x] for t, (a, x) in enumerate(zip(ep.chosen_arms, ep.rewards))]
        write_csv(args.trace, dict(meta, replication=0), ["step", "arm", "reward"], trows)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("fig1", "fig2"):
            return cmd_figure(args)
        if args.command == "frontier":
            return cmd_frontier(args)
        if args.command == "verify":
            return cmd_verify(args)
        return cmd_simulate(args)
    except (ConfigError, UsageError, InfeasibleBoundError, GainFileError) as exc:
        print(f"paretobandit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"paretobandit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
