"""Command-line surface: ad-hoc evaluation, path listings, suite runs.

Three commands. ``eval`` prints a single value (theta, shifted
factorial, edge weight, elliptic binomial, or terminating
very-well-poised series) in the fixed 17-significant-digit complex
format. ``paths`` lists the monotone lattice paths between two points,
optionally weighted, with a closing total line. ``verify`` runs one or
all registered identity suites and reports outcomes as a human summary
plus optional JSON and CSV files.

Complex command-line values are written "re" or "re,im" (comma, no
spaces). Exit codes: 0 success / all suites pass, 1 at least one fail
outcome, 2 usage or configuration error, 3 pole error (with the
offending factor on stderr), 4 scale cap exceeded.

The built-in seed can be overridden by the ELLIPTICA_SEED environment
variable, a config file line ``seed=N`` (via --config), or the --seed
flag; the flag wins over the file, the file over the environment.
"""

from __future__ import annotations

import argparse
import os
import sys
import time

from .closed_forms import EllipticBinomialArgs, elliptic_binomial
from .errors import DomainError, PoleError, ScaleError
from .harness import (
    DEFAULT_SEED,
    SuiteConfig,
    run_suite,
    suite_ids,
)
from .paths import LatticePoint, enumerate_paths, path_weight
from .report import (
    format_complex,
    format_float,
    outcomes_to_csv,
    outcomes_to_json,
    summarize,
)
from .series import VSeriesSpec, eval_V
from .theta import Nome, QPFactorialArgs, ThetaContext, qp_shifted, theta
from .weights import EllipticParams, weight

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_POLE = 3
EXIT_SCALE = 4

ESCALATE_DPS = 40


def _complex_arg(text: str) -> complex:
    """Parse "re" or "re,im" into a complex value."""
    parts = text.split(",")
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(
            f"expected re or re,im, got {text!r}")
    try:
        re = float(parts[0])
        im = float(parts[1]) if len(parts) == 2 else 0.0
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return complex(re, im)


def _point_arg(text: str) -> LatticePoint:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(
            f"expected x,y integers, got {text!r}")
    try:
        return LatticePoint(int(parts[0]), int(parts[1]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="elliptica",
        description="elliptic lattice-path calculus toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("eval", help="evaluate one quantity")
    evsub = ev.add_subparsers(dest="subject", required=True)

    p_theta = evsub.add_parser("theta", help="theta(x; p)")
    p_theta.add_argument("--x", type=_complex_arg, required=True)
    p_theta.add_argument("--p", type=_complex_arg, default=0j)

    p_qp = evsub.add_parser("qpfac", help="(a; q, p)_n")
    p_qp.add_argument("--a", type=_complex_arg, required=True)
    p_qp.add_argument("--n", type=int, required=True)
    p_qp.add_argument("--q", type=_complex_arg, required=True)
    p_qp.add_argument("--p", type=_complex_arg, default=0j)

    p_w = evsub.add_parser("weight", help="edge weight w(n, m)")
    p_w.add_argument("--n", type=int, required=True)
    p_w.add_argument("--m", type=int, required=True)
    p_w.add_argument("--a", type=_complex_arg, required=True)
    p_w.add_argument("--b", type=_complex_arg, required=True)
    p_w.add_argument("--q", type=_complex_arg, required=True)
    p_w.add_argument("--p", type=_complex_arg, default=0j)

    p_eb = evsub.add_parser("ebinom",
                            help="elliptic binomial (l,k) -> (n,m)")
    for flag in ("--l", "--k", "--n", "--m"):
        p_eb.add_argument(flag, type=int, required=True)
    p_eb.add_argument("--a", type=_complex_arg, required=True)
    p_eb.add_argument("--b", type=_complex_arg, required=True)
    p_eb.add_argument("--q", type=_complex_arg, required=True)
    p_eb.add_argument("--p", type=_complex_arg, default=0j)

    p_vs = evsub.add_parser(
        "vseries", help="terminating very-well-poised series")
    p_vs.add_argument("--a1", type=_complex_arg, required=True)
    p_vs.add_argument("--b", type=_complex_arg, action="append",
                      required=True, metavar="RE[,IM]",
                      help="free parameter (repeatable)")
    p_vs.add_argument("--q", type=_complex_arg, required=True)
    p_vs.add_argument("--p", type=_complex_arg, default=0j)
    p_vs.add_argument("--terms", type=int, required=True)
    p_vs.add_argument("--z", type=_complex_arg, default=1 + 0j)

    pa = sub.add_parser("paths", help="list monotone paths u -> v")
    pa.add_argument("--from", dest="src", type=_point_arg, required=True,
                    metavar="X,Y")
    pa.add_argument("--to", dest="dst", type=_point_arg, required=True,
                    metavar="X,Y")
    pa.add_argument("--a", type=_complex_arg, default=0j)
    pa.add_argument("--b", type=_complex_arg, default=0j)
    pa.add_argument("--q", type=_complex_arg, default=None,
                    help="giving q switches on edge weights")
    pa.add_argument("--p", type=_complex_arg, default=0j)

    ve = sub.add_parser("verify", help="run identity suites")
    ve.add_argument("suite", help="registered suite name, or 'all'")
    ve.add_argument("--trials", type=int, default=None)
    ve.add_argument("--seed", type=int, default=None)
    ve.add_argument("--tol", type=float, default=None)
    ve.add_argument("--json", dest="json_path", default=None)
    ve.add_argument("--csv", dest="csv_path", default=None)
    ve.add_argument("--escalate", action="store_true",
                    help="re-run failing trials at extended precision")
    ve.add_argument("--mutate", action="store_true",
                    help="negative control: run every trial off-variety")
    ve.add_argument("--config", dest="config_path", default=None,
                    help="key=value file with seed/trials/tolerance")
    return parser


def _make_ctx(p: complex) -> ThetaContext:
    return ThetaContext(Nome(p))


def cmd_eval(ns: argparse.Namespace) -> int:
    ctx = _make_ctx(ns.p)
    if ns.subject == "theta":
        value = theta(ns.x, ctx)
    elif ns.subject == "qpfac":
        value = qp_shifted(QPFactorialArgs(ns.a, ns.n, ns.q), ctx)
    elif ns.subject == "weight":
        params = EllipticParams(ns.a, ns.b, ns.q, Nome(ns.p))
        value = weight(ns.n, ns.m, params, ctx)
    elif ns.subject == "ebinom":
        params = EllipticParams(ns.a, ns.b, ns.q, Nome(ns.p))
        args = EllipticBinomialArgs(ns.l, ns.k, ns.n, ns.m, params)
        value = elliptic_binomial(args, ctx)
    else:
        spec = VSeriesSpec(ns.a1, tuple(ns.b), ns.q, Nome(ns.p),
                           ns.terms, ns.z)
        value = eval_V(spec, ctx)
    print(format_complex(complex(value)))
    return EXIT_OK


def cmd_paths(ns: argparse.Namespace) -> int:
    listing = enumerate_paths(ns.src, ns.dst)
    origin = f"({ns.src.x},{ns.src.y})"
    if ns.q is None:
        for path in listing:
            print(f"{origin}:{''.join(path.steps)}")
        print(f"total = {len(listing)}")
        return EXIT_OK
    params = EllipticParams(ns.a, ns.b, ns.q, Nome(ns.p))
    ctx = _make_ctx(ns.p)
    total = 0j
    for path in listing:
        value = complex(path_weight(path, params, ctx))
        total += value
        print(f"{origin}:{''.join(path.steps)} {format_complex(value)}")
    print(f"total = {format_complex(total)}")
    return EXIT_OK


def _load_config(path: str) -> dict:
    try:
        text = open(path, encoding="utf-8").read()
    except OSError as exc:
        raise DomainError(f"cannot read config file: {exc}") from None
    settings = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise DomainError(
                f"config line {lineno}: expected key=value, "
                f"got {stripped!r}")
        key, _, raw = stripped.partition("=")
        key, raw = key.strip(), raw.strip()
        if key not in ("seed", "trials", "tol", "tolerance"):
            raise DomainError(
                f"config line {lineno}: unknown key {key!r}")
        try:
            if key == "seed":
                settings["seed"] = int(raw)
            elif key == "trials":
                settings["trials"] = int(raw)
            else:
                settings["tolerance"] = float(raw)
        except ValueError:
            raise DomainError(
                f"config line {lineno}: bad value {raw!r} for "
                f"{key!r}") from None
    return settings


def _resolve_seed(flag_seed, config: dict) -> int:
    if flag_seed is not None:
        return flag_seed
    if "seed" in config:
        return config["seed"]
    env = os.environ.get("ELLIPTICA_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise DomainError(
                f"ELLIPTICA_SEED must be an integer, got {env!r}"
            ) from None
    return DEFAULT_SEED


def cmd_verify(ns: argparse.Namespace) -> int:
    config = _load_config(ns.config_path) if ns.config_path else {}
    seed = _resolve_seed(ns.seed, config)
    trials = ns.trials if ns.trials is not None else config.get("trials")
    tol = ns.tol if ns.tol is not None else config.get("tolerance")
    if ns.suite == "all":
        targets = suite_ids()
    else:
        targets = (ns.suite,)
    dps = ESCALATE_DPS if ns.escalate else None
    outcomes = []
    all_pass = True
    for sid in targets:
        cfg = SuiteConfig(sid, trials=trials, tolerance=tol, seed=seed)
        start = time.perf_counter()
        suite_outcomes = run_suite(cfg, mutate=ns.mutate,
                                   escalate_dps=dps)
        elapsed = time.perf_counter() - start
        outcomes.extend(suite_outcomes)
        stats = summarize(suite_outcomes)
        all_pass = all_pass and stats["aggregate_pass"]
        print(f"{sid}: trials={stats['passes'] + stats['fails']} "
              f"passes={stats['passes']} fails={stats['fails']} "
              f"resampled={stats['resampled']} "
              f"skipped={stats['skipped']} "
              f"max_rel_error={format_float(stats['max_rel_error'])} "
              f"time={elapsed:.3f}s")
    print(f"result: {'pass' if all_pass else 'fail'}")
    if ns.json_path:
        with open(ns.json_path, "w", encoding="utf-8") as fh:
            fh.write(outcomes_to_json(outcomes))
    if ns.csv_path:
        with open(ns.csv_path, "w", encoding="utf-8") as fh:
            fh.write(outcomes_to_csv(outcomes))
    return EXIT_OK if all_pass else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        if ns.command == "eval":
            return cmd_eval(ns)
        if ns.command == "paths":
            return cmd_paths(ns)
        return cmd_verify(ns)
    except PoleError as exc:
        factor = f" [{exc.factor}]" if exc.factor else ""
        print(f"pole error: {exc}{factor}", file=sys.stderr)
        return EXIT_POLE
    except ScaleError as exc:
        print(f"scale error: {exc}", file=sys.stderr)
        return EXIT_SCALE
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
