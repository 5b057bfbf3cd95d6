"""Command line interface.

Exit status: 0 on success, 1 on user error (bad flags, unreadable or
invalid input), 2 on numerical failure (including non-convergence when
``--strict`` is given).  ``SKEWJENSEN_SEED`` overrides the default seed.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import divergences as dv
from .centroids import DEFAULT_MAX_ITER, DEFAULT_TOL, CentroidProblem, solve_centroid
from .clustering import DEFAULT_ALPHAS, LabeledDataset, alpha_sweep, kmeans
from .errors import ConfigurationError, NumericalError, ParseError, SkewJensenError
from .expfam import (
    FAMILY_NAMES,
    NaturalParam,
    bhattacharyya_alpha,
    make_family,
    sym_bhattacharyya,
)
from .generators import GENERATOR_NAMES, make_generator
from .io import IngestionConfig, format_rows, load_histograms, load_labeled, load_matrix, to_json

MEASURES = ("kl", "ekl", "jeffreys", "js", "k", "k-alpha", "js-alpha", "sj", "skl",
            "l-alpha", "s-param", "phi")
PHIS = {
    "neg-log": lambda a: dv.PHI_NEG_LOG,
    "u-log-u": lambda a: dv.PHI_U_LOG_U,
    "jeffreys": lambda a: dv.PHI_JEFFREYS,
    "half-k": lambda a: dv.PHI_HALF_K,
    "js-alpha": dv.phi_js_alpha,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _default_seed():
    env = os.environ.get("SKEWJENSEN_SEED")
    if env is None or not env.strip():
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SKEWJENSEN_SEED must be an integer, got {env!r}") from None


def _write(text: str, output):
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


# --------------------------------------------------------------------------
# subcommands

_ALPHA_MEASURES = {"k-alpha", "js-alpha", "sj", "skl", "l-alpha", "s-param", "phi"}


def _pair_value(args, p, q):
    m, a = args.measure, args.alpha
    if m == "kl":
        return dv.kl(p, q)
    if m == "ekl":
        return dv.ekl(p, q)
    if m == "jeffreys":
        return dv.jeffreys(p, q)
    if m == "js":
        return dv.js(p, q)
    if m == "k":
        return dv.k_div(p, q)
    if m == "k-alpha":
        return dv.k_alpha(p, q, a)
    if m == "js-alpha":
        return dv.js_alpha(p, q, a)
    if m == "sj":
        return float(dv.sym_skew_jensen(args.generator, p, q, a))
    if m == "skl":
        return dv.skl_alpha(p, q, a)
    if m == "l-alpha":
        return dv.l_alpha(p, q, a)
    if m == "s-param":
        return float(dv.s_param(args.generator, p, q, a))
    if m == "phi":
        return dv.phi_divergence(PHIS[args.phi](a), p, q)
    raise ConfigurationError(f"unknown measure {m!r}")


def cmd_div(args):
    if args.measure in ("ekl", "sj", "s-param"):
        rows = list(load_matrix(args.input))
    else:
        rows = load_histograms(args.input, IngestionConfig(epsilon=args.epsilon))
    if len(rows) % 2:
        raise ParseError(f"{args.input}: pairs are consecutive rows, got an odd row count {len(rows)}")
    needs_alpha = (args.measure in _ALPHA_MEASURES - {"phi"}
                   or (args.measure == "phi" and args.phi == "js-alpha"))
    if needs_alpha and args.alpha is None:
        raise ConfigurationError(f"--alpha is required for measure {args.measure}")
    out = []
    for i in range(0, len(rows), 2):
        out.append({
            "row_pair": [i + 1, i + 2],
            "measure": args.measure,
            "alpha": args.alpha if needs_alpha else None,
            "value": _pair_value(args, rows[i], rows[i + 1]),
        })
    _write(to_json(out), args.output)
    return 0


def cmd_profile(args):
    alphas = args.alphas or [0.05, 0.1, 0.25, 0.5]
    ts = np.linspace(0.0, 1.0, args.points)
    rows = dv.scalar_profile(make_generator(args.generator), args.x, args.y, alphas, ts)
    _write("alpha,t,sj\n" + format_rows(rows), args.output)
    return 0


def _param_list(data):
    if isinstance(data, list) and data and all(isinstance(v, (int, float)) for v in data):
        return [data], True
    if isinstance(data, (int, float)):
        return [[data]], True
    if not isinstance(data, list):
        raise ParseError("expected a JSON vector or an array of vectors")
    return [v if isinstance(v, list) else [v] for v in data], False


def cmd_natparam(args):
    items, single = _param_list(_read_json(args.input))
    out = []
    for v in items:
        family = make_family(args.family, len(v) if args.to == "natural" else len(v) + 1)
        conv = family.to_natural(v) if args.to == "natural" else family.to_source(v)
        out.append([float(x) for x in np.ravel(conv)])
    _write(to_json(out[0] if single else out), args.output)
    return 0


def cmd_bhatt(args):
    data = _read_json(args.input)
    if not isinstance(data, list) or not all(isinstance(p, list) and len(p) == 2 for p in data):
        raise ParseError(f"{args.input}: expected an array of [p, q] parameter pairs")
    out = []
    for i, (p, q) in enumerate(data, start=1):
        p, q = np.atleast_1d(np.asarray(p, dtype=float)), np.atleast_1d(np.asarray(q, dtype=float))
        if args.params == "source":
            family = make_family(args.family, p.size)
            tp, tq = family.to_natural(p), family.to_natural(q)
        else:
            family = make_family(args.family, p.size + 1)
            tp, tq = p, q
        tp, tq = NaturalParam(tp, family), NaturalParam(tq, family)
        out.append({
            "pair": i,
            "alpha": args.alpha,
            "bhattacharyya": bhattacharyya_alpha(family, tp, tq, args.alpha),
            "sym_bhattacharyya": sym_bhattacharyya(family, tp, tq, args.alpha),
        })
    _write(to_json(out), args.output)
    return 0


def cmd_centroid(args):
    points = load_matrix(args.input)
    weights = None
    if args.weights:
        w = np.ravel(load_matrix(args.weights))
        if np.any(w <= 0):
            raise ConfigurationError("weights must be positive")
        weights = w / w.sum()
    problem = CentroidProblem(points, weights, args.alpha, args.generator)
    result = solve_centroid(problem, tol=args.tol, max_iter=args.max_iter, init=args.init)
    _write(to_json(result.to_dict()), args.output)
    if args.strict and not result.converged:
        print(f"centroid did not converge within {args.max_iter} iterations", file=sys.stderr)
        return 2
    return 0


def cmd_kmeans(args):
    X = np.asarray(load_histograms(args.input, IngestionConfig(epsilon=args.epsilon)))
    res = kmeans(X, args.k, args.alpha, args.generator, seed=args.seed,
                 max_rounds=args.max_rounds, tol=args.tol, max_iter=args.max_iter)
    _write(to_json({
        "assignments": res.assignments.tolist(),
        "centers": res.centers,
        "objective_trace": res.objective_trace,
        "rounds": res.rounds,
        "converged": res.converged,
    }), args.output)
    if args.strict and not res.converged:
        print(f"k-means did not stabilize within {args.max_rounds} rounds", file=sys.stderr)
        return 2
    return 0


def cmd_sweep(args):
    X, labels = load_labeled(args.input, IngestionConfig(epsilon=args.epsilon))
    report = alpha_sweep(LabeledDataset(X, labels), args.alphas, args.generator,
                         split=args.split, seed=args.seed, insample=args.insample,
                         tol=args.tol, max_iter=args.max_iter, workers=args.workers)
    _write(report.to_csv(), args.output)
    if args.strict and not all(r.converged for r in report.rows):
        print("some class centroids did not converge", file=sys.stderr)
        return 2
    return 0


# --------------------------------------------------------------------------

def build_parser(seed_default: int = 0) -> argparse.ArgumentParser:
    p = _Parser(prog="skewjensen", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def common(sp, alpha=True, generator=True, io=True):
        if alpha:
            sp.add_argument("--alpha", type=float, default=0.5, help="skew parameter (default 0.5)")
        if generator:
            sp.add_argument("--generator", choices=GENERATOR_NAMES, default="shannon",
                            help="convex generator (default shannon)")
        if io:
            sp.add_argument("--input", required=True, help="input file")
            sp.add_argument("--output", default="-", help="output file (default stdout)")

    def solver(sp):
        sp.add_argument("--tol", type=float, default=DEFAULT_TOL, help="CCCP step tolerance")
        sp.add_argument("--max-iter", type=int, default=DEFAULT_MAX_ITER, help="CCCP iteration cap")
        sp.add_argument("--strict", action="store_true", help="exit 2 on non-convergence")

    def smoothing(sp):
        sp.add_argument("--epsilon", type=float, default=1e-9, help="smoothing floor for bins")

    s = sub.add_parser("div", help="divergence between consecutive row pairs of a CSV")
    s.add_argument("--measure", choices=MEASURES, required=True)
    s.add_argument("--alpha", type=float, default=None,
                   help="skew parameter; for s-param the centered value in [-1, 1]")
    s.add_argument("--generator", choices=GENERATOR_NAMES, default="shannon",
                   help="generator for sj and s-param (default shannon)")
    s.add_argument("--phi", choices=sorted(PHIS), default="jeffreys", help="phi generator for --measure phi")
    s.add_argument("--input", required=True, help="CSV, one histogram per row")
    s.add_argument("--output", default="-", help="JSON output (default stdout)")
    smoothing(s)
    s.set_defaults(func=cmd_div)

    s = sub.add_parser("profile", help="tabulate the scalar distance as CSV (alpha,t,sj)")
    s.add_argument("--generator", choices=GENERATOR_NAMES, default="shannon")
    s.add_argument("--alphas", type=_floats, default=None, help="comma-separated alphas in (0, 0.5]")
    s.add_argument("--x", type=float, default=0.9, help="start of the segment")
    s.add_argument("--y", type=float, default=0.1, help="fixed second argument")
    s.add_argument("--points", type=int, default=101, help="number of t samples in [0, 1]")
    s.add_argument("--output", default="-")
    s.set_defaults(func=cmd_profile)

    s = sub.add_parser("natparam", help="convert between source and natural parameters (JSON)")
    s.add_argument("--family", choices=FAMILY_NAMES, required=True)
    s.add_argument("--to", choices=("natural", "source"), required=True)
    s.add_argument("--input", required=True)
    s.add_argument("--output", default="-")
    s.set_defaults(func=cmd_natparam)

    s = sub.add_parser("bhatt", help="skew Bhattacharyya divergence of JSON parameter pairs")
    s.add_argument("--family", choices=FAMILY_NAMES, required=True)
    s.add_argument("--alpha", type=float, default=0.5)
    s.add_argument("--params", choices=("source", "natural"), default="source",
                   help="parametrization of the input pairs")
    s.add_argument("--input", required=True)
    s.add_argument("--output", default="-")
    s.set_defaults(func=cmd_bhatt)

    s = sub.add_parser("centroid", help="CCCP centroid of the rows of a CSV")
    common(s)
    s.add_argument("--init", choices=("arith", "quasi"), default="arith")
    s.add_argument("--weights", default=None, help="CSV of positive weights (normalized on load)")
    solver(s)
    s.set_defaults(func=cmd_centroid)

    s = sub.add_parser("kmeans", help="k-means on histograms")
    common(s)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--seed", type=int, default=seed_default)
    s.add_argument("--max-rounds", type=int, default=100)
    solver(s)
    smoothing(s)
    s.set_defaults(func=cmd_kmeans)

    s = sub.add_parser("sweep", help="nearest-centroid accuracy over a grid of alphas")
    s.add_argument("--alphas", type=_floats, default=list(DEFAULT_ALPHAS))
    s.add_argument("--generator", choices=GENERATOR_NAMES, default="shannon")
    s.add_argument("--seed", type=int, default=seed_default)
    s.add_argument("--input", required=True, help="labeled CSV: label, bins...")
    s.add_argument("--split", type=float, default=0.5, help="train fraction per class")
    s.add_argument("--insample", action="store_true", help="score on the data the centroids came from")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--output", default="-")
    solver(s)
    smoothing(s)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    try:
        parser = build_parser(_default_seed())
    except UsageError as exc:
        print(f"skewjensen: error: {exc}", file=sys.stderr)
        return 1
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"skewjensen: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (SkewJensenError, ValueError) as exc:
        print(f"skewjensen: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
