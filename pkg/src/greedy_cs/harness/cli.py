"""Command line interface.

Exit codes: 0 success, 1 usage or input error, 2 numerical failure,
3 a checked inequality or pursuit invariant was violated.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .. import coherence as coh
from .. import guarantees as gu
from ..dictionary import Observation, SparseVector
from ..errors import (BudgetExceeded, ConfigError, DimensionMismatch,
                      EigenFailure, GreedyCSError, RankDeficient)
from ..io import load_dictionary, read_vector, write_matrix
from ..pursuit import PursuitConfig, SelectionPolicy, womp
from .ensembles import EnsembleSpec, generate_dictionary
from .report import emit_report, records_to_csv
from .sweep import (SEED_ENV, SweepConfig, check_pursuit_invariants,
                    progress_printer, run_sweep, summarize)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_VIOLATION = 0, 1, 2, 3

_NUMERIC_ERRORS = (RankDeficient, EigenFailure, BudgetExceeded)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _emit(obj, out=None):
    text = json.dumps(obj, indent=2, sort_keys=False)
    print(text, file=out or sys.stdout)


def _log(args, msg):
    if not args.quiet:
        print(msg, file=sys.stderr)


def _seed(value):
    env = os.environ.get(SEED_ENV)
    return int(env) if env else value


def _dictionary(args):
    return load_dictionary(args.matrix, renormalize=args.renormalize)


def _signal(args, d):
    if not args.signal:
        raise ConfigError("--signal is required for this check")
    x = read_vector(args.signal)
    if x.size != d:
        raise DimensionMismatch(f"signal has length {x.size}, dictionary has {d} atoms")
    return SparseVector.from_dense(x)


def cmd_gen(args):
    seed = _seed(args.seed)
    spec = EnsembleSpec(args.kind, args.n, args.d, args.scale, seed)
    phi = generate_dictionary(spec)
    write_matrix(args.out, phi.matrix,
                 header=f"kind={spec.kind.value} n={args.n} d={args.d} "
                        f"scale={args.scale!r} seed={seed}")
    _log(args, f"wrote {args.n}x{args.d} dictionary to {args.out}")
    return EXIT_OK


def cmd_coherence(args):
    phi = _dictionary(args)
    out = {"k": args.k, "M": coh.mutual_coherence(phi)}
    if args.brute:
        out["nu_k"] = coh.global_2_coherence_brute(phi, args.k)
        out["method"] = "brute"
    else:
        out["nu_k"] = coh.global_2_coherence(phi, args.k)
        out["method"] = "fast"
    _emit(out)
    return EXIT_OK


def cmd_ric(args):
    phi = _dictionary(args)
    exact = args.exact or (not args.bounds and coh.ric_count(phi.d, args.k) <= args.budget)
    if exact:
        delta, worst = coh.ric_exact(phi, args.k, budget=args.budget, return_support=True)
        _emit({"k": args.k, "delta_k": delta, "mode": "exact",
               "worst_support": [i + 1 for i in worst]})
    else:
        lower, upper = coh.ric_bounds(phi, args.k)
        _emit({"k": args.k, "delta_k": [lower, upper], "mode": "bounds"})
    return EXIT_OK


def cmd_verify(args):
    phi = _dictionary(args)
    what = args.check
    if what == "lemma1":
        rep = coh.lemma1_chain(phi, args.k, budget=args.budget)
        _emit(rep.to_dict())
        return EXIT_OK if rep.holds else EXIT_VIOLATION
    if what == "lemma2":
        a = _signal(args, phi.d)
        w = read_vector(args.noise) if args.noise else None
        b = gu.lemma2_bounds(phi, a, w, epsilon=args.eps, budget=args.budget)
        out = dict(vars(b))
        out.update(upper_holds=b.upper_holds, lower_holds=b.lower_holds, holds=b.holds)
        _emit(out)
        return EXIT_OK if b.holds else EXIT_VIOLATION
    if what == "theorem1":
        a = _signal(args, phi.d)
        _emit(gu.theorem1_check(phi, a, args.rho, args.eps or 0.0, args.budget).to_dict())
        return EXIT_OK
    if what == "corollary1":
        reps = gu.corollary1_check(phi, args.k, args.rho, args.budget)
        _emit([r.to_dict() for r in reps])
        return EXIT_OK
    if what == "corollary2":
        _emit(gu.corollary2_check(phi, args.k, args.budget).to_dict())
        return EXIT_OK
    cmp = gu.compare_with_prior_bound(phi, args.k, args.budget)
    _emit(cmp.to_dict())
    return EXIT_OK if (cmp.new or not cmp.prior) else EXIT_VIOLATION


def cmd_recover(args):
    phi = _dictionary(args)
    f = read_vector(args.signal_obs)
    if f.size != phi.n:
        raise DimensionMismatch(f"observation has length {f.size}, expected {phi.n}")
    cfg = PursuitConfig(args.rho, args.eps, args.max_iter, args.policy)
    res = womp(phi, Observation(f, args.eps), cfg)
    _emit(res.to_dict())
    return EXIT_OK if check_pursuit_invariants(phi, f, res) else EXIT_VIOLATION


def cmd_sweep(args):
    cfg = SweepConfig.load(args.config)
    progress = None if args.quiet else progress_printer()
    records = run_sweep(cfg, progress)
    with open(args.out_csv, "w", newline="") as fh:
        fh.write(records_to_csv(records))
    summary = summarize(records)
    if args.out_summary:
        with open(args.out_summary, "w") as fh:
            json.dump(summary, fh, indent=2)
            fh.write("\n")
    if args.plotdata:
        emit_report(records, "plotdata", args.plotdata, axis=args.axis)
    _log(args, f"{len(records)} records, {summary['violations']} violations, "
               f"{summary['errors']} errored trials")
    return EXIT_VIOLATION if summary["violations"] else EXIT_OK


def build_parser():
    p = _Parser(prog="greedy-cs", description="Greedy sparse recovery toolkit.")
    p.add_argument("--quiet", action="store_true", help="suppress progress output")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    quiet = argparse.ArgumentParser(add_help=False)
    quiet.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    def matrix_args(sp):
        sp.add_argument("--matrix", required=True, help="dictionary CSV file")
        sp.add_argument("--renormalize", action="store_true",
                        help="accept columns that are not unit norm")
        sp.add_argument("--budget", type=int, default=coh.RIC_BUDGET,
                        help="max number of subsets enumerated for delta_k")

    g = sub.add_parser("gen", parents=[quiet], help="generate a random dictionary")
    g.add_argument("--kind", choices=["gaussian", "perturbed-identity"], required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--d", type=int, required=True)
    g.add_argument("--scale", type=float, default=0.0)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("coherence", parents=[quiet], help="mutual coherence and nu_k")
    matrix_args(c)
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--brute", action="store_true", help="use exhaustive enumeration")
    c.set_defaults(func=cmd_coherence)

    r = sub.add_parser("ric", parents=[quiet], help="restricted isometry constant")
    matrix_args(r)
    r.add_argument("--k", type=int, required=True)
    mode = r.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true")
    mode.add_argument("--bounds", action="store_true")
    r.set_defaults(func=cmd_ric)

    v = sub.add_parser("verify", parents=[quiet], help="evaluate a recovery condition")
    v.add_argument("check", choices=["lemma1", "lemma2", "theorem1", "corollary1",
                                     "corollary2", "compare"])
    matrix_args(v)
    v.add_argument("--k", type=int, default=2)
    v.add_argument("--rho", type=float, default=1.0)
    v.add_argument("--eps", type=float, default=None)
    v.add_argument("--signal", help="coefficient vector file (length d)")
    v.add_argument("--noise", help="noise vector file (length n), lemma2 only")
    v.set_defaults(func=cmd_verify)

    rc = sub.add_parser("recover", parents=[quiet], help="run WOMP on an observation")
    matrix_args(rc)
    rc.add_argument("--signal-obs", required=True, help="observation vector file")
    rc.add_argument("--rho", type=float, default=1.0)
    rc.add_argument("--eps", type=float, default=0.0)
    rc.add_argument("--policy", choices=[p.value for p in SelectionPolicy], default="max")
    rc.add_argument("--max-iter", type=int, default=None)
    rc.set_defaults(func=cmd_recover)

    s = sub.add_parser("sweep", parents=[quiet], help="run a randomized sweep from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--out-csv", required=True)
    s.add_argument("--out-summary")
    s.add_argument("--plotdata", help="also write a success-rate table")
    s.add_argument("--axis", default="rho", help="record field used as plot x axis")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _NUMERIC_ERRORS as exc:
        print(f"greedy-cs: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GreedyCSError, OSError, ValueError) as exc:
        print(f"greedy-cs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
