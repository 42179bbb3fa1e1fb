"""Command-line interface.

Subcommands: gen, discover, eval, experiment, percentile, bif sample, plot.
Exit codes: 0 success, 1 usage error, 2 data or validation error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .bifio import bn_sample, bn_truth, read_bif
from .discovery import (
    DiscoveryConfig,
    anm_baseline,
    enumerate_discover,
    peel,
    percentile,
)
from .errors import EntcauseError
from .experiments import load_config, plot, run_experiment, write_results
from .graphs import (
    dag_from_json,
    dag_to_json,
    named_graph,
    shd,
    skeleton_from_json,
    skeleton_to_json,
)
from .probcore import Dataset, make_rng
from .scm import NoiseSpec, anm_scm, random_scm, sample

__all__ = ["main"]


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_shared(p, *, seed=True, alpha=True, measure=True, smoothing=True):
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if alpha:
        p.add_argument("--alpha", type=float, default=0.05)
    if measure:
        p.add_argument("--measure", default="total",
                       choices=("exogenous", "marginal", "total"))
    if smoothing:
        p.add_argument("--smoothing", type=float, default=0.0)


def _read_text(path):
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _schema_of(path):
    return path + ".schema.json"


def _load_dataset(path):
    schema = _schema_of(path)
    return Dataset.from_csv(path, schema_path=schema
                            if os.path.exists(schema) else None)


def _write_text(path, text):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _cmd_gen(args):
    rng = make_rng(args.seed)
    truth = named_graph(args.graph, rng)
    if args.model == "anm":
        scm = anm_scm(truth, args.n_states, args.half_width, rng)
    else:
        spec = NoiseSpec.dirichlet(args.noise, args.noise_tol)
        scm = random_scm(truth, args.n_states, args.m_states, spec,
                         args.hes, rng)
    data = sample(scm, args.samples, rng)
    data.to_csv(args.out, schema_path=_schema_of(args.out))
    if args.truth_out:
        _write_text(args.truth_out, dag_to_json(truth) + "\n")
    if args.skeleton_out:
        _write_text(args.skeleton_out,
                    skeleton_to_json(truth.skeleton()) + "\n")
    return 0


def _discovery_config(args, cap=None):
    return DiscoveryConfig(
        measure=args.measure, ci="g-test", alpha=args.alpha,
        smoothing=args.smoothing, cap=cap if cap else 10**6, seed=args.seed)


def _cmd_discover(args):
    data = _load_dataset(args.data)
    skeleton = skeleton_from_json(_read_text(args.skeleton))
    config = _discovery_config(args, args.cap)
    if args.method == "enumerate":
        dag = enumerate_discover(data, skeleton, config)[0]
    elif args.method == "peel":
        dag = peel(data, config)
    else:
        dag = anm_baseline(data, skeleton, args.alpha)
    text = dag_to_json(dag) + "\n"
    if args.out:
        _write_text(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_eval(args):
    truth = dag_from_json(_read_text(args.truth))
    est = dag_from_json(_read_text(args.est))
    print(shd(est, truth))
    return 0


def _cmd_experiment(args):
    config = load_config(_read_text(args.config))
    records = run_experiment(config, jobs=args.jobs)
    write_results(records, args.out)
    n_err = sum(1 for r in records if r.error)
    print(f"{len(records)} rows ({n_err} errored) -> {args.out}")
    return 0


def _cmd_percentile(args):
    data = _load_dataset(args.data)
    truth = dag_from_json(_read_text(args.truth))
    skeleton = (skeleton_from_json(_read_text(args.skeleton))
                if args.skeleton else truth.skeleton())
    config = _discovery_config(args, args.cap)
    value = percentile(data, truth, skeleton, config)
    print(f"{value:.4f}")
    return 0


def _cmd_bif_sample(args):
    net = read_bif(args.file)
    rng = make_rng(args.seed)
    data = bn_sample(net, args.samples, rng)
    data.to_csv(args.out, schema_path=_schema_of(args.out))
    if args.truth_out:
        _write_text(args.truth_out, dag_to_json(bn_truth(net)) + "\n")
    if args.states_out:
        names = {n: list(s) for n, s in zip(net.names, net.states)}
        _write_text(args.states_out, json.dumps(names, indent=2) + "\n")
    return 0


def _cmd_plot(args):
    plot(args.results, args.x, args.y, args.group, args.out)
    return 0


def build_parser():
    top = _Parser(prog="entcause",
                  description="entropic causal discovery toolkit")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[], help="sample a synthetic SCM")
    p.add_argument("--graph", default="triangle")
    p.add_argument("--model", default="unconstrained",
                   choices=("unconstrained", "anm"))
    p.add_argument("--n-states", type=int, default=10)
    p.add_argument("--m-states", type=int, default=16)
    p.add_argument("--noise", type=float, default=1.0,
                   help="exogenous entropy target in bits")
    p.add_argument("--noise-tol", type=float, default=0.05)
    p.add_argument("--hes", action="store_true",
                   help="high-entropy sources (3.3-bit target)")
    p.add_argument("--half-width", type=int, default=1,
                   help="cyclic noise half-width for --model anm")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--truth-out")
    p.add_argument("--skeleton-out")
    _add_shared(p, alpha=False, measure=False, smoothing=False)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("discover", help="run one discovery method")
    p.add_argument("--data", required=True)
    p.add_argument("--skeleton", required=True)
    p.add_argument("--method", default="enumerate",
                   choices=("enumerate", "peel", "anm-baseline"))
    p.add_argument("--cap", type=int, default=10**6)
    p.add_argument("--out")
    _add_shared(p)
    p.set_defaults(func=_cmd_discover)

    p = sub.add_parser("eval", help="SHD between two graph JSON files")
    p.add_argument("--truth", required=True)
    p.add_argument("--est", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("experiment", help="run a config grid to CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("percentile",
                       help="rank the true graph among orientations")
    p.add_argument("--data", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--skeleton")
    p.add_argument("--cap", type=int, default=10**6)
    _add_shared(p)
    p.set_defaults(func=_cmd_percentile)

    p = sub.add_parser("bif", help="Bayesian-network file operations")
    bif_sub = p.add_subparsers(dest="bif_command", required=True)
    q = bif_sub.add_parser("sample", help="forward-sample a .bif network")
    q.add_argument("--file", required=True)
    q.add_argument("--samples", type=int, required=True)
    q.add_argument("--out", required=True)
    q.add_argument("--truth-out")
    q.add_argument("--states-out")
    _add_shared(q, alpha=False, measure=False, smoothing=False)
    q.set_defaults(func=_cmd_bif_sample)

    p = sub.add_parser("plot", help="mean curves with SE whiskers to SVG")
    p.add_argument("--results", required=True)
    p.add_argument("--x", default="noise")
    p.add_argument("--y", default="shd")
    p.add_argument("--group", default="method")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_plot)

    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except EntcauseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
