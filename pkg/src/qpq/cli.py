"""Command line: ``qpq {gen,query,bench,validate,bounds}``.

Exit status is 0 on success, 1 when a validation check fails and 2 for
configuration errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

from . import algorithms as alg
from .baselines import bound, kth_highest, linear_scan, quick_select
from .bench import ALGORITHMS, ConfigError, ExperimentConfig, emit_chart, emit_csv, run_experiment, summarize, sweep_column
from .dataset import generate_synthetic, load_csv, random_query
from .engine import BACKENDS
from .qram import IoPolicy, Qram
from .rng import make_rng
from .validation import SUITES, run_validation


def _dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", help="CSV file (header row, numeric columns)")
    p.add_argument("--columns", help="comma-separated CSV columns to use")
    p.add_argument("--category", choices=("ANTI", "CORR", "INDE"), type=str.upper)
    p.add_argument("--n", type=int, help="number of tuples")
    p.add_argument("--d", type=int, help="number of attributes")
    p.add_argument("--seed", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qpq", description="Quantum preference query simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic dataset as CSV")
    _dataset_args(g)
    g.add_argument("--n-a", type=int, default=16)
    g.add_argument("--out", required=True)

    q = sub.add_parser("query", help="run one query and print the result and IO ledger")
    _dataset_args(q)
    q.add_argument("--algo", choices=ALGORITHMS, default="cqpq_k")
    q.add_argument("--k", type=int, default=10)
    q.add_argument("--theta-rank", type=int, help="threshold = utility of the rank-th best tuple")
    q.add_argument("--theta", type=int, help="explicit utility threshold")
    q.add_argument("--query-seed", type=int, default=0, help="seed of the random utility function")
    q.add_argument("--backend", choices=BACKENDS, default="collapsed")
    q.add_argument("--retries", type=int, default=alg.DEFAULT_RETRIES)
    q.add_argument("--io-policy", default="")

    b = sub.add_parser("bench", help="run a parameter sweep and write CSV / SVG")
    b.add_argument("--config", help="key=value config file")
    _dataset_args(b)
    b.add_argument("--k", type=int)
    b.add_argument("--theta-rank", type=int, help="alias of --k for threshold algorithms")
    b.add_argument("--algo", help="comma-separated algorithms")
    b.add_argument("--sweep", help="k | theta_rank | d | N | category")
    b.add_argument("--values", help="comma-separated sweep values")
    b.add_argument("--queries", type=int)
    b.add_argument("--retries", type=int)
    b.add_argument("--io-policy")
    b.add_argument("--backend", choices=BACKENDS)
    b.add_argument("--workers", type=int)
    b.add_argument("--out", help="CSV output path")
    b.add_argument("--chart", help="SVG chart output path")

    v = sub.add_parser("validate", help="run the cross-validation suites")
    v.add_argument("--suite", action="append", choices=SUITES, help="repeatable; default all")
    v.add_argument("--quick", action="store_true", help="smaller sample sizes")
    v.add_argument("--seed", type=int, default=0)

    bd = sub.add_parser("bounds", help="print the expected-IO bounds")
    bd.add_argument("--n", type=int, required=True)
    bd.add_argument("--k", type=int, required=True)
    return parser


def _load_dataset(args):
    if args.dataset:
        if not args.columns:
            raise ConfigError("--dataset needs --columns")
        return load_csv(args.dataset, args.columns.split(","))
    return generate_synthetic(args.category or "ANTI", args.n or 10_000, args.d or 4, args.seed or 0)


def cmd_gen(args) -> int:
    ds = generate_synthetic(args.category or "ANTI", args.n or 10_000, args.d or 4, args.seed or 0, args.n_a)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"a{j}" for j in range(ds.d)])
        w.writerows(ds.attrs.tolist())
    print(f"wrote {ds.N} tuples x {ds.d} attributes to {args.out}")
    return 0


def cmd_query(args) -> int:
    ds = _load_dataset(args)
    policy = IoPolicy.parse(args.io_policy)
    f = random_query(ds.d, args.query_seed, n_a=ds.n_a)
    u = f.evaluate_many(ds.attrs)
    rng = make_rng(args.seed or 0, "query-cli")
    qram = Qram(ds)
    if args.theta is not None:
        theta = args.theta
    else:
        theta = kth_highest(u, args.theta_rank or args.k)
    opts = dict(policy=policy, rng=rng, backend=args.backend)
    report = {"algorithm": args.algo, "dataset": ds.name, "N": ds.N, "d": ds.d}
    if args.algo == "qqpq_theta":
        out = alg.qqpq_theta(qram, f, theta, **opts)
    elif args.algo == "cqpq_theta":
        out = alg.cqpq_theta(qram, f, theta, retries=args.retries, **opts)
    elif args.algo == "cqpq_k":
        out = alg.cqpq_k(qram, f, args.k, retries=args.retries, **opts)
    elif args.algo == "qqpq_k":
        out = alg.qqpq_k(qram, f, args.k, retries=args.retries, **opts)
    elif args.algo == "linear_scan":
        out = None
        report["result"] = linear_scan(ds, f, theta, qram.ledger, policy)
    else:
        out = None
        report["result"] = quick_select(ds, f, args.k, qram.ledger, rng, policy)
    if args.algo in ("qqpq_theta", "cqpq_theta", "linear_scan"):
        report["theta"] = theta
    if out is not None:
        report["kind"] = out.kind
        report["passes"] = out.passes
        if out.items is not None:
            report["result"] = out.items
        elif out.handle is not None:
            report["superposition"] = sorted(out.handle.indices.tolist())
    report["ledger"] = qram.ledger.as_dict()
    report["total_ios"] = qram.ledger.total
    print(json.dumps(report, indent=2, default=int))
    return 0


def cmd_bench(args) -> int:
    text = Path(args.config).read_text() if args.config else ""
    overrides = {
        "category": args.category, "N": args.n, "d": args.d, "seed": args.seed,
        "k": args.theta_rank if args.theta_rank is not None else args.k,
        "algorithms": args.algo, "sweep": args.sweep, "values": args.values, "queries": args.queries,
        "retries": args.retries, "io_policy": args.io_policy, "backend": args.backend,
        "workers": args.workers, "csv": args.dataset, "columns": args.columns,
    }
    cfg = ExperimentConfig.from_text(text, **overrides)
    if args.values is None and "values" not in text:
        cfg = replace(cfg, values=(getattr(cfg, _sweep_field(cfg.sweep)),))
    rows = run_experiment(cfg)
    if args.out:
        emit_csv(rows, args.out)
    x = sweep_column(cfg.sweep)
    if args.chart:
        emit_chart(rows, args.chart, x=x)
    for (a, v), s in sorted(summarize(rows, x).items(), key=lambda kv: (isinstance(kv[0][1], str), kv[0][1], kv[0][0])):
        print(f"{x}={v} {a:>13}: mean total IOs {s['total_ios']:.1f} "
              f"(quantum {s['quantum_ios']:.1f}, classical {s['classical_ios']:.1f}, pq {s['pq_ios']:.1f}), "
              f"success {s['success_rate']:.2f}")
    return 0


def _sweep_field(sweep: str) -> str:
    return {"k": "k", "theta_rank": "k", "d": "d", "N": "N", "category": "category"}[sweep]


def cmd_validate(args) -> int:
    results = run_validation(args.suite or SUITES, quick=args.quick, seed=args.seed)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else 1


def cmd_bounds(args) -> int:
    for t in ("T1", "T2", "T3"):
        print(f"{t} N={args.n} k={args.k}: {bound(t, args.n, args.k):.3f}")
    return 0


COMMANDS = {"gen": cmd_gen, "query": cmd_query, "bench": cmd_bench, "validate": cmd_validate, "bounds": cmd_bounds}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, ValueError, OSError) as e:
        print(f"qpq: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
