"""Threshold sweep: qqpq_theta and cqpq_theta against a linear scan.

The threshold for rank r is the r-th highest utility under each query.

    python3 scripts/effect_of_theta.py --queries 20
"""

import argparse
from pathlib import Path

from qpq.bench import ExperimentConfig, emit_chart, emit_csv, run_experiment, summarize


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--category", default="ANTI")
    ap.add_argument("--n", type=int, default=500_000)
    ap.add_argument("--d", type=int, default=4)
    ap.add_argument("--values", default="1,10,100")
    ap.add_argument("--queries", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    cfg = ExperimentConfig(category=args.category, N=args.n, d=args.d, sweep="theta_rank",
                           values=args.values.split(","), algorithms=("qqpq_theta", "cqpq_theta", "linear_scan"),
                           queries=args.queries, seed=args.seed, workers=args.workers)
    rows = run_experiment(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    emit_csv(rows, out / f"effect_of_theta_{args.category}.csv")
    emit_chart(rows, out / f"effect_of_theta_{args.category}.svg")
    for (algo, r), s in sorted(summarize(rows).items(), key=lambda kv: (kv[0][1], kv[0][0])):
        print(f"rank={r:<4} {algo:>12}: {s['total_ios']:>12.1f} IOs  success {s['success_rate']:.2f}")


if __name__ == "__main__":
    main()
