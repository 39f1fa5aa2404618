"""Sweeps over N, d and the data category for cqpq_k vs quickselect."""

import argparse
from pathlib import Path

from qpq.bench import ExperimentConfig, emit_chart, emit_csv, run_experiment, summarize, sweep_column

SWEEPS = {
    "N": "62500,125000,250000,500000,1000000",
    "d": "2,3,4,5,6",
    "category": "ANTI,CORR,INDE",
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sweep", choices=sorted(SWEEPS), action="append")
    ap.add_argument("--queries", type=int, default=100)
    ap.add_argument("--k", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results")
    args = ap.parse_args()

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for sweep in args.sweep or sorted(SWEEPS):
        cfg = ExperimentConfig(sweep=sweep, values=SWEEPS[sweep].split(","), k=args.k, queries=args.queries,
                               algorithms=("cqpq_k", "quick_select"), seed=args.seed, workers=args.workers)
        rows = run_experiment(cfg)
        x = sweep_column(sweep)
        emit_csv(rows, out / f"effect_of_{sweep}.csv")
        emit_chart(rows, out / f"effect_of_{sweep}.svg", x=x)
        for (algo, v), s in summarize(rows, x).items():
            print(f"{sweep}={v} {algo:>12}: {s['total_ios']:>12.1f} IOs  success {s['success_rate']:.2f}")


if __name__ == "__main__":
    main()
