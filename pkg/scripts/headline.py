"""Speedup of the quantum queries over their classical counterparts at N = 2^19.

Prints the mean total IOs per algorithm, the two ratios, and the same
ratios under the iteration-only view (post-selection loads not charged).
"""

import argparse
import time

from qpq.bench import ExperimentConfig, run_experiment, summarize


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2 ** 19)
    ap.add_argument("--queries", type=int, default=100)
    ap.add_argument("--retries", type=int, default=3)
    ap.add_argument("--seed", type=int, default=8)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    t0 = time.perf_counter()
    means = {}
    for policy in ("", "postselect=0"):
        cfg = ExperimentConfig(category="ANTI", N=args.n, d=4, k=10, queries=args.queries, seed=args.seed,
                               retries=args.retries, io_policy=policy, workers=args.workers,
                               algorithms=("qqpq_theta", "cqpq_theta", "linear_scan", "cqpq_k", "quick_select"))
        means[policy] = {a: s["total_ios"] for (a, _), s in summarize(run_experiment(cfg)).items()}
    for policy, m in means.items():
        print(f"policy [{policy or 'default'}]")
        for a, v in m.items():
            print(f"  {a:>12}: {v:>12.1f}")
        print(f"  linear_scan / qqpq_theta  = {m['linear_scan'] / m['qqpq_theta']:.1f}x")
        print(f"  linear_scan / cqpq_theta  = {m['linear_scan'] / m['cqpq_theta']:.1f}x")
        print(f"  quick_select / cqpq_k     = {m['quick_select'] / m['cqpq_k']:.1f}x")
    print(f"{time.perf_counter() - t0:.0f}s")


if __name__ == "__main__":
    main()
