"""Cross-checks run by ``qpq validate``; each returns a :class:`CheckResult`."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import algorithms as alg
from .baselines import BoundReport, kth_highest
from .dataset import Dataset, UtilityFunction, random_query
from .engine import DenseState, grover_iteration, init_uniform
from .qram import IoLedger, Qram
from .rng import make_rng

SUITES = ("backend-equivalence", "amplitude-closed-form", "lemma1", "bounds")


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail} ({self.seconds:.1f}s)"


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(np.asarray(p) - np.asarray(q)).sum())


def tiny_configs(max_N: int = 8, seed: int = 0, d: int = 2, n_a: int = 2, n_u: int = 2):
    """(qram, f, theta, iterations) tuples on register widths small enough for the gate backend."""
    rng = make_rng(seed, "tiny")
    for N in range(1, max_N + 1):
        attrs = rng.integers(0, 1 << n_a, size=(N, d))
        ds = Dataset(attrs, n_a=n_a, name=f"tiny-{N}")
        w = rng.dirichlet(np.ones(d))
        f = UtilityFunction.linear(w / w.sum(), n_a=n_a, n_u=n_u)
        for theta in range(1 << n_u):
            for j in range(4):
                yield Qram(ds), f, theta, j


def backend_distributions(qram: Qram, f: UtilityFunction, theta: int, iterations: int):
    """Analytic P(index, aux) from all three backends on the gate backend's 2**n space."""
    gate = init_uniform(qram, f, theta, "gate")
    space = gate.space
    states = [init_uniform(qram, f, theta, "collapsed", space=space),
              init_uniform(qram, f, theta, "dense", space=space), gate]
    ledger = IoLedger()
    for s in states:
        grover_iteration(s, ledger, count=iterations)
    return [s.joint_distribution() for s in states]


def check_backend_equivalence(max_N: int = 8, seed: int = 0, tol: float = 1e-9) -> CheckResult:
    t0 = time.perf_counter()
    worst, n = 0.0, 0
    for qram, f, theta, j in tiny_configs(max_N, seed):
        c, d, g = backend_distributions(qram, f, theta, j)
        worst = max(worst, total_variation(c, d), total_variation(c, g), total_variation(d, g))
        n += 1
    return CheckResult("backend-equivalence", worst < tol, f"{n} configs, max TV {worst:.2e} (< {tol:g})",
                       time.perf_counter() - t0)


def closed_form_error(N: int, k: int, max_s: int, rng: np.random.Generator) -> float:
    """Max |dense good amplitude - sin((2s+1) t)| over s = 0..max_s."""
    good = rng.choice(N, size=k, replace=False)
    state = DenseState(N, good, np.zeros(N, dtype=np.int64))
    t = math.asin(math.sqrt(k / N))
    worst = abs(state.good_amplitude() - math.sin(t))
    for s in range(1, max_s + 1):
        state.iterate()
        worst = max(worst, abs(state.good_amplitude() - math.sin((2 * s + 1) * t)))
    return worst


def check_closed_form(max_N: int = 256, max_s: int = 50, tol: float = 1e-10, seed: int = 0) -> CheckResult:
    t0 = time.perf_counter()
    rng = make_rng(seed, "closed-form")
    worst = max(closed_form_error(N, k, max_s, rng) for N in range(1, max_N + 1) for k in range(1, N + 1))
    return CheckResult("amplitude-closed-form", worst < tol,
                       f"N<={max_N}, s<={max_s}, max error {worst:.2e} (< {tol:g})", time.perf_counter() - t0)


def lemma1_frequencies(N: int = 100, k: int = 5, runs: int = 20_000, ranks=(10, 20, 50), seed: int = 0,
                       retries: int = alg.DEFAULT_RETRIES) -> dict[int, float]:
    """How often the rank-i tuple is ever pushed into cqpq_k's queue.

    Utilities are a random permutation of 0..N-1, so ranks are unambiguous.
    """
    hits = {i: 0 for i in ranks}
    for run in range(runs):
        rng = make_rng(seed, "lemma1", run)
        utilities = rng.permutation(N)
        ds = Dataset(utilities.reshape(-1, 1), n_a=max(1, (N - 1).bit_length()))
        f = UtilityFunction.linear([1.0], n_a=ds.n_a, n_u=ds.n_a, scale=1)
        out = alg.cqpq_k(Qram(ds), f, k, retries=retries, rng=rng)
        pushed = set(out.trace)
        for i in ranks:
            if int(np.flatnonzero(utilities == N - i)[0]) in pushed:
                hits[i] += 1
    return {i: hits[i] / runs for i in ranks}


def check_lemma1(N: int = 100, k: int = 5, runs: int = 20_000, ranks=(10, 20, 50), tol: float = 0.03,
                 seed: int = 0) -> CheckResult:
    t0 = time.perf_counter()
    freq = lemma1_frequencies(N, k, runs, ranks, seed)
    dev = {i: abs(freq[i] - alg.lemma1_probability(i, k, N)) for i in ranks}
    detail = ", ".join(f"P({i})={freq[i]:.3f} vs {alg.lemma1_probability(i, k, N):.3f}" for i in ranks)
    return CheckResult("lemma1", max(dev.values()) <= tol, detail, time.perf_counter() - t0)


def bound_reports(N: int = 4096, trials: int = 100, seed: int = 0) -> list[BoundReport]:
    """Observed mean IOs of the three analysed queries next to their bounds.

    Quantum reads are counted per Grover iteration only (the bounds do not
    include the post-selection load); T3 adds the priority-queue cost.
    """
    rng = make_rng(seed, "bounds-data")
    ds = Dataset(rng.integers(0, 1 << 16, size=(N, 2)))
    reports = []
    for kind, k in (("T1", 1), ("T1", 16), ("T2", 10), ("T3", 10)):
        samples = []
        for t in range(trials):
            f = random_query(2, seed, t)
            u = f.evaluate_many(ds.attrs)
            q = Qram(ds)
            r = make_rng(seed, "bounds", kind, k, t)
            if kind == "T1":
                out = alg.qqpq_theta(q, f, kth_highest(u, k), rng=r)
            elif kind == "T2":
                out = alg.cqpq_theta(q, f, kth_highest(u, k), rng=r)
            else:
                out = alg.cqpq_k(q, f, k, rng=r)
            samples.append(out.ledger.iteration_reads() + out.ledger.pq_ops)
        reports.append(BoundReport.from_samples(kind, N, k, samples))
    return reports


def check_bounds(N: int = 4096, trials: int = 100, seed: int = 0) -> CheckResult:
    t0 = time.perf_counter()
    reports = bound_reports(N, trials, seed)
    detail = "; ".join(f"{r.kind}(k={r.k}) {r.observed_mean:.0f} <= {r.bound_value:.0f}" for r in reports)
    return CheckResult("bounds", all(r.within for r in reports), detail, time.perf_counter() - t0)


def run_validation(suites=SUITES, quick: bool = False, seed: int = 0) -> list[CheckResult]:
    checks = {
        "backend-equivalence": lambda: check_backend_equivalence(seed=seed),
        "amplitude-closed-form": lambda: check_closed_form(max_N=64 if quick else 256, seed=seed),
        "lemma1": lambda: check_lemma1(runs=2_000 if quick else 20_000, tol=0.05 if quick else 0.03, seed=seed),
        "bounds": lambda: check_bounds(trials=20 if quick else 100, seed=seed),
    }
    unknown = [s for s in suites if s not in checks]
    if unknown:
        raise ValueError(f"unknown suites {unknown}; expected some of {SUITES}")
    return [checks[s]() for s in suites]
