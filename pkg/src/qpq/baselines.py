"""Classical competitors with matching IO accounting, and the closed-form bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import Dataset, UtilityFunction
from .qram import DEFAULT_POLICY, IoLedger, IoPolicy, record_classical_access
from .rng import as_rng

BOUND_KINDS = ("T1", "T2", "T3")


def linear_scan(dataset: Dataset, f: UtilityFunction, theta: int, ledger: IoLedger,
                policy: IoPolicy = DEFAULT_POLICY) -> list[tuple[int, int]]:
    """Every tuple with utility >= theta, best first. Reads all N tuples."""
    u = f.evaluate_many(dataset.attrs)
    record_classical_access(ledger, "read", policy.pages(dataset.N))
    hits = np.flatnonzero(u >= theta)
    return sorted(((int(i), int(u[i])) for i in hits), key=lambda iu: (iu[1], iu[0]), reverse=True)


def ranking_keys(utilities: np.ndarray) -> np.ndarray:
    """Single int64 key ordering tuples by (utility, index)."""
    N = len(utilities)
    bits = max(N - 1, 1).bit_length()
    if int(utilities.max(initial=0)) >= 1 << (62 - bits):
        raise ValueError("utility and index bits do not fit a 63-bit key")
    return (utilities.astype(np.int64) << bits) | np.arange(N, dtype=np.int64)


def quick_select(dataset: Dataset, f: UtilityFunction, k: int, ledger: IoLedger, rng=None,
                 policy: IoPolicy = DEFAULT_POLICY) -> list[tuple[int, int]]:
    """Top-k under (utility, index) order by random-pivot quickselect.

    Each partition pass reads the pivot once and every candidate once.
    """
    N = dataset.N
    if not 1 <= k <= N:
        raise ValueError(f"k must be in [1, {N}], got {k}")
    rng = as_rng(rng)
    u = f.evaluate_many(dataset.attrs)
    key = ranking_keys(u)
    cand = np.arange(N)
    need = k
    chosen = []
    while need > 0:
        pivot = cand[rng.integers(len(cand))]
        record_classical_access(ledger, "read", 1 + policy.pages(len(cand)))
        ck = key[cand]
        greater = cand[ck > key[pivot]]
        if len(greater) >= need:
            cand = greater
            continue
        chosen.append(greater)
        chosen.append(np.array([pivot]))
        need -= len(greater) + 1
        cand = cand[ck < key[pivot]]
    idx = np.concatenate(chosen)
    idx = idx[np.argsort(-key[idx])]
    return [(int(i), int(u[i])) for i in idx]


def top_k_oracle(utilities: np.ndarray, k: int) -> list[int]:
    """Indices of the k largest (utility, index) keys, via a full sort."""
    order = np.lexsort((np.arange(len(utilities)), utilities))[::-1]
    return [int(i) for i in order[:k]]


def kth_highest(utilities: np.ndarray, k: int) -> int:
    return int(np.sort(utilities)[::-1][k - 1])


def bound(kind: str, N: int, k: int) -> float:
    """Expected-IO upper bounds for qqpq_theta (T1), cqpq_theta (T2), cqpq_k (T3)."""
    if N < 1 or not 1 <= k <= N:
        raise ValueError(f"need N >= 1 and 1 <= k <= N, got N={N}, k={k}")
    if kind == "T1":
        return 4.5 * math.sqrt(N / k)
    if kind == "T2":
        return 9.0 * math.sqrt(N * k)
    if kind == "T3":
        return 4.5 * math.pi * math.sqrt(N * k) + k * math.log2(k) * math.log(N)
    raise ValueError(f"unknown bound {kind!r}; expected one of {BOUND_KINDS}")


@dataclass
class BoundReport:
    kind: str
    N: int
    k: int
    bound_value: float
    observed_mean: float
    trials: int

    @property
    def within(self) -> bool:
        return self.observed_mean <= self.bound_value

    @classmethod
    def from_samples(cls, kind: str, N: int, k: int, samples) -> "BoundReport":
        samples = list(samples)
        return cls(kind, N, k, bound(kind, N, k), float(np.mean(samples)), len(samples))
