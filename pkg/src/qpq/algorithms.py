"""The four quantum preference queries built on the engine.

=============  ==========  ===============  ==========================
query          input       output           built from
=============  ==========  ===============  ==========================
qqpq_theta     threshold   superposition    Boyer loop over AA + PS
cqpq_theta     threshold   classical list   qqpq_theta + dummy marks
cqpq_k         k           classical list   qqpq_theta + min-queue
qqpq_k         k           superposition    cqpq_k, then qqpq_theta
=============  ==========  ===============  ==========================

Every query charges its IOs to ``qram.ledger`` and returns the delta in
its :class:`QueryOutcome`. Marks made on the QRAM (dummies, removals from
D') are rolled back before a query returns.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .dataset import DUMMY, UtilityFunction
from .engine import SuperpositionHandle, good_mask, grover_iteration, init_uniform, measure, post_select
from .qram import DEFAULT_POLICY, IoLedger, IoPolicy, Qram
from .rng import as_rng

GROWTH = 4 / 3
DEFAULT_RETRIES = 3


@dataclass
class QueryOutcome:
    kind: str  # "classical", "quantum" or "null"
    ledger: IoLedger
    items: list[tuple[int, int]] | None = None
    handle: SuperpositionHandle | None = None
    passes: int = 0
    calls: int = 0
    iterations: list[int] = field(default_factory=list)
    trace: list[int] = field(default_factory=list)

    @property
    def is_null(self) -> bool:
        return self.kind == "null"

    @property
    def indices(self) -> set[int]:
        if self.items is not None:
            return {i for i, _ in self.items}
        if self.handle is not None:
            return set(self.handle.indices.tolist())
        return set()


class MinPriorityQueue:
    """Capacity-k min-queue of (utility, index); each push/pop is charged."""

    def __init__(self, capacity: int, ledger: IoLedger, policy: IoPolicy = DEFAULT_POLICY):
        self.capacity = capacity
        self.ledger = ledger
        self.cost = policy.pq_op_cost(capacity)
        self._heap: list[tuple[int, int]] = []

    def __len__(self):
        return len(self._heap)

    def push(self, utility: int, index: int) -> None:
        if len(self._heap) >= self.capacity:
            raise OverflowError("priority queue is full")
        heapq.heappush(self._heap, (utility, index))
        self.ledger.pq_ops += self.cost

    def pop(self) -> tuple[int, int]:
        item = heapq.heappop(self._heap)
        self.ledger.pq_ops += self.cost
        return item

    def min(self) -> tuple[int, int]:
        return self._heap[0]

    def items(self) -> list[tuple[int, int]]:
        """Contents as (index, utility), best first."""
        return [(i, u) for u, i in sorted(self._heap, reverse=True)]


def _sorted_items(items):
    return sorted(items, key=lambda iu: (iu[1], iu[0]), reverse=True)


def qqpq_theta(qram: Qram, f: UtilityFunction, theta: int, *, policy: IoPolicy = DEFAULT_POLICY,
               rng=None, backend: str = "collapsed", tie_index: int = -1, restrict=None) -> QueryOutcome:
    """Superposition of all eligible tuples with utility >= theta, or null.

    Runs the exponential-schedule loop for an unknown number of solutions:
    pass ``p`` draws ``j`` uniformly from {1..ceil(m)} with ``m = (4/3)^p``,
    applies ``j`` Grover iterations to a fresh uniform state and
    post-selects; the loop gives up once ``m > sqrt(N)``.

    ``tie_index`` turns the threshold into the composite key
    ``(utility, index) > (theta, tie_index)``; ``restrict`` limits the
    candidate indices.
    """
    rng = as_rng(rng)
    before = qram.ledger.copy()
    out = QueryOutcome("null", before, calls=1)
    if not qram.eligible.any():
        out.ledger = qram.ledger - before
        return out
    # one classical O(N) recount per call; free under the IO metric
    good = good_mask(qram, f, theta, tie_index, restrict)
    limit = math.sqrt(qram.N)
    m = 1.0
    while m <= limit:
        j = int(rng.integers(1, math.ceil(m) + 1))
        state = init_uniform(qram, f, theta, backend, tie_index=tie_index, restrict=restrict, good=good)
        grover_iteration(state, qram.ledger, policy, count=j)
        handle = post_select(state, qram.ledger, policy, rng)
        out.passes += 1
        out.iterations.append(j)
        if handle is not None:
            out.kind, out.handle = "quantum", handle
            break
        m *= GROWTH
    out.ledger = qram.ledger - before
    return out


def cqpq_theta(qram: Qram, f: UtilityFunction, theta: int, *, retries: int = DEFAULT_RETRIES,
               policy: IoPolicy = DEFAULT_POLICY, rng=None, backend: str = "collapsed") -> QueryOutcome:
    """Classical list of tuples with utility >= theta.

    Each successful qqpq_theta is measured and the hit marked dummy; the
    loop ends after ``retries`` consecutive null answers.
    """
    if retries < 1:
        raise ValueError("retries must be >= 1")
    rng = as_rng(rng)
    before = qram.ledger.copy()
    out = QueryOutcome("classical", before, items=[])
    with qram.marks_restored():
        nulls = 0
        while nulls < retries:
            res = qqpq_theta(qram, f, theta, policy=policy, rng=rng, backend=backend)
            out.passes += res.passes
            out.calls += 1
            if res.is_null:
                nulls += 1
                continue
            nulls = 0
            i, u = measure(res.handle, rng)
            qram.store(i, DUMMY)
            out.items.append((i, u))
    out.items = _sorted_items(out.items)
    out.ledger = qram.ledger - before
    return out


def cqpq_k(qram: Qram, f: UtilityFunction, k: int, *, retries: int = DEFAULT_RETRIES,
           policy: IoPolicy = DEFAULT_POLICY, rng=None, backend: str = "collapsed") -> QueryOutcome:
    """Classical list of the k best tuples under (utility, index) order.

    Seeds a min-queue with k random tuples (removing them from D'), then
    keeps asking qqpq_theta for a remaining tuple that beats the queue
    minimum; each hit is removed from D' and replaces the minimum. Ends
    after ``retries`` consecutive null answers. ``trace`` lists every
    index pushed into the queue, in order.
    """
    N = qram.N
    if not 1 <= k <= N:
        raise ValueError(f"k must be in [1, {N}], got {k}")
    if retries < 1:
        raise ValueError("retries must be >= 1")
    rng = as_rng(rng)
    before = qram.ledger.copy()
    out = QueryOutcome("classical", before)
    queue = MinPriorityQueue(k, qram.ledger, policy)
    with qram.marks_restored():
        candidates = np.flatnonzero(qram.eligible)
        if len(candidates) < k:
            raise ValueError(f"only {len(candidates)} active tuples for k={k}")
        for i in rng.choice(candidates, size=k, replace=False):
            i = int(i)
            p = qram.load(i)
            qram.remove(i)
            queue.push(0 if p is DUMMY else qram.utility(f, i), i)
            out.trace.append(i)
        nulls = 0
        while nulls < retries:
            u_min, i_min = queue.min()
            res = qqpq_theta(qram, f, u_min, policy=policy, rng=rng, backend=backend, tie_index=i_min)
            out.passes += res.passes
            out.calls += 1
            if res.is_null:
                nulls += 1
                continue
            nulls = 0
            i, u = measure(res.handle, rng)
            qram.remove(i)
            queue.pop()
            queue.push(u, i)
            out.trace.append(i)
    out.items = queue.items()
    out.ledger = qram.ledger - before
    return out


def qqpq_k(qram: Qram, f: UtilityFunction, k: int, *, retries: int = DEFAULT_RETRIES,
           policy: IoPolicy = DEFAULT_POLICY, rng=None, backend: str = "collapsed") -> QueryOutcome:
    """Superposition over the k best tuples.

    The k-th best utility is learned classically with cqpq_k; the final
    qqpq_theta then uses that minimum as threshold, restricted to the
    indices cqpq_k returned so equal-utility outsiders stay out.
    """
    rng = as_rng(rng)
    before = qram.ledger.copy()
    top = cqpq_k(qram, f, k, retries=retries, policy=policy, rng=rng, backend=backend)
    theta = min(u for _, u in top.items)
    chosen = np.array(sorted(i for i, _ in top.items))
    out = QueryOutcome("null", before, passes=top.passes, calls=top.calls, trace=top.trace)
    for _ in range(retries):
        res = qqpq_theta(qram, f, theta, policy=policy, rng=rng, backend=backend, restrict=chosen)
        out.passes += res.passes
        out.calls += 1
        if not res.is_null:
            out.kind, out.handle = "quantum", res.handle
            break
    out.ledger = qram.ledger - before
    return out


def lemma1_probability(i: int, k: int, N: int | None = None) -> float:
    """Chance that the rank-i tuple (1 = best) ever enters cqpq_k's queue."""
    if i < 1 or (N is not None and i > N):
        raise ValueError(f"rank {i} out of range")
    if k < 1:
        raise ValueError("k must be >= 1")
    return 1.0 if i <= k else k / i
