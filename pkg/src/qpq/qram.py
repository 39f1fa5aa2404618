"""Idealized classical-write / quantum-read QRAM and IO accounting.

The simulator backends read the classical cells directly; a quantum load is
only *recorded* here, so that every IO charged to a query is auditable and
governed by a single :class:`IoPolicy`.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import dataclass, fields
from typing import Callable

import numpy as np

from .dataset import DUMMY, Dataset, UtilityFunction

GROVER_ITERATION = "grover_iteration"
POST_SELECTION = "post_selection"


def log2_cost(k: int) -> float:
    return math.log2(k) if k > 1 else 0.0


@dataclass(frozen=True)
class IoPolicy:
    """How many IOs each event costs.

    The defaults reproduce the counting in the complexity proofs: one QRAM
    read per Grover iteration, one more for the post-selection load, and
    log2(k) per priority-queue operation.
    """

    grover_reads_per_iteration: int = 1
    count_postselect_read: bool = True
    pq_op_cost: Callable[[int], float] = log2_cost
    tuples_per_page: int = 1

    def __post_init__(self):
        if self.grover_reads_per_iteration not in (1, 2):
            raise ValueError("grover_reads_per_iteration must be 1 or 2")
        if self.tuples_per_page < 1:
            raise ValueError("tuples_per_page must be >= 1")

    @property
    def postselect_cost(self) -> int:
        return 1 if self.count_postselect_read else 0

    def pages(self, tuples: int) -> int:
        return -(-tuples // self.tuples_per_page)

    @classmethod
    def parse(cls, text: str) -> "IoPolicy":
        """Parse ``reads=2,postselect=0,page=4`` (any subset, any order)."""
        kw = {}
        for part in filter(None, (p.strip() for p in text.split(","))):
            key, _, value = part.partition("=")
            key = key.strip()
            if key == "reads":
                kw["grover_reads_per_iteration"] = int(value)
            elif key == "postselect":
                kw["count_postselect_read"] = value.strip().lower() in ("1", "true", "yes")
            elif key == "page":
                kw["tuples_per_page"] = int(value)
            elif key == "pq":
                if value.strip() == "log2":
                    kw["pq_op_cost"] = log2_cost
                else:
                    c = float(value)
                    kw["pq_op_cost"] = lambda k, c=c: c
            else:
                raise ValueError(f"unknown io-policy key {key!r}")
        return cls(**kw)

    def describe(self) -> str:
        pq = "log2" if self.pq_op_cost is log2_cost else "custom"
        return (f"reads={self.grover_reads_per_iteration},"
                f"postselect={int(self.count_postselect_read)},page={self.tuples_per_page},pq={pq}")


DEFAULT_POLICY = IoPolicy()


@dataclass
class IoLedger:
    quantum_reads: int = 0
    classical_reads: int = 0
    classical_writes: int = 0
    pq_ops: float = 0.0
    # event counts, kept so quantum_reads can be re-derived under any policy
    grover_iterations: int = 0
    post_selections: int = 0

    def __add__(self, other: "IoLedger") -> "IoLedger":
        return IoLedger(*(getattr(self, f.name) + getattr(other, f.name) for f in fields(self)))

    def __sub__(self, other: "IoLedger") -> "IoLedger":
        return IoLedger(*(getattr(self, f.name) - getattr(other, f.name) for f in fields(self)))

    def copy(self) -> "IoLedger":
        return IoLedger(*(getattr(self, f.name) for f in fields(self)))

    @property
    def classical_ios(self) -> int:
        return self.classical_reads + self.classical_writes

    @property
    def total(self) -> float:
        return self.quantum_reads + self.classical_ios + self.pq_ops

    def iteration_reads(self, policy: IoPolicy = DEFAULT_POLICY) -> int:
        """Quantum reads excluding post-selection loads (what the bounds count)."""
        return self.quantum_reads - self.post_selections * policy.postselect_cost

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def record_quantum_load(ledger: IoLedger, policy: IoPolicy, context: str, count: int = 1) -> None:
    if context == GROVER_ITERATION:
        ledger.grover_iterations += count
        ledger.quantum_reads += count * policy.grover_reads_per_iteration
    elif context == POST_SELECTION:
        ledger.post_selections += count
        ledger.quantum_reads += count * policy.postselect_cost
    else:
        raise ValueError(f"unknown load context {context!r}")


def record_classical_access(ledger: IoLedger, kind: str, count: int = 1) -> None:
    if count < 0:
        raise ValueError("count must be non-negative")
    if kind == "read":
        ledger.classical_reads += count
    elif kind == "write":
        ledger.classical_writes += count
    else:
        raise ValueError(f"unknown access kind {kind!r}")


class Qram:
    """Cells holding the dataset's tuples, plus per-index marks.

    Two kinds of mark exist: *dummy* (a stored DUMMY value, scoring the
    lowest utility) and *removed* (dropped from the active set D').
    Neither can be good for any threshold.
    """

    def __init__(self, dataset: Dataset, ledger: IoLedger | None = None):
        self.dataset = dataset
        self.ledger = ledger if ledger is not None else IoLedger()
        self._attrs = np.array(dataset.attrs)
        self.dummy = np.zeros(dataset.N, dtype=bool)
        self.removed = np.zeros(dataset.N, dtype=bool)
        self._util_cache: tuple[UtilityFunction, np.ndarray] | None = None

    @property
    def N(self) -> int:
        return self.dataset.N

    @property
    def dummy_set(self) -> set[int]:
        return set(np.flatnonzero(self.dummy).tolist())

    @property
    def active(self) -> np.ndarray:
        """Indices of D' (everything not removed), as an array."""
        return np.flatnonzero(~self.removed)

    @property
    def eligible(self) -> np.ndarray:
        """Mask of indices that may ever be good: active and not dummy."""
        return ~(self.dummy | self.removed)

    @property
    def attrs(self) -> np.ndarray:
        view = self._attrs.view()
        view.flags.writeable = False
        return view

    def _check(self, addr: int) -> None:
        if not 0 <= addr < self.N:
            raise IndexError(f"address {addr} out of range [0, {self.N})")

    def store(self, addr: int, value) -> None:
        self._check(addr)
        if value is DUMMY:
            self.dummy[addr] = True
        else:
            row = np.asarray(value, dtype=np.int64)
            if row.shape != (self.dataset.d,) or row.min() < 0 or row.max() >= (1 << self.dataset.n_a):
                raise ValueError(f"value {value!r} is not a valid {self.dataset.d}-attribute tuple")
            self._attrs[addr] = row
            self.dummy[addr] = False
            self._util_cache = None
        record_classical_access(self.ledger, "write", 1)

    def load(self, addr: int):
        """Classical read of one cell (charged as one classical IO)."""
        self._check(addr)
        record_classical_access(self.ledger, "read", 1)
        if self.dummy[addr]:
            return DUMMY
        return tuple(int(v) for v in self._attrs[addr])

    def remove(self, addr: int) -> None:
        """Drop ``addr`` from D'; a store of the removal mark, charged as a write."""
        self._check(addr)
        self.removed[addr] = True
        record_classical_access(self.ledger, "write", 1)

    def utilities(self, f: UtilityFunction) -> np.ndarray:
        """Raw utilities of every cell's tuple (marks ignored), cached per f."""
        if self._util_cache is None or self._util_cache[0] is not f:
            self._util_cache = (f, f.evaluate_many(self._attrs))
        return self._util_cache[1]

    def utility(self, f: UtilityFunction, addr: int) -> int:
        return 0 if self.dummy[addr] else int(self.utilities(f)[addr])

    @contextmanager
    def marks_restored(self):
        """Undo every dummy/removal mark made inside the block (free of charge)."""
        dummy, removed = self.dummy.copy(), self.removed.copy()
        try:
            yield self
        finally:
            self.dummy[:] = dummy
            self.removed[:] = removed
