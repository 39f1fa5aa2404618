"""Amplitude amplification + post-selection over a QRAM-held dataset.

Three interchangeable state representations are provided:

``collapsed``
    Two real amplitudes (good class, bad class) and the iteration count.
    Exact, because every operator involved keeps the amplitudes uniform
    within each class; the good amplitude after ``s`` iterations is
    ``sin((2s+1) t)`` with ``t = arcsin(sqrt(k / space))``.
``dense``
    One amplitude per index of the index register.
``gate``
    The full register file (index, attributes, utility, auxiliary qubit),
    driven gate by gate; see :mod:`qpq.gate`.

The index register holds ``space`` basis states. Collapsed and dense
states default to ``space = N`` (an ideal uniform preparation); the gate
backend always uses ``2**n`` and pads with indices that are never good.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .qram import GROVER_ITERATION, POST_SELECTION, DEFAULT_POLICY, IoLedger, IoPolicy, Qram, record_quantum_load
from .dataset import UtilityFunction

BACKENDS = ("collapsed", "dense", "gate")


def good_mask(qram: Qram, f: UtilityFunction, theta: int, tie_index: int = -1,
              restrict: np.ndarray | None = None) -> np.ndarray:
    """Indices whose key (utility, index) is at least (theta, tie_index + 1).

    With the default ``tie_index=-1`` this is plain ``f(p_i) >= theta``.
    Dummy and removed indices are never good; ``restrict`` (a boolean mask
    or an index array) narrows the set further.
    """
    check_theta(f, theta)
    u = qram.utilities(f)
    mask = qram.eligible & (u >= theta)
    if tie_index >= 0:
        mask &= (u > theta) | (np.arange(qram.N) > tie_index)
    if restrict is not None:
        mask &= _as_mask(restrict, qram.N)
    return mask


def _as_mask(sel, N: int) -> np.ndarray:
    sel = np.asarray(sel)
    if sel.dtype == bool:
        return sel
    m = np.zeros(N, dtype=bool)
    m[sel] = True
    return m


def check_theta(f: UtilityFunction, theta: int) -> None:
    if not 0 <= theta <= f.max_utility:
        raise ValueError(f"theta={theta} outside the {f.n_u}-bit utility range")


@dataclass
class SuperpositionHandle:
    """Post-selected register: index ``indices[j]`` with probability ``probabilities[j]``.

    For a correct run the probabilities are all 1/k. ``sample`` models
    re-preparing the same state; ``measure`` collapses it for good.
    """

    indices: np.ndarray
    utilities: np.ndarray
    probabilities: np.ndarray
    uniform: bool = False
    consumed: bool = False

    @property
    def k(self) -> int:
        return len(self.indices)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.uniform:
            pos = rng.integers(self.k, size=size)
        else:
            pos = rng.choice(self.k, size=size, p=self.probabilities)
        return self.indices[pos]


def _uniform_handle(indices: np.ndarray, utilities: np.ndarray) -> SuperpositionHandle:
    k = len(indices)
    return SuperpositionHandle(indices, utilities[indices], np.full(k, 1.0 / k), uniform=True)


class CollapsedState:
    backend = "collapsed"

    def __init__(self, space: int, good: np.ndarray, utilities: np.ndarray):
        self.space = space
        self.good = good  # index array
        self.utilities = utilities
        self.s = 0
        self.t = math.asin(math.sqrt(len(good) / space))

    @property
    def k(self) -> int:
        return len(self.good)

    @property
    def a_good(self) -> float:
        return math.sin((2 * self.s + 1) * self.t)

    @property
    def a_bad(self) -> float:
        return math.cos((2 * self.s + 1) * self.t)

    def iterate(self, count: int = 1) -> None:
        self.s += count

    def success_probability(self) -> float:
        return self.a_good ** 2

    def joint_distribution(self) -> np.ndarray:
        """P(index, aux) after the post-selection oracle, shape (space, 2)."""
        out = np.zeros((self.space, 2))
        if self.k:
            out[self.good, 1] = self.a_good ** 2 / self.k
        if self.space > self.k:
            bad = np.ones(self.space, dtype=bool)
            bad[self.good] = False
            out[bad, 0] = self.a_bad ** 2 / (self.space - self.k)
        return out

    def post_select(self, rng: np.random.Generator) -> SuperpositionHandle | None:
        if rng.random() < self.success_probability() and self.k:
            return _uniform_handle(self.good, self.utilities)
        return None


class DenseState:
    """Real amplitudes stored as complex128; the imaginary part must stay 0."""

    backend = "dense"

    def __init__(self, space: int, good: np.ndarray, utilities: np.ndarray):
        self.space = space
        self.good_mask = np.zeros(space, dtype=bool)
        self.good_mask[good] = True
        self.utilities = utilities
        self.amps = np.full(space, 1.0 / math.sqrt(space), dtype=np.complex128)
        self._sign = np.where(self.good_mask, -1.0, 1.0)
        self._k = int(self.good_mask.sum())

    @property
    def good(self) -> np.ndarray:
        return np.flatnonzero(self.good_mask)

    @property
    def k(self) -> int:
        return self._k

    def phase_oracle(self) -> None:
        self.amps *= self._sign

    def diffusion(self) -> None:
        # H R H = 2|u><u| - I, i.e. reflection about the mean
        mean = self.amps.sum() / self.space
        np.subtract(2 * mean, self.amps, out=self.amps)

    def iterate(self, count: int = 1) -> None:
        for _ in range(count):
            self.phase_oracle()
            self.diffusion()

    def good_amplitude(self) -> float:
        """Signed amplitude of the normalized good-class state."""
        if not self.k:
            return 0.0
        return float(self.amps.real @ self.good_mask / math.sqrt(self.k))

    def success_probability(self) -> float:
        return float(np.sum(np.abs(self.amps[self.good_mask]) ** 2))

    def joint_distribution(self) -> np.ndarray:
        p = np.abs(self.amps) ** 2
        out = np.zeros((self.space, 2))
        out[self.good_mask, 1] = p[self.good_mask]
        out[~self.good_mask, 0] = p[~self.good_mask]
        return out

    def post_select(self, rng: np.random.Generator) -> SuperpositionHandle | None:
        p_good = self.success_probability()
        if not (rng.random() < p_good) or not self.k:
            return None
        good = self.good
        probs = np.abs(self.amps[good]) ** 2 / p_good
        self.amps[~self.good_mask] = 0
        self.amps /= math.sqrt(p_good)
        return SuperpositionHandle(good, self.utilities[good], probs)


def init_uniform(qram: Qram, f: UtilityFunction, theta: int, backend: str = "collapsed", *,
                 tie_index: int = -1, restrict=None, good: np.ndarray | None = None,
                 space: int | None = None):
    """Uniform superposition over the index register, with the good set fixed.

    ``good`` may be passed in (a mask over the N indices) to skip the O(N)
    classical recount when the same query is re-initialized.
    """
    if not qram.eligible.any():
        raise ValueError("no active indices to superpose")
    if backend == "gate":
        from .gate import GateState
        if space is not None:
            raise ValueError("the gate backend fixes space = 2**n")
        return GateState(qram, f, theta, tie_index=tie_index, restrict=restrict)
    if good is None:
        good = good_mask(qram, f, theta, tie_index, restrict)
    space = qram.N if space is None else space
    if space < qram.N:
        raise ValueError("space must cover every index")
    idx = np.flatnonzero(good)
    utilities = qram.utilities(f)
    if backend == "collapsed":
        return CollapsedState(space, idx, utilities)
    if backend == "dense":
        return DenseState(space, idx, utilities)
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


def grover_iteration(state, ledger: IoLedger, policy: IoPolicy = DEFAULT_POLICY, count: int = 1):
    """Apply ``count`` full iterations (load, oracle, phase flip, uncompute, diffusion)."""
    record_quantum_load(ledger, policy, GROVER_ITERATION, count)
    state.iterate(count)
    return state


def post_select(state, ledger: IoLedger, policy: IoPolicy, rng: np.random.Generator) -> SuperpositionHandle | None:
    """Load, compute utility, flip the auxiliary qubit on good states, measure it."""
    record_quantum_load(ledger, policy, POST_SELECTION)
    return state.post_select(rng)


def measure(handle: SuperpositionHandle, rng: np.random.Generator) -> tuple[int, int]:
    """Measure the index (and utility) register; the handle is spent afterwards."""
    if handle.k == 0:
        raise ValueError("cannot measure an empty superposition")
    if handle.consumed:
        raise ValueError("handle was already measured")
    if handle.uniform:
        j = int(rng.integers(handle.k))
    else:
        j = int(rng.choice(handle.k, p=handle.probabilities))
    handle.consumed = True
    return int(handle.indices[j]), int(handle.utilities[j])
