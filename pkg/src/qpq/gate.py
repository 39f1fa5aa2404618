"""Gate-level state-vector backend for tiny instances.

Register layout, most significant qubit first::

    [ index: n | attr 0: n_a | ... | attr d-1: n_a | utility: n_u | aux: 1 ]

so with n=3, d=2, n_a=2, n_u=2 the qubits q9..q7 hold the index, q6q5 and
q4q3 the attributes, q2q1 the utility and q0 the auxiliary qubit. Qubit
``q_j`` is bit ``j`` of the basis-state number.

QRAM load, utility oracle and post-selection oracle are XOR permutations
of basis states; the phase oracle and R are sign flips; Hadamards act on
the index register only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import UtilityFunction
from .engine import SuperpositionHandle, _as_mask, check_theta
from .qram import Qram

MAX_QUBITS = 24


@dataclass(frozen=True)
class GateLayout:
    n: int
    d: int
    n_a: int
    n_u: int

    @property
    def num_qubits(self) -> int:
        return self.n + self.d * self.n_a + self.n_u + 1

    @property
    def util_shift(self) -> int:
        return 1

    @property
    def attr_shift(self) -> int:
        return 1 + self.n_u

    @property
    def index_shift(self) -> int:
        return 1 + self.n_u + self.d * self.n_a

    def pack(self, attrs: np.ndarray) -> np.ndarray:
        """Attribute rows -> attribute-register values (attr 0 most significant)."""
        out = np.zeros(attrs.shape[0], dtype=np.int64)
        for j in range(self.d):
            out = (out << self.n_a) | attrs[:, j]
        return out

    def unpack(self, values: np.ndarray) -> np.ndarray:
        mask = (1 << self.n_a) - 1
        cols = [(values >> (self.n_a * (self.d - 1 - j))) & mask for j in range(self.d)]
        return np.stack(cols, axis=1)


def hadamard_matrix(n: int) -> np.ndarray:
    h = np.ones((1, 1))
    h1 = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)
    for _ in range(n):
        h = np.kron(h, h1)
    return h


class GateState:
    """Full state vector for one QQPQ query on a tiny dataset."""

    backend = "gate"

    def __init__(self, qram: Qram, f: UtilityFunction, theta: int, tie_index: int = -1, restrict=None):
        ds = qram.dataset
        check_theta(f, theta)
        self.layout = lay = GateLayout(ds.n, ds.d, ds.n_a, f.n_u)
        if lay.num_qubits > MAX_QUBITS:
            raise ValueError(f"{lay.num_qubits} qubits exceed the gate-backend budget of {MAX_QUBITS}")
        self.qram, self.f, self.theta = qram, f, theta
        self.space = 1 << lay.n
        self.num_qubits = lay.num_qubits

        b = np.arange(1 << lay.num_qubits, dtype=np.int64)
        self._index = b >> lay.index_shift
        self._attr = (b >> lay.attr_shift) & ((1 << (lay.d * lay.n_a)) - 1)
        self._util = (b >> lay.util_shift) & ((1 << lay.n_u) - 1)
        self._b = b

        packed = np.zeros(self.space, dtype=np.int64)
        packed[: ds.N] = lay.pack(qram.attrs)
        self._qram_perm = b ^ (packed[self._index] << lay.attr_shift)

        table = f.evaluate_many(lay.unpack(np.arange(1 << (lay.d * lay.n_a), dtype=np.int64)))
        self._f_perm = b ^ (table[self._attr] << lay.util_shift)

        eligible = np.zeros(self.space, dtype=bool)
        eligible[: ds.N] = qram.eligible
        if restrict is not None:
            eligible[: ds.N] &= _as_mask(restrict, ds.N)
        self.eligible = eligible
        good = eligible[self._index] & (self._util >= theta)
        if tie_index >= 0:
            good &= (self._util > theta) | (self._index > tie_index)
        self._good_basis = good

        self.vec = np.zeros(1 << lay.num_qubits, dtype=np.complex128)
        self.vec[0] = 1.0
        self.apply_hadamards()

    # -- primitive gates ---------------------------------------------------

    def _permute(self, perm: np.ndarray) -> None:
        # every permutation here is an XOR, hence an involution
        self.vec = self.vec[perm]

    def apply_hadamards(self) -> None:
        rest = 1 << (self.num_qubits - self.layout.n)
        v = self.vec.reshape(self.space, rest)
        self.vec = (hadamard_matrix(self.layout.n) @ v).reshape(-1)

    def apply_qram_unitary(self) -> None:
        """|i>|x> -> |i>|x XOR p_i> on the attribute register."""
        self._permute(self._qram_perm)

    def apply_utility_oracle(self) -> None:
        """|p>|y> -> |p>|y XOR f(p)> on the utility register."""
        self._permute(self._f_perm)

    def apply_phase_oracle(self) -> None:
        """G_theta: negate basis states whose utility register is good."""
        self.vec[self._good_basis] *= -1

    def apply_R(self) -> None:
        """Negate every state whose index register is not |0>."""
        self.vec[self._index != 0] *= -1

    def apply_diffusion(self) -> None:
        self.apply_hadamards()
        self.apply_R()
        self.apply_hadamards()

    def apply_O(self) -> None:
        """O_theta: flip the auxiliary qubit on good states."""
        self._permute(np.where(self._good_basis, self._b ^ 1, self._b))

    def qubit_probability(self, q: int) -> float:
        on = (self._b >> q) & 1 == 1
        return float(np.sum(np.abs(self.vec[on]) ** 2))

    def measure_qubit(self, q: int, rng: np.random.Generator) -> int:
        p1 = self.qubit_probability(q)
        outcome = int(rng.random() < p1)
        keep = ((self._b >> q) & 1) == outcome
        self.vec[~keep] = 0
        self.vec /= math.sqrt(p1 if outcome else 1.0 - p1)
        return outcome

    # -- composite steps ---------------------------------------------------

    def iterate(self, count: int = 1) -> None:
        for _ in range(count):
            self.apply_qram_unitary()
            self.apply_utility_oracle()
            self.apply_phase_oracle()
            self.apply_utility_oracle()
            self.apply_qram_unitary()
            self.apply_diffusion()

    def prepare_post_selection(self) -> None:
        self.apply_qram_unitary()
        self.apply_utility_oracle()
        self.apply_O()

    def index_marginal(self) -> np.ndarray:
        p = np.abs(self.vec) ** 2
        return np.bincount(self._index, weights=p, minlength=self.space)

    def joint_distribution(self) -> np.ndarray:
        """Analytic P(index, aux) after Q, F and O_theta (state left untouched)."""
        saved = self.vec.copy()
        self.prepare_post_selection()
        p = np.abs(self.vec) ** 2
        out = np.zeros((self.space, 2))
        np.add.at(out, (self._index, self._b & 1), p)
        self.vec = saved
        return out

    def success_probability(self) -> float:
        return float(self.joint_distribution()[:, 1].sum())

    def middle_registers_clear(self, atol: float = 1e-12) -> bool:
        """True when attribute and utility registers hold |0> in every branch."""
        busy = (self._attr != 0) | (self._util != 0)
        return bool(np.all(np.abs(self.vec[busy]) < atol))

    def post_select(self, rng: np.random.Generator) -> SuperpositionHandle | None:
        self.prepare_post_selection()
        if not self.measure_qubit(0, rng):
            return None
        marginal = self.index_marginal()
        idx = np.flatnonzero(marginal > 1e-15)
        utilities = self.qram.utilities(self.f)
        return SuperpositionHandle(idx, utilities[idx], marginal[idx] / marginal[idx].sum())
