import math

import numpy as np
import pytest

from qpq.algorithms import (GROWTH, MinPriorityQueue, cqpq_k, cqpq_theta, lemma1_probability, qqpq_k,
                            qqpq_theta)
from qpq.dataset import DUMMY, Dataset, UtilityFunction, generate_synthetic, random_query
from qpq.qram import IoLedger, IoPolicy, Qram
from qpq.rng import make_rng


def identity_qram(values, n_a=None):
    values = np.asarray(values)
    n_a = n_a or max(1, int(values.max()).bit_length())
    ds = Dataset(values.reshape(-1, 1), n_a=n_a)
    return Qram(ds), UtilityFunction.linear([1.0], n_a=n_a, n_u=n_a, scale=1)


def sort_oracle(utilities, k):
    return [i for _, i in sorted(((int(u), i) for i, u in enumerate(utilities)), reverse=True)[:k]]


def test_qqpq_theta_null_when_nothing_qualifies():
    q, f = identity_qram([0, 1, 2, 3], n_a=3)
    out = qqpq_theta(q, f, 7, rng=make_rng(0))
    assert out.is_null and out.handle is None
    assert out.passes == len(out.iterations) >= 1


def test_qqpq_theta_single_winner_of_four():
    q, f = identity_qram([0, 1, 2, 3])
    hits = 0
    for t in range(200):
        out = qqpq_theta(q, f, 3, rng=make_rng(0, t))
        if not out.is_null:
            hits += 1
            assert out.indices == {3}
    assert hits >= 190


@pytest.mark.parametrize("backend", ["collapsed", "dense", "gate"])
def test_qqpq_theta_returns_uniform_superposition(backend):
    q, f = identity_qram([5, 1, 7, 2, 7, 0, 6, 3])
    out = None
    for t in range(20):
        out = qqpq_theta(q, f, 6, rng=make_rng(1, t), backend=backend)
        if not out.is_null:
            break
    assert out.indices == {2, 4, 6}
    assert np.allclose(out.handle.probabilities, 1 / 3)


def test_boyer_schedule_is_bounded():
    q, f = identity_qram(list(range(1024)), n_a=10)
    out = qqpq_theta(q, f, 1023, rng=make_rng(2))
    m, limit = 1.0, math.sqrt(1024)
    for j in out.iterations:
        assert 1 <= j <= math.ceil(m)
        m *= GROWTH
    assert m / GROWTH <= limit


def test_boyer_ledger_accounts_each_pass():
    q, f = identity_qram(list(range(256)), n_a=8)
    out = qqpq_theta(q, f, 250, rng=make_rng(3))
    assert out.ledger.grover_iterations == sum(out.iterations)
    assert out.ledger.post_selections == out.passes
    assert out.ledger.quantum_reads == sum(out.iterations) + out.passes
    assert q.ledger == out.ledger


def test_boyer_false_negatives_are_rare():
    q, f = identity_qram(list(range(4096)), n_a=12)
    nulls = sum(qqpq_theta(q, f, 4095, rng=make_rng(4, t)).is_null for t in range(300))
    assert nulls / 300 <= 0.2


def test_cqpq_theta_n16():
    q, f = identity_qram([3, 9, 12, 1, 15, 7, 12, 0, 4, 14, 2, 8, 6, 11, 5, 10])
    out = cqpq_theta(q, f, 11, rng=make_rng(5))
    expected = sorted(((i, u) for i, u in enumerate(q.utilities(f).tolist()) if u >= 11),
                      key=lambda iu: (iu[1], iu[0]), reverse=True)
    assert out.items == expected
    assert not q.dummy.any()
    assert out.ledger.classical_writes == len(expected)


def test_cqpq_theta_empty_answer():
    q, f = identity_qram([0, 1, 2, 3], n_a=3)
    out = cqpq_theta(q, f, 5, rng=make_rng(6))
    assert out.items == [] and out.calls == 3


def test_cqpq_theta_rolls_back_dummies_but_keeps_existing():
    q, f = identity_qram([4, 5, 6, 7])
    q.store(0, DUMMY)
    out = cqpq_theta(q, f, 5, rng=make_rng(7))
    assert {i for i, _ in out.items} == {1, 2, 3}
    assert q.dummy_set == {0}


def test_cqpq_k_equals_n_returns_everything():
    q, f = identity_qram([3, 1, 2, 0])
    out = cqpq_k(q, f, 4, rng=make_rng(8))
    assert [i for i, _ in out.items] == [0, 2, 1, 3]
    assert out.ledger.pq_ops == 4 * 2.0


def test_cqpq_k_matches_sort_oracle():
    rng = make_rng(9, "data")
    ds = Dataset(rng.integers(0, 64, size=(256, 2)), n_a=6)
    f = UtilityFunction.linear([0.5, 0.5], n_a=6, n_u=8)
    right = 0
    for t in range(20):
        q = Qram(ds)
        out = cqpq_k(q, f, 10, rng=make_rng(9, t))
        right += [i for i, _ in out.items] == sort_oracle(q.utilities(f), 10)
        assert not q.removed.any()
    assert right >= 18


def test_cqpq_k_seed_accounting():
    q, f = identity_qram(list(range(64)), n_a=6)
    out = cqpq_k(q, f, 8, rng=make_rng(10))
    pushes = len(out.trace)
    assert out.ledger.classical_reads == 8
    assert out.ledger.classical_writes == pushes
    assert out.ledger.pq_ops == (8 + 2 * (pushes - 8)) * 3.0


def test_cqpq_k_rejects_bad_k():
    q, f = identity_qram([1, 2])
    for k in (0, 3):
        with pytest.raises(ValueError):
            cqpq_k(q, f, k)


def test_qqpq_k_one_is_the_best():
    q, f = identity_qram([2, 9, 4, 1])
    out = qqpq_k(q, f, 1, rng=make_rng(11))
    assert out.indices == {1}


def test_qqpq_k_measurement_frequencies():
    rng = make_rng(12, "data")
    ds = Dataset(rng.permutation(64).reshape(-1, 1), n_a=6)
    f = UtilityFunction.linear([1.0], n_a=6, n_u=6, scale=1)
    q = Qram(ds)
    out = qqpq_k(q, f, 4, rng=make_rng(12))
    assert out.indices == set(sort_oracle(q.utilities(f), 4))
    counts = np.bincount(out.handle.sample(make_rng(13), 40_000), minlength=64)
    for i in out.indices:
        assert abs(counts[i] / 40_000 - 0.25) < 0.01


def test_qqpq_k_excludes_equal_utility_outsiders():
    q, f = identity_qram([5, 5, 5, 5, 1])
    out = qqpq_k(q, f, 2, rng=make_rng(14))
    assert len(out.indices) == 2 and out.indices == {2, 3}


def test_lemma1_examples():
    assert lemma1_probability(3, 5) == 1.0
    assert lemma1_probability(10, 5) == 0.5
    assert lemma1_probability(50, 5) == 0.1
    with pytest.raises(ValueError):
        lemma1_probability(0, 5)
    with pytest.raises(ValueError):
        lemma1_probability(101, 5, N=100)


def test_priority_queue_orders_and_charges():
    led = IoLedger()
    pq = MinPriorityQueue(4, led)
    for u, i in ((5, 0), (3, 1), (5, 2), (9, 3)):
        pq.push(u, i)
    assert pq.min() == (3, 1)
    assert pq.items() == [(3, 9), (2, 5), (0, 5), (1, 3)]
    with pytest.raises(OverflowError):
        pq.push(1, 4)
    pq.pop()
    assert led.pq_ops == 5 * 2.0


def test_policy_changes_quantum_cost_only():
    ds = generate_synthetic("INDE", 512, 2, seed=3)
    f = random_query(2, seed=3)
    a = cqpq_k(Qram(ds), f, 5, rng=make_rng(15))
    b = cqpq_k(Qram(ds), f, 5, rng=make_rng(15), policy=IoPolicy(grover_reads_per_iteration=2))
    assert a.items == b.items
    assert b.ledger.quantum_reads - a.ledger.quantum_reads == a.ledger.grover_iterations
    assert a.ledger.classical_ios == b.ledger.classical_ios


def test_queries_are_deterministic_per_seed():
    ds = generate_synthetic("ANTI", 2048, 3, seed=4)
    f = random_query(3, seed=4)
    a = cqpq_k(Qram(ds), f, 10, rng=make_rng(16))
    b = cqpq_k(Qram(ds), f, 10, rng=make_rng(16))
    assert a.items == b.items and a.ledger == b.ledger and a.trace == b.trace
