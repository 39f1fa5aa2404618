import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qpq.baselines import bound, kth_highest, linear_scan, quick_select, ranking_keys, top_k_oracle
from qpq.dataset import Dataset, UtilityFunction, generate_synthetic, random_query
from qpq.qram import IoLedger, IoPolicy
from qpq.rng import make_rng


def test_linear_scan_reads_everything():
    ds = Dataset(np.array([[1], [7], [3], [7]]), n_a=3)
    f = UtilityFunction.linear([1.0], n_a=3, n_u=3, scale=1)
    led = IoLedger()
    assert linear_scan(ds, f, 3, led) == [(3, 7), (1, 7), (2, 3)]
    assert led.classical_reads == 4 and led.total == 4


def test_linear_scan_paged():
    ds = generate_synthetic("INDE", 100, 2, seed=0)
    led = IoLedger()
    linear_scan(ds, random_query(2, 0), 0, led, IoPolicy(tuples_per_page=8))
    assert led.classical_reads == 13


def test_quick_select_matches_full_sort():
    ds = generate_synthetic("CORR", 5000, 3, seed=2)
    f = random_query(3, seed=2)
    u = f.evaluate_many(ds.attrs)
    expected = [i for _, i in sorted(((int(x), i) for i, x in enumerate(u)), reverse=True)[:25]]
    led = IoLedger()
    got = quick_select(ds, f, 25, led, make_rng(0))
    assert [i for i, _ in got] == expected
    assert 5000 <= led.classical_reads < 5 * 5000


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 7), min_size=1, max_size=60), st.data())
def test_quick_select_handles_ties(values, data):
    k = data.draw(st.integers(1, len(values)))
    ds = Dataset(np.array(values).reshape(-1, 1), n_a=3)
    f = UtilityFunction.linear([1.0], n_a=3, n_u=3, scale=1)
    got = [i for i, _ in quick_select(ds, f, k, IoLedger(), make_rng(data.draw(st.integers(0, 99))))]
    assert got == top_k_oracle(np.array(values), k)
    assert kth_highest(np.array(values), k) == sorted(values, reverse=True)[k - 1]


def test_quick_select_bad_k():
    ds = generate_synthetic("INDE", 10, 2, seed=0)
    with pytest.raises(ValueError):
        quick_select(ds, random_query(2, 0), 11, IoLedger())


def test_ranking_keys_order():
    keys = ranking_keys(np.array([3, 3, 1]))
    assert keys[1] > keys[0] > keys[2]


def test_bound_examples():
    assert math.isclose(bound("T1", 1024, 1), 4.5 * 32)
    assert math.isclose(bound("T2", 1024, 10), 9 * math.sqrt(10240))
    assert math.isclose(bound("T3", 1024, 10), 4.5 * math.pi * math.sqrt(10240) + 10 * math.log2(10) * math.log(1024))
    assert math.isclose(bound("T3", 1024, 1), 4.5 * math.pi * 32)


def test_bound_errors():
    with pytest.raises(ValueError):
        bound("T4", 10, 1)
    with pytest.raises(ValueError):
        bound("T1", 10, 11)
    with pytest.raises(ValueError):
        bound("T1", 0, 1)


@given(st.integers(1, 10 ** 9), st.integers(1, 1000))
def test_t1_scales_with_sqrt_n_over_k(N, k):
    if k > N:
        return
    assert math.isclose(bound("T1", 4 * N, k), 2 * bound("T1", N, k))
    if 4 * k <= N:
        assert math.isclose(bound("T1", N, 4 * k), bound("T1", N, k) / 2)
