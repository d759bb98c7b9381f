import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from blacklining import (
    ChannelKind,
    EmptyInput,
    InsufficientData,
    NormalizedSeries,
    TimingTrace,
    channel_defaults,
    euclidean_distances,
    first_difference,
    gen_attack,
    gen_normal,
    normalize,
)

finite = st.floats(-1e6, 1e6, allow_nan=False)


def test_affine_map():
    n = normalize([0, 50, 100])
    assert n.values.tolist() == [0.0, 0.5, 1.0]
    assert (n.original_min, n.original_max, n.degenerate) == (0.0, 100.0, False)


def test_constant_series_is_degenerate():
    n = normalize([7, 7, 7])
    assert n.values.tolist() == [0, 0, 0] and n.degenerate


def test_negative_inputs():
    assert normalize([-2, 0, 2]).values.tolist() == [0.0, 0.5, 1.0]


def test_empty_input():
    with pytest.raises(EmptyInput):
        normalize([])


def test_first_difference_examples():
    assert first_difference(TimingTrace([0, 1, 2, 3])).values.tolist() == [1, 1, 1]
    assert first_difference(TimingTrace([0, 200, 300, 500])).values.tolist() == [200, 100, 200]
    with pytest.raises(InsufficientData):
        first_difference(TimingTrace([5]))


def test_distance_examples():
    flat = NormalizedSeries(np.zeros(3), 0.0, 0.0, True)
    assert euclidean_distances(flat).values.tolist() == [0.5, 0.5]
    d = euclidean_distances(normalize([0, 1])).values
    assert d[0] == pytest.approx(np.sqrt(2), abs=1e-15)
    with pytest.raises(InsufficientData):
        euclidean_distances(normalize([3]))


def _distance_dispersion(trace):
    d = euclidean_distances(normalize(first_difference(trace).values)).values
    return np.var(d), np.var(d) / np.mean(d) ** 2


@pytest.mark.xfail(
    strict=True,
    reason="bursty gaps normalize to ~0 between rare idle spikes, so their raw "
    "distance variance (~0.003) sits below the attack symbol flips (~0.03)",
)
def test_attack_distance_variance_below_normal():
    pairs = [
        (_distance_dispersion(gen_attack(channel_defaults(ChannelKind.MEMORY_BUS), s))[0],
         _distance_dispersion(gen_normal(seed=s))[0])
        for s in range(100)
    ]
    attack, normal = np.mean(pairs, axis=0)
    assert attack < normal


def test_attack_distances_less_spiky_than_normal():
    # scale-free dispersion (squared coefficient of variation); 100/100 pairs at freeze time
    wins = 0
    for s in range(100):
        a = _distance_dispersion(gen_attack(channel_defaults(ChannelKind.MEMORY_BUS), s))[1]
        n = _distance_dispersion(gen_normal(seed=s))[1]
        wins += a < n
    assert wins >= 95


@settings(max_examples=200)
@given(st.lists(finite, min_size=2, max_size=50))
def test_normalize_range_and_idempotence(xs):
    n = normalize(xs)
    assume(not n.degenerate)
    assert n.values.min() == 0.0 and n.values.max() == 1.0
    again = normalize(n.values).values
    np.testing.assert_allclose(again, n.values, rtol=0, atol=1e-12)


@settings(max_examples=200)
@given(start=st.integers(0, 10**12), gaps=st.lists(st.integers(0, 10**9), min_size=1, max_size=80))
def test_cumsum_reconstructs_trace(start, gaps):
    ts = np.cumsum([start] + gaps)
    t = TimingTrace(ts)
    d = first_difference(t).values
    rebuilt = np.concatenate(([ts[0]], ts[0] + np.cumsum(d.astype(np.int64))))
    assert rebuilt.tolist() == t.timestamps.tolist()


@settings(max_examples=200)
@given(st.lists(st.integers(0, 1000), min_size=2, max_size=60))
def test_distance_lower_bound(ys):
    # a millesimal grid keeps "equal" exact; sub-ulp steps vanish in hypot
    y = np.asarray(ys) / 1000.0
    d = euclidean_distances(NormalizedSeries(y, 0.0, 1.0)).values
    step = 1.0 / (y.size - 1)
    assert np.all(d >= step)
    np.testing.assert_array_equal(d == step, np.diff(y) == 0)
