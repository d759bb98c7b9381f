from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from blacklining import (
    FilterConfig,
    InsufficientData,
    InvalidParams,
    Pmf,
    TimingTrace,
    autocorr,
    channel_defaults,
    ChannelKind,
    convolve_pmf,
    gen_attack,
    iid_filter,
)
from blacklining.stats import empirical_pmf, lag_profile, total_variation


def autocorr_oracle(xs, lag):
    """The estimator written out term by term in exact rationals."""
    x = [Fraction(v) for v in xs]
    n = len(x)
    mean = sum(x) / n
    num = sum((x[i] - mean) * (x[i + lag] - mean) for i in range(n - lag))
    den = sum((v - mean) ** 2 for v in x)
    return num / den


def test_autocorr_ramp():
    assert autocorr_oracle([1, 2, 3, 4, 5], 1) == Fraction(2, 5)
    assert autocorr([1, 2, 3, 4, 5]) == pytest.approx(0.4, abs=1e-15)


def test_autocorr_alternating():
    x = [1, -1] * 5
    assert autocorr_oracle(x, 1) == Fraction(-9, 10)
    assert autocorr(x) == pytest.approx(-0.9, abs=1e-15)


def test_zero_variance_convention():
    assert autocorr([4.0] * 9) == 1.0


def test_autocorr_needs_lag_plus_two():
    autocorr([1, 2, 3], lag=1)
    with pytest.raises(InsufficientData):
        autocorr([1, 2], lag=1)
    with pytest.raises(InsufficientData):
        autocorr([1, 2, 3, 4], lag=3)


ints = st.lists(st.integers(-1000, 1000), min_size=5, max_size=40)


@settings(max_examples=200)
@given(xs=ints, lag=st.integers(1, 3))
def test_autocorr_matches_exact_oracle(xs, lag):
    assume(len(set(xs)) > 1 and len(xs) >= lag + 2)
    assert autocorr(xs, lag) == pytest.approx(float(autocorr_oracle(xs, lag)), abs=1e-12)


@settings(max_examples=200)
@given(
    xs=ints,
    a=st.floats(1e-3, 1e3) | st.floats(-1e3, -1e-3),
    b=st.floats(-1e3, 1e3),
)
def test_autocorr_affine_invariance(xs, a, b):
    assume(len(set(xs)) > 1)
    x = np.asarray(xs, dtype=float)
    assert autocorr(a * x + b) == pytest.approx(autocorr(x), abs=1e-9)


def test_lag_profile():
    x = np.sin(np.arange(50) / 3.0)
    assert lag_profile(x, 3).tolist() == [autocorr(x, k) for k in (1, 2, 3)]


def test_filter_config_validation():
    assert FilterConfig().iid_band(100) == pytest.approx(0.196)
    with pytest.raises(InvalidParams):
        FilterConfig(lag=64, min_samples=64)
    with pytest.raises(InvalidParams):
        FilterConfig(band_z=0)


def test_filter_passes_iid_exponential():
    passed = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        gaps = np.maximum(1, np.rint(rng.exponential(1000.0, 499))).astype(np.int64)
        passed += iid_filter(TimingTrace(np.concatenate(([0], np.cumsum(gaps))))).pass_normal
    assert passed >= 90


def test_filter_forwards_attacks():
    hits = 0
    for seed in range(100):
        out = iid_filter(gen_attack(channel_defaults(ChannelKind.MEMORY_BUS), seed))
        hits += out.forward and out.r >= 0.6
    assert hits >= 99


def test_constant_gap_trace_forwards_with_r_one():
    out = iid_filter(TimingTrace(np.arange(0, 100 * 70, 100)))
    assert out.forward and out.r == 1.0


def test_filter_min_samples():
    with pytest.raises(InsufficientData):
        iid_filter(TimingTrace(range(10)))


@settings(max_examples=100)
@given(start=st.integers(0, 10**9), step=st.integers(0, 10**6), n=st.integers(64, 400))
def test_arithmetic_progressions_always_forward(start, step, n):
    t = TimingTrace(start + step * np.arange(n))
    assert iid_filter(t).forward


# --- PMFs -----------------------------------------------------------------

def test_point_masses():
    assert convolve_pmf(Pmf.point(3), Pmf.point(-5)).as_dict() == {-2: 1.0}


def test_two_coins():
    coin = Pmf.uniform([0, 1])
    assert convolve_pmf(coin, coin).as_dict() == {0: 0.25, 1: 0.5, 2: 0.25}


def test_two_dice():
    die = Pmf.uniform(range(1, 7))
    z = convolve_pmf(die, die)
    assert z.support.tolist() == list(range(2, 13))
    assert z.prob(7) == pytest.approx(6 / 36, abs=1e-15)
    assert z.prob(1) == 0.0


def enumerate_oracle(p, q):
    out = {}
    for (a, pa), (b, qb) in product(p.as_dict().items(), q.as_dict().items()):
        out[a + b] = out.get(a + b, 0.0) + pa * qb
    return out


pmfs = st.lists(
    st.tuples(st.integers(-30, 30), st.floats(0.01, 1.0)), min_size=1, max_size=8,
    unique_by=lambda t: t[0],
).map(lambda items: Pmf(
    sorted(a for a, _ in items),
    np.array([w for _, w in sorted(items)]) / sum(w for _, w in items),
))


@settings(max_examples=150)
@given(p=pmfs, q=pmfs, r=pmfs)
def test_convolution_algebra(p, q, r):
    pq = convolve_pmf(p, q)
    oracle = enumerate_oracle(p, q)
    assert pq.support.tolist() == sorted(oracle)
    np.testing.assert_allclose(pq.probs, [oracle[a] for a in sorted(oracle)], atol=1e-12)
    assert abs(pq.probs.sum() - 1) < 1e-9
    qp = convolve_pmf(q, p)
    assert qp.support.tolist() == pq.support.tolist()
    np.testing.assert_allclose(qp.probs, pq.probs, atol=1e-12)
    left = convolve_pmf(pq, r)
    right = convolve_pmf(p, convolve_pmf(q, r))
    assert left.support.tolist() == right.support.tolist()
    np.testing.assert_allclose(left.probs, right.probs, atol=1e-12)


def test_pmf_validation():
    with pytest.raises(ValueError):
        Pmf([1, 1], [0.5, 0.5])
    with pytest.raises(ValueError):
        Pmf([1, 2], [0.7, 0.7])
    with pytest.raises(ValueError):
        Pmf([1, 2], [1.5, -0.5])
    with pytest.raises(ValueError):
        Pmf([], [])


def test_total_variation():
    a = Pmf([0, 1], [0.5, 0.5])
    b = Pmf([1, 2], [0.5, 0.5])
    assert total_variation(a, a) == 0.0
    assert total_variation(a, b) == pytest.approx(0.5)
    assert empirical_pmf([2, 2, 5, 2]).as_dict() == {2: 0.75, 5: 0.25}
