from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import make_series
from cpboot import (
    BootstrapConfig,
    Kind,
    TimeSeries,
    bootstrap_changepoint_distribution,
    empirical_quantile,
    generate_amoc,
    lambda_distribution,
    percentile_interval,
    resample_pairs,
)
from cpboot.bootstrap import BootstrapDistribution, bootstrap_changepoints
from cpboot.rng import Stream


@pytest.fixture
def clean_step():
    return make_series([0.0] * 20 + [10.0] * 20)


def test_config_validation():
    with pytest.raises(ValueError):
        BootstrapConfig(b_inner=1)
    with pytest.raises(ValueError):
        BootstrapConfig(r_outer=1)
    with pytest.raises(ValueError):
        BootstrapConfig(alpha_ci=1.0)


def test_resample_single_point():
    s = TimeSeries([4.0], [2.5])
    assert resample_pairs(s, Stream(9)) == s


def test_resample_keeps_pairs_and_order():
    rng = np.random.default_rng(0)
    s = TimeSeries(np.sort(rng.uniform(0, 10, 30)), rng.normal(size=30))
    r = resample_pairs(s, Stream(5))
    pairs = set(zip(s.t.tolist(), s.y.tolist()))
    assert all(p in pairs for p in zip(r.t.tolist(), r.y.tolist()))
    assert np.all(np.diff(r.t) >= 0)
    assert r.n == s.n
    assert r.provenance.kind is Kind.BOOTSTRAP_REPLICATE


def test_resample_deterministic():
    s = make_series(np.arange(20.0))
    assert resample_pairs(s, Stream(3)) == resample_pairs(s, Stream(3))
    assert resample_pairs(s, Stream(3)) != resample_pairs(s, Stream(4))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_replicates_match_explicit_refit(seed):
    """Each replicate's changepoint equals a brute-force refit of the resampled series."""
    rng = np.random.default_rng(seed)
    n = 30
    y = rng.normal(size=n)
    y[12:] += 2.0
    s = make_series(y)
    stream = Stream(seed).child("check")
    c = bootstrap_changepoints(s, 40, 3, stream)
    idx = np.sort(stream.generator().integers(0, n, size=(40, n)), axis=1)
    for j in range(40):
        k = oracles.argmax_split(s.t[idx[j]], s.y[idx[j]], 3)
        assert c[j] == idx[j, k - 1] + 1
    first = resample_pairs(s, stream)
    assert np.array_equal(first.t, s.t[idx[0]])


def test_clean_step_distribution(clean_step):
    d = bootstrap_changepoint_distribution(clean_step, BootstrapConfig(1000, 2), Stream(0))
    counts = Counter(d.values.tolist())
    # last drawn index at or before the step: 20 unless observation 20 was not drawn
    assert max(counts) == 20
    assert counts.most_common(1)[0][0] == 20
    p20 = 1 - (1 - 1 / 40) ** 40
    assert counts[20] / 1000 == pytest.approx(p20, abs=0.05)
    assert np.all(d.values >= 3) and np.all(d.values <= 37)


def test_noise_distribution_spreads():
    x = generate_amoc(100, 50, 0.0, rng=Stream(1))
    d = bootstrap_changepoint_distribution(x, BootstrapConfig(1000, 2), Stream(2))
    assert len(d) == 1000
    assert d.values.min() >= 3 and d.values.max() <= 97
    assert np.ptp(d.values) > 0
    assert np.all(np.diff(d.values) >= 0)


def test_distribution_determinism(clean_step):
    x = generate_amoc(60, 30, 1.0, rng=Stream(4))
    cfg = BootstrapConfig(200, 2)
    a = bootstrap_changepoint_distribution(x, cfg, Stream(11))
    b = bootstrap_changepoint_distribution(x, cfg, Stream(11))
    c = bootstrap_changepoint_distribution(x, cfg, Stream(12))
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_short_series_redraws_until_admissible():
    s = make_series(np.r_[np.zeros(4), np.ones(4)])
    d = bootstrap_changepoint_distribution(s, BootstrapConfig(300, 2), Stream(0))
    assert np.all((d.values >= 3) & (d.values <= 5))


def _dist(values):
    return BootstrapDistribution(np.sort(np.asarray(values)), 200, 3)


def test_percentile_constant():
    ci = percentile_interval(_dist([7] * 50), 0.05)
    assert (ci.lower, ci.upper, ci.length) == (7, 7, 0)


def test_percentile_hand_example():
    ci = percentile_interval(_dist(np.arange(1, 101)), 0.05)
    # h = 99*0.025 + 1 = 3.475 -> 3 + 0.475; h = 99*0.975 + 1 = 97.525
    assert ci.lower == pytest.approx(3.475, abs=1e-9)
    assert ci.upper == pytest.approx(97.525, abs=1e-9)
    assert ci.length == pytest.approx(94.05, abs=1e-9)
    assert ci.level == pytest.approx(0.95)


def test_percentile_empty():
    with pytest.raises(ValueError):
        percentile_interval(_dist([]), 0.05)


values_strategy = st.lists(st.integers(0, 500), min_size=1, max_size=200)


@settings(max_examples=100, deadline=None)
@given(values_strategy, st.floats(0, 1))
def test_quantile_matches_hand_formula_and_numpy(values, p):
    q = empirical_quantile(values, p)
    assert q == pytest.approx(oracles.quantile_by_hand(values, p), abs=1e-9)
    assert q == pytest.approx(float(np.quantile(values, p)), abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(values_strategy, st.floats(0.001, 0.999), st.integers(-1000, 1000))
def test_interval_length_translation_invariant(values, alpha, shift):
    a = percentile_interval(_dist(values), alpha)
    b = percentile_interval(_dist(np.asarray(values) + shift), alpha)
    assert b.length == pytest.approx(a.length, abs=1e-9)
    assert a.length >= 0


@settings(max_examples=100, deadline=None)
@given(values_strategy, st.floats(0.001, 0.999))
def test_quantile_sandwich(values, alpha):
    lo = empirical_quantile(values, alpha / 2)
    mid = empirical_quantile(values, 0.5)
    hi = empirical_quantile(values, 1 - alpha / 2)
    assert lo <= mid <= hi


def test_lambda_clean_step_is_short(clean_step):
    lam = lambda_distribution(clean_step, BootstrapConfig(500, 5), Stream(0))
    assert lam.shape == (5,)
    assert np.all(lam <= 6)


def test_lambda_two_reps_reproducible():
    x = generate_amoc(50, 25, 1.0, rng=Stream(2))
    cfg = BootstrapConfig(100, 2)
    a = lambda_distribution(x, cfg, Stream(7))
    assert a.shape == (2,)
    assert np.array_equal(a, lambda_distribution(x, cfg, Stream(7)))


def test_lambda_bounds_and_noise_vs_step():
    cfg = BootstrapConfig(400, 10)
    noise = generate_amoc(100, 50, 0.0, rng=Stream(5))
    step = generate_amoc(100, 50, 4.0, rng=Stream(5))
    ln = lambda_distribution(noise, cfg, Stream(1))
    ls = lambda_distribution(step, cfg, Stream(1))
    for lam in (ln, ls):
        assert np.all((lam >= 0) & (lam <= 100 - 6))
    assert np.median(ln) > np.median(ls)


def test_lambda_independent_of_workers():
    x = generate_amoc(60, 30, 1.5, rng=Stream(8))
    one = lambda_distribution(x, BootstrapConfig(100, 6, workers=1), Stream(3))
    two = lambda_distribution(x, BootstrapConfig(100, 6, workers=2), Stream(3))
    assert one.tobytes() == two.tobytes()
