import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from collmind.comments import CommentNetwork
from collmind.metrics import (SeriesStats, comment_topic_profile, ensemble_ratio, kendall_tau_distance, quantile_sets,
                              similarity_quantile_diff)
from collmind.network import n_pairs, normalized_ranks

from oracles import kendall_brute


def test_kendall_examples():
    r = np.arange(1, 5) / 4
    assert kendall_tau_distance(r, r) == 0
    assert kendall_tau_distance(r, r[::-1]) == 1
    assert kendall_tau_distance(r, r[[1, 0, 2, 3]]) == pytest.approx(1 / 6)


@pytest.mark.parametrize("n", range(2, 7))
def test_kendall_all_permutations(n):
    base = np.arange(1, n + 1) / n
    for perm in itertools.permutations(range(n)):
        other = base[list(perm)]
        assert kendall_tau_distance(base, other) == pytest.approx(kendall_brute(base, other), abs=1e-15)


@given(arrays(np.float64, st.integers(2, 12), elements=st.floats(0, 1)),
       arrays(np.float64, 12, elements=st.floats(0, 1)))
def test_kendall_matches_brute_force_with_ties(a, b):
    b = b[: a.shape[0]]
    ra, rb = normalized_ranks(a), normalized_ranks(b)
    assert kendall_tau_distance(ra, rb) == pytest.approx(kendall_brute(ra, rb), abs=1e-12)
    # raw values with ties in the first argument
    assert kendall_tau_distance(np.round(a, 1), b) == pytest.approx(kendall_brute(np.round(a, 1), b), abs=1e-12)


def test_kendall_length_mismatch():
    with pytest.raises(ValueError):
        kendall_tau_distance(np.ones(3), np.ones(4))


def test_profiles():
    n = 6
    one = np.zeros(n)
    one[2] = 5.0
    assert np.array_equal(comment_topic_profile(CommentNetwork(one, np.zeros(n_pairs(n)), 5.0)), np.eye(n)[2])
    assert np.allclose(comment_topic_profile(np.full(n, 3.0)), 1 / n)
    x = np.random.default_rng(0).exponential(size=n)
    assert abs(comment_topic_profile(x).sum() - 1) < 1e-12
    with pytest.raises(ValueError):
        comment_topic_profile(np.zeros(n))


def test_ratio_examples():
    x = np.random.default_rng(1).uniform(0.5, 1.5, (20, 30))
    ratio, band = ensemble_ratio(x, x)
    assert np.all(ratio == 1.0)
    ratio, _ = ensemble_ratio(SeriesStats(np.array([0.008]), np.zeros(1), 5),
                              SeriesStats(np.array([0.004]), np.zeros(1), 5))
    assert ratio[0] == pytest.approx(2.0)
    a, b = np.array([[1.0, 2.0, 3.0]]), np.array([[2.0, 2.0, 6.0]])
    ratio, band = ensemble_ratio(a, b)
    assert np.allclose(ratio, [0.5, 1.0, 0.5]) and np.all(band == 0)


def test_ratio_band_delta_method():
    rng = np.random.default_rng(2)
    a = rng.normal(2.0, 0.2, (400, 1))
    b = rng.normal(1.0, 0.1, (400, 1))
    ratio, band = ensemble_ratio(a, b)
    expected = ratio * np.sqrt((a.std() / a.mean()) ** 2 + (b.std() / b.mean()) ** 2) / np.sqrt(400)
    assert band == pytest.approx(expected)
    _, spread = ensemble_ratio(a, b, standard_error=False)
    assert spread == pytest.approx(expected * np.sqrt(400))


def test_paired_ratio_band_uses_covariance():
    rng = np.random.default_rng(4)
    shared = rng.normal(0, 0.3, (300, 1))
    a = 2.0 + shared + rng.normal(0, 0.05, (300, 1))
    b = 1.0 + 0.5 * shared + rng.normal(0, 0.05, (300, 1))
    ratio, band = ensemble_ratio(a, b, paired=True)
    grad = np.array([1 / b.mean(), -a.mean() / b.mean() ** 2])
    cov = np.cov(np.hstack([a, b]).T, ddof=0) / 300
    assert band[0] == pytest.approx(np.sqrt(grad @ cov @ grad))
    assert band[0] < ensemble_ratio(a, b)[1][0]
    x = rng.uniform(1, 2, (10, 4))
    assert np.allclose(ensemble_ratio(x, x, paired=True)[1], 0, atol=1e-8)
    with pytest.raises(ValueError):
        ensemble_ratio(SeriesStats(np.ones(1), np.ones(1), 2), x[:2, :1], paired=True)


def test_ratio_errors():
    with pytest.raises(ValueError):
        ensemble_ratio(np.ones((3, 5)), np.ones((4, 5)))
    with pytest.raises(ValueError):
        ensemble_ratio(np.ones((3, 5)), np.ones((3, 6)))
    with pytest.raises(ZeroDivisionError):
        ensemble_ratio(np.ones((3, 5)), np.zeros((3, 5)))


def test_quantile_sets_counting():
    top, bottom = quantile_sets(np.linspace(0, 1, 10), 0)
    assert len(top) == len(bottom) == 1      # floor(9 * 0.2)
    top, bottom = quantile_sets(np.linspace(0, 1, 11), 0)
    assert len(top) == 2 and len(bottom) == 2
    assert set(top) == {9, 10} and set(bottom) == {1, 2}
    top, _ = quantile_sets(np.arange(5.0), 4, 0.2)
    assert len(top) == 1


def test_similarity_diff():
    rng = np.random.default_rng(3)
    w0 = rng.uniform(0, 1, (10, 10))
    w0 = (w0 + w0.T) / 2
    np.fill_diagonal(w0, 0)
    assert similarity_quantile_diff(w0, w0, w0, 3) == (0.0, 0.0)
    shifted = w0.copy()
    shifted[3] += 0.1
    shifted[:, 3] += 0.1
    shifted[3, 3] = 0
    top, bot = similarity_quantile_diff(shifted, w0, w0, 3)
    assert top == pytest.approx(0.1) and bot == pytest.approx(0.1)
    with pytest.raises(ValueError):
        similarity_quantile_diff(w0[:9, :9], w0[:9, :9], w0[:9, :9], 3)
