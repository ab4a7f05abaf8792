import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from collmind.events import base_event_distribution, generate_events
from collmind.filtering import FilterParams, filter_events, stage1_log_weights, stage1_select, stage2_select
from collmind.influence import ResolvedStepParams
from collmind.network import InitParams, init_community_network, init_general_network, n_pairs, pair_index

P_FIRST = 0.8339910845345533   # ranks (1,2,3)/10 vs (4,5,6)/10, hand-computed weights


def defaults(n=250, seed=0, sigma=1.0):
    p = InitParams(sigma_fp=sigma, sigma_wp=0.05)
    g = init_general_network(n, p, np.random.default_rng(seed))
    c = init_community_network(g, p, np.random.default_rng(seed + 1))
    ev = generate_events(base_event_distribution(g.ranks), 1000, 3, np.random.default_rng(seed + 2))
    return g, c, ev


def test_stage1_size():
    g, c, ev = defaults()
    out = stage1_select(ev, g.ranks, FilterParams(), np.random.default_rng(0))
    assert out.shape == (500, 3)


def test_stage1_flat_weights_uniform():
    ev = np.arange(60).reshape(20, 3)
    ranks = np.random.default_rng(0).permutation(np.arange(1, 61) / 60)
    params = FilterParams(alpha=(0, 0, 0), r1=0.5)
    assert np.all(stage1_log_weights(ev, ranks, params) == 0)
    rng = np.random.default_rng(1)
    counts = np.zeros(20)
    for _ in range(4000):
        kept = stage1_select(ev, ranks, params, rng)[:, 0] // 3
        counts[kept] += 1
    assert np.abs(counts / 4000 - 0.5).max() < 0.04


def test_stage1_two_event_probability():
    ranks = np.arange(1, 11) / 10
    ev = np.array([[0, 1, 2], [3, 4, 5]])
    lw = stage1_log_weights(ev, ranks, FilterParams())
    w = np.exp(lw)
    assert w[0] / w.sum() == pytest.approx(P_FIRST, rel=1e-12)
    rng = np.random.default_rng(2)
    hits = sum(stage1_select(ev, ranks, FilterParams(), rng)[0, 0] == 0 for _ in range(100_000))
    assert abs(hits / 100_000 - P_FIRST) < 0.005


def test_stage1_popular_topics_favored():
    # a topic's tier-1 incidence after stage 1 rises when its rank improves
    n = 30
    ranks = np.arange(1, n + 1) / n
    ev = generate_events(base_event_distribution(ranks), 100_000, 3, np.random.default_rng(3))
    better = ranks.copy()
    better[[10, 2]] = better[[2, 10]]     # topic 10 now third-most popular
    params = FilterParams()
    base = stage1_select(ev, ranks, params, np.random.default_rng(4))
    moved = stage1_select(ev, better, params, np.random.default_rng(4))
    assert np.mean(moved[:, 0] == 10) > np.mean(base[:, 0] == 10)


def test_stage2_ties_keep_input_order():
    ev = np.arange(1500).reshape(500, 3) % 250
    out = stage2_select(ev, np.full(n_pairs(250), 0.5), FilterParams(), 250)
    assert np.array_equal(out, ev[:250])


def test_stage2_dominance():
    n = 6
    w = np.zeros(n_pairs(n))
    w[pair_index(np.array([3, 3, 4]), np.array([4, 5, 5]), n)] = 0.8
    w[pair_index(np.array([0, 0, 1]), np.array([1, 2, 2]), n)] = 0.1
    ev = np.array([[0, 1, 2], [3, 4, 5]])
    assert np.array_equal(stage2_select(ev, w, FilterParams(r2=0.5), n), [[3, 4, 5]])


def test_stage2_negative_weights_floored():
    n = 4
    w = np.array([-0.5, 0.2, 0.3, 0.4, 0.5, 0.6])
    ev = np.array([[0, 1, 2], [1, 2, 3]])
    assert np.array_equal(stage2_select(ev, w, FilterParams(r2=0.5), n), [[1, 2, 3]])


def test_filter_default_size_and_zero_filter_ignores_community():
    g, c, ev = defaults()
    _, c2, _ = defaults(seed=10)
    step = ResolvedStepParams(lambda_f=0.0, lambda_m=0.9)
    a = filter_events(ev, c, g, FilterParams(), step, np.random.default_rng(5))
    b = filter_events(ev, c2, g, FilterParams(), step, np.random.default_rng(5))
    assert a.shape == (250, 3)
    assert np.array_equal(a, b)


def test_filter_reframing_count():
    g, c, ev = defaults()
    base_step = ResolvedStepParams(lambda_f=0.2, lambda_m=0.9)
    ref_step = ResolvedStepParams(lambda_f=0.2, lambda_m=0.9, p_ref=0.04, ref_target=24, ref_tier=1)
    extra = []
    for s in range(200):
        a = filter_events(ev, c, g, FilterParams(), base_step, np.random.default_rng(s), np.random.default_rng(s + 1000))
        b = filter_events(ev, c, g, FilterParams(), ref_step, np.random.default_rng(s), np.random.default_rng(s + 1000))
        extra.append(int((b[:, 1] == 24).sum() - (a[:, 1] == 24).sum()))
        assert 10 - 10 <= extra[-1] <= 10 + 10
    assert abs(np.mean(extra) - 10 * (1 - np.mean([(x == 24).any() for x in a]))) < 1.0


def test_filter_params_checked():
    with pytest.raises(ValueError):
        FilterParams(r1=0)
    with pytest.raises(ValueError):
        FilterParams(alpha=(np.inf, 0, 0))


@given(st.integers(2, 400), st.floats(0.05, 1.0), st.floats(0.05, 1.0), st.integers(0, 1000))
@settings(max_examples=40, deadline=None)
def test_output_size_invariant(n_events, r1, r2, seed):
    n = 20
    g = init_general_network(n, InitParams(), np.random.default_rng(seed))
    ev = generate_events(base_event_distribution(g.ranks), n_events, 3, np.random.default_rng(seed))
    params = FilterParams(r1=r1, r2=r2)
    if int(np.floor(r1 * n_events)) == 0:
        return
    step = ResolvedStepParams(lambda_f=0.3, lambda_m=0.9)
    news = filter_events(ev, g, g, params, step, np.random.default_rng(seed))
    assert news.shape[0] == int(np.floor(r2 * np.floor(r1 * n_events)))
