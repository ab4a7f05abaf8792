import numpy as np
import pytest

from collmind.config import TARGET_TOPIC
from collmind.influence import Influence, InfluenceSchedule
from collmind.metrics import ensemble_ratio
from collmind.rng import SeedSpec
from collmind.simulation import METRICS, ModelParameters, SimulationError, run_ensemble, run_simulation

SMALL = ModelParameters(n_topics=40, n_events=200, horizon=30)


def test_zero_horizon_keeps_initial_state_only():
    rec = run_simulation(SMALL.replace(horizon=0), seed=1, snapshot_every=5)
    assert list(rec.snapshots) == [0]
    assert all(v.shape == (0,) for v in rec.metrics.values())


def test_same_seed_same_records():
    a = run_simulation(SMALL, seed=SeedSpec(9, 2), snapshot_every=10)
    b = run_simulation(SMALL, seed=SeedSpec(9, 2), snapshot_every=10)
    for name in METRICS:
        assert np.array_equal(a.metrics[name], b.metrics[name])
    assert np.array_equal(a.profiles, b.profiles)
    assert np.array_equal(a.snapshots[30].pair_weights, b.snapshots[30].pair_weights)


def test_different_replicas_differ():
    a = run_simulation(SMALL, seed=SeedSpec(9, 0))
    b = run_simulation(SMALL, seed=SeedSpec(9, 1))
    assert not np.array_equal(a.profiles, b.profiles)


def test_defaults_give_250_news_and_normalized_frequencies():
    p = ModelParameters(horizon=40)
    rec = run_simulation(p, seed=3, keep_news=True)
    assert p.news_per_step == 250
    assert all(n.shape == (250, 3) for n in rec.news)
    assert np.all(rec.metrics["n_news"] == 250)
    assert rec.metrics["freq_sum_error"].max() < 1e-12
    assert rec.metrics["weight_min"].min() >= 0
    assert rec.metrics["weight_max"].max() <= p.update.w_max
    assert np.allclose(rec.profiles.sum(axis=1), 1, atol=1e-12)


def test_snapshot_cadence_includes_final_state():
    rec = run_simulation(SMALL.replace(horizon=23), seed=0, snapshot_every=10)
    assert sorted(rec.snapshots) == [0, 10, 20, 23]


def test_empty_schedule_equals_no_schedule():
    a = run_simulation(SMALL, None, seed=4)
    b = run_simulation(SMALL, InfluenceSchedule(), seed=4)
    assert np.array_equal(a.profiles, b.profiles)


def test_invalid_schedule_rejected_before_running():
    late = InfluenceSchedule((Influence("troll", 10, 99, 1.5, 3),))
    with pytest.raises(ValueError):
        run_simulation(SMALL, late, seed=0)


def test_step_errors_carry_step_index(monkeypatch):
    import collmind.simulation as sim

    calls = {"n": 0}
    real = sim.filter_events

    def flaky(*args, **kwargs):
        calls["n"] += 1
        if calls["n"] == 4:
            raise RuntimeError("boom")
        return real(*args, **kwargs)

    monkeypatch.setattr(sim, "filter_events", flaky)
    with pytest.raises(SimulationError, match="step 3"):
        run_simulation(SMALL, seed=0)


def test_single_replica_ensemble_has_zero_spread():
    res = run_ensemble(SMALL, n_replicas=1, master_seed=5)
    rec = run_simulation(SMALL, seed=SeedSpec(5, 0))
    for name in METRICS:
        assert np.array_equal(res.mean(name), rec.metrics[name])
        assert np.all(res.std(name) == 0)


def test_ensemble_independent_of_jobs():
    a = run_ensemble(SMALL, n_replicas=4, master_seed=11, jobs=1, snapshot_every=10)
    b = run_ensemble(SMALL, n_replicas=4, master_seed=11, jobs=3, snapshot_every=10)
    for name in METRICS:
        assert np.array_equal(a.mean(name), b.mean(name))
        assert np.array_equal(a.std(name), b.std(name))
    assert np.array_equal(a.mean_profiles, b.mean_profiles)


def test_ensemble_matches_direct_reduction():
    res = run_ensemble(SMALL, n_replicas=3, master_seed=2, keep_replicas=True)
    stacked = np.array([run_simulation(SMALL, seed=SeedSpec(2, k)).metrics["kd_general_comment"] for k in range(3)])
    assert np.array_equal(res.replicas["kd_general_comment"], stacked)
    assert np.allclose(res.mean("kd_general_comment"), stacked.mean(axis=0), rtol=1e-14)
    assert np.allclose(res.std("kd_general_comment"), stacked.std(axis=0), rtol=1e-12, atol=1e-15)


def test_ensemble_requires_a_replica():
    with pytest.raises(ValueError):
        run_ensemble(SMALL, n_replicas=0)


@pytest.mark.slow
def test_amplification_ratio_band_is_defined_everywhere():
    p = ModelParameters(horizon=160)
    amp = InfluenceSchedule((Influence("amplification", 100, 150, 25.0, TARGET_TOPIC),))
    inf = run_ensemble(p, amp, n_replicas=100, master_seed=1)
    base = run_ensemble(p, None, n_replicas=100, master_seed=2)
    ratio, band = ensemble_ratio(inf.stats["news_target"], base.stats["news_target"])
    assert np.all(np.isfinite(ratio)) and np.all(np.isfinite(band)) and np.all(band > 0)
    assert ratio[100:150].mean() > 1
