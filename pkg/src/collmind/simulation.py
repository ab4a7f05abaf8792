"""Per-step simulation loop and replica ensembles."""
from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .comments import CommentParams, generate_comment_network
from .events import base_event_distribution, evolve_event_distribution, generate_events
from .filtering import FilterParams, filter_events
from .influence import InfluenceSchedule, apply_external_shock, resolve_schedule
from .metrics import SeriesStats, comment_topic_profile, kendall_tau_distance, quantile_sets
from .network import (InitParams, SemanticNetwork, init_community_network, init_general_network,
                      normalized_ranks, pair_index)
from .rng import SeedSpec, replica_streams
from .update import UpdateParams, update_frequencies, update_weights

log = logging.getLogger(__name__)

METRICS = (
    "kd_general_comment",     # Kendall distance: general ranks vs. comment-profile ranks
    "kd_general_community",   # Kendall distance: general ranks vs. community ranks
    "news_target",            # target occurrences per news item (any tier)
    "news_target_tier1",
    "news_target_tier2",
    "news_target_tier3",
    "comment_target",         # target share of the comment profile
    "sim_target_top",         # mean community similarity target -> initially most similar topics
    "sim_target_bottom",      # same for the initially least similar topics
    "n_news",
    "overflow_fraction",
    "comment_mass",
    "freq_sum_error",
    "weight_min",
    "weight_max",
)


@dataclass(frozen=True)
class ModelParameters:
    n_topics: int = 250
    n_events: int = 1000
    n_tiers: int = 3
    horizon: int = 500
    lambda_f: float = 0.2
    lambda_m: float = 0.9
    lambda_e: float = 0.5
    init: InitParams = field(default_factory=InitParams)
    filter: FilterParams = field(default_factory=FilterParams)
    comments: CommentParams = field(default_factory=CommentParams)
    update: UpdateParams = field(default_factory=UpdateParams)
    # topic followed by the target-specific metrics (25th most frequent general topic)
    track_topic: int = 24
    quantile: float = 0.2

    def __post_init__(self):
        if self.n_topics < 2:
            raise ValueError("n_topics must be >= 2")
        if self.n_tiers < 2 or self.n_tiers > self.n_topics:
            raise ValueError("n_tiers must lie in [2, n_topics]")
        if len(self.filter.alpha) < self.n_tiers or len(self.comments.rate_coeffs) < self.n_tiers:
            raise ValueError("per-tier constants must cover every tier")
        if self.n_events < 1 or self.horizon < 0:
            raise ValueError("n_events must be positive and horizon non-negative")
        if self.lambda_f < 0:
            raise ValueError("lambda_f must be non-negative")
        if not 0 <= self.lambda_m <= 1 or not 0 <= self.lambda_e <= 1:
            raise ValueError("lambda_m and lambda_e must lie in [0, 1]")
        if not 0 <= self.track_topic < self.n_topics:
            raise ValueError("track_topic out of range")
        if int(np.floor(self.filter.r2 * np.floor(self.filter.r1 * self.n_events))) < 1:
            raise ValueError("filter ratios leave no news per step")

    @property
    def news_per_step(self) -> int:
        return int(np.floor(self.filter.r2 * np.floor(self.filter.r1 * self.n_events)))

    def replace(self, **changes) -> "ModelParameters":
        return dataclasses.replace(self, **changes)


@dataclass
class SimulationRecord:
    metrics: dict
    profiles: Optional[np.ndarray]
    snapshots: dict
    general: SemanticNetwork
    news: Optional[list] = None


class SimulationError(RuntimeError):
    pass


def run_simulation(params: ModelParameters, schedule: InfluenceSchedule | None = None,
                   seed: SeedSpec | int = 0, snapshot_every: int = 0, keep_profiles: bool = True,
                   keep_news: bool = False) -> SimulationRecord:
    """Run one replica for ``params.horizon`` steps.

    Metric arrays have one entry per step. Network metrics (Kendall distances
    to the community, similarity sets) describe the state entering the step;
    news and comment metrics describe the step's output. ``snapshot_every > 0``
    stores the community network every that many steps plus the final state.
    """
    schedule = schedule or InfluenceSchedule()
    schedule.validate(params.horizon, params.n_topics, params.n_tiers)
    if isinstance(seed, SeedSpec):
        master, replica = seed.master_seed, seed.replica_index
    else:
        master, replica = int(seed), 0
    streams = replica_streams(master, replica)

    n, T = params.n_topics, params.horizon
    general = init_general_network(n, params.init, streams["init"])
    community = init_community_network(general, params.init, streams["init"])
    target = params.track_topic
    init_row = community.weight[target]
    top, bottom = quantile_sets(init_row, target, params.quantile)
    top_idx = pair_index(target, top, n)
    bottom_idx = pair_index(target, bottom, n)

    metrics = {name: np.zeros(T) for name in METRICS}
    profiles = np.zeros((T, n)) if keep_profiles else None
    snapshots = {0: community} if snapshot_every > 0 else {}
    news_log = [] if keep_news else None

    event_dist = base_event_distribution(general.ranks)
    for t in range(T):
        try:
            step = resolve_schedule(schedule, params.lambda_f, params.lambda_m, t)
            general_t = apply_external_shock(general, step.shock_boost, step.shock_target, params.init.alpha_c)
            event_dist = evolve_event_distribution(event_dist, general_t.ranks, params.lambda_e,
                                                   params.n_events * params.n_tiers, streams["events"])
            events = generate_events(event_dist, params.n_events, params.n_tiers, streams["events"])
            news = filter_events(events, community, general_t, params.filter, step, streams["filter"],
                                 streams["reframe"])
            comments = generate_comment_network(news, community.frequency, community.ranks, params.comments,
                                                streams["comments"], step.s_tr, step.troll_target, step.s_cs)
            profile = comment_topic_profile(comments)

            m_news = news.shape[0]
            is_target = news == target
            metrics["kd_general_comment"][t] = kendall_tau_distance(general_t.ranks, normalized_ranks(profile))
            metrics["kd_general_community"][t] = kendall_tau_distance(general_t.ranks, community.ranks)
            metrics["news_target"][t] = is_target.sum() / m_news
            for q in range(min(params.n_tiers, 3)):
                metrics[f"news_target_tier{q + 1}"][t] = is_target[:, q].sum() / m_news
            metrics["comment_target"][t] = profile[target]
            metrics["sim_target_top"][t] = community.pair_weights[top_idx].mean()
            metrics["sim_target_bottom"][t] = community.pair_weights[bottom_idx].mean()
            metrics["n_news"][t] = m_news
            metrics["overflow_fraction"][t] = comments.n_overflow / m_news
            metrics["comment_mass"][t] = comments.total_mass
            if profiles is not None:
                profiles[t] = profile
            if news_log is not None:
                news_log.append(news)

            freq = update_frequencies(community, comments, step.lambda_m, params.init.alpha_c)
            weights = update_weights(community, comments, params.update, streams["noise"], params.n_tiers)
            community = SemanticNetwork(freq, weights, t + 1)
            metrics["freq_sum_error"][t] = abs(freq.sum() - 1.0)
            metrics["weight_min"][t] = weights.min()
            metrics["weight_max"][t] = weights.max()
        except Exception as exc:
            raise SimulationError(f"step {t}: {exc}") from exc
        if snapshot_every > 0 and ((t + 1) % snapshot_every == 0 or t + 1 == T):
            snapshots[t + 1] = community
    return SimulationRecord(metrics, profiles, snapshots, general, news_log)


@dataclass
class EnsembleResult:
    stats: dict                 # metric name -> SeriesStats
    mean_profiles: np.ndarray   # (T, N) ensemble-mean comment profile
    n_replicas: int
    master_seed: int
    params: ModelParameters
    schedule: InfluenceSchedule
    first_record: Optional[SimulationRecord] = None
    replicas: Optional[dict] = None    # metric -> (n_replicas, T) array, when kept

    def mean(self, name: str) -> np.ndarray:
        return self.stats[name].mean

    def std(self, name: str) -> np.ndarray:
        return self.stats[name].std


class _Welford:
    def __init__(self):
        self.k = 0
        self.mean = None
        self.m2 = None

    def add(self, x):
        self.k += 1
        if self.mean is None:
            self.mean = np.array(x, dtype=float)
            self.m2 = np.zeros_like(self.mean)
            return
        delta = x - self.mean
        self.mean = self.mean + delta / self.k
        self.m2 = self.m2 + delta * (x - self.mean)

    def std(self):
        return np.sqrt(self.m2 / self.k)


def _replica_job(args):
    params, schedule, master_seed, replica, snapshot_every = args
    rec = run_simulation(params, schedule, SeedSpec(master_seed, replica), snapshot_every=snapshot_every)
    if replica != 0:
        rec.snapshots = {}
    return rec


def run_ensemble(params: ModelParameters, schedule: InfluenceSchedule | None = None, n_replicas: int = 1,
                 master_seed: int = 0, jobs: int = 1, snapshot_every: int = 0,
                 keep_replicas: bool = False) -> EnsembleResult:
    """Run independent replicas and reduce them in replica order.

    Replica ``k`` draws from substreams keyed by ``(master_seed, k)``, and the
    reduction always visits replicas in index order, so the result does not
    depend on ``jobs``. Snapshots are kept for replica 0 only. With
    ``keep_replicas`` the per-replica metric series are returned as well.
    """
    if n_replicas < 1:
        raise ValueError("n_replicas must be >= 1")
    schedule = schedule or InfluenceSchedule()
    tasks = [(params, schedule, master_seed, k, snapshot_every if k == 0 else 0) for k in range(n_replicas)]
    acc = {name: _Welford() for name in METRICS}
    prof = _Welford()
    first = None
    per_replica = {name: [] for name in METRICS} if keep_replicas else None

    def consume(records):
        nonlocal first
        for rec in records:
            if first is None:
                first = rec
            for name in METRICS:
                acc[name].add(rec.metrics[name])
                if per_replica is not None:
                    per_replica[name].append(rec.metrics[name])
            prof.add(rec.profiles)
            rec.profiles = None

    if jobs <= 1 or n_replicas == 1:
        consume(_replica_job(t) for t in tasks)
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            consume(pool.map(_replica_job, tasks, chunksize=1))

    T = params.horizon
    stats = {}
    for name in METRICS:
        a = acc[name]
        mean = a.mean if a.mean is not None else np.zeros(T)
        std = a.std() if a.mean is not None else np.zeros(T)
        stats[name] = SeriesStats(mean, std, n_replicas)
    mean_profiles = prof.mean if prof.mean is not None else np.zeros((T, params.n_topics))
    log.info("ensemble done: %d replicas x %d steps", n_replicas, T)
    kept = {k: np.array(v) for k, v in per_replica.items()} if per_replica is not None else None
    return EnsembleResult(stats, mean_profiles, n_replicas, master_seed, params, schedule, first, kept)
