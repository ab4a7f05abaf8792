"""Measurements on networks, comment profiles and ensemble summaries."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .comments import CommentNetwork


@dataclass(frozen=True, eq=False)
class SeriesStats:
    """Per-step ensemble mean and (population) standard deviation over ``n`` replicas."""

    mean: np.ndarray
    std: np.ndarray
    n: int

    @classmethod
    def from_replicas(cls, values) -> "SeriesStats":
        v = np.atleast_2d(np.asarray(values, dtype=float))
        return cls(v.mean(axis=0), v.std(axis=0), v.shape[0])

    @property
    def sem(self) -> np.ndarray:
        return self.std / np.sqrt(self.n)

    def __len__(self):
        return self.mean.shape[0]


def kendall_tau_distance(rank_a, rank_b) -> float:
    """Fraction of topic pairs ordered differently by the two rankings."""
    a = np.asarray(rank_a, dtype=float)
    b = np.asarray(rank_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("rankings must have the same length")
    n = a.shape[0]
    if n < 2:
        return 0.0
    order = np.argsort(a, kind="stable")
    seq = b[order]
    # pairs (i < j) in a-order where b disagrees
    disc = (seq[:, None] > seq[None, :]) & _upper_mask(n)
    sa = a[order]
    if np.any(sa[1:] == sa[:-1]):
        disc &= sa[:, None] < sa[None, :]
    return float(np.count_nonzero(disc)) / (n * (n - 1) / 2)


@lru_cache(maxsize=8)
def _upper_mask(n: int) -> np.ndarray:
    m = np.triu(np.ones((n, n), dtype=bool), 1)
    m.flags.writeable = False
    return m


def comment_topic_profile(comments) -> np.ndarray:
    """Comment mass normalized to shares, in topic-index order."""
    mass = comments.frequency_mass if isinstance(comments, CommentNetwork) else np.asarray(comments, dtype=float)
    total = mass.sum()
    if not total > 0:
        raise ValueError("comment network has no mass")
    return mass / total


def _as_stats(x) -> SeriesStats:
    return x if isinstance(x, SeriesStats) else SeriesStats.from_replicas(x)


def ensemble_ratio(influenced, baseline, standard_error: bool = True, paired: bool = False):
    """Per-step ratio of ensemble means with a delta-method band.

    Inputs are replica arrays ``(n_replicas, T)`` or ``SeriesStats``. The band is
    the delta-method standard deviation of the ratio estimator; with
    ``standard_error=False`` the replica spreads are propagated instead.
    ``paired=True`` is for ensembles run with common random numbers (same
    master seed): replica ``k`` of each side is matched and their covariance
    enters the band, which needs replica arrays. Returns ``(ratio, band)``.
    """
    inf = _as_stats(influenced)
    base = _as_stats(baseline)
    if len(inf) != len(base):
        raise ValueError("series lengths differ")
    if inf.n != base.n:
        raise ValueError("replica counts differ")
    if np.any(base.mean == 0):
        raise ZeroDivisionError(f"baseline mean is zero at steps {np.flatnonzero(base.mean == 0)[:5].tolist()}")
    ratio = inf.mean / base.mean
    si = inf.sem if standard_error else inf.std
    sb = base.sem if standard_error else base.std
    with np.errstate(divide="ignore", invalid="ignore"):
        rel_i = np.where(inf.mean != 0, si / inf.mean, 0.0)
    var = rel_i ** 2 + (sb / base.mean) ** 2
    if paired:
        if isinstance(influenced, SeriesStats) or isinstance(baseline, SeriesStats):
            raise ValueError("paired ratios need per-replica arrays")
        a = np.atleast_2d(np.asarray(influenced, dtype=float))
        b = np.atleast_2d(np.asarray(baseline, dtype=float))
        cov = ((a - inf.mean) * (b - base.mean)).mean(axis=0)
        if standard_error:
            cov = cov / inf.n
        with np.errstate(divide="ignore", invalid="ignore"):
            var = var - np.where(inf.mean != 0, 2 * cov / (inf.mean * base.mean), 0.0)
    band = np.abs(ratio) * np.sqrt(np.maximum(var, 0.0))
    return ratio, band


def quantile_sets(initial_row, target_topic: int, quantile: float = 0.2):
    """Topics most / least similar to the target at t=0, ``max(floor((N-1)q), 1)`` each."""
    row = np.asarray(initial_row, dtype=float)
    others = np.delete(np.arange(row.shape[0]), target_topic)
    k = max(int(np.floor((row.shape[0] - 1) * quantile)), 1)
    order = others[np.argsort(-row[others], kind="stable")]
    return order[:k], order[-k:]


def similarity_quantile_diff(weights_t, weights_baseline_t, initial_weights, target_topic: int,
                             quantile: float = 0.2) -> tuple[float, float]:
    """Mean similarity change to the target over the top and bottom initial-similarity sets.

    Weight arguments are dense ``N x N`` matrices; the sets come from row
    ``target_topic`` of ``initial_weights``.
    """
    w = np.asarray(weights_t, dtype=float)
    wb = np.asarray(weights_baseline_t, dtype=float)
    n = w.shape[0]
    if n < 10:
        raise ValueError("need at least 10 topics")
    top, bottom = quantile_sets(np.asarray(initial_weights)[target_topic], target_topic, quantile)
    diff = w[target_topic] - wb[target_topic]
    return float(diff[top].mean()), float(diff[bottom].mean())
