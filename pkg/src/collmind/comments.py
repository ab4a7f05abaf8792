"""Community response to the news: comment frequency mass and co-occurrence mass."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional

import numpy as np

from .network import n_pairs, pair_index, to_dense
from .rng import LogNormalParams, sample_lognormal, truncated_exponential_ppf


@dataclass(frozen=True)
class CommentParams:
    comment_mass_dist: LogNormalParams = field(default_factory=lambda: LogNormalParams(5.7e-6, 1.0e-4, 1.5))
    zero_ratio_slopes: tuple = (0.7, 0.9, 0.9)
    rate_coeffs: tuple = (0.005, 0.01, 0.02)
    rate_decay: float = 0.8
    c_com: float = 1.0e-6

    def __post_init__(self):
        object.__setattr__(self, "zero_ratio_slopes", tuple(float(v) for v in self.zero_ratio_slopes))
        object.__setattr__(self, "rate_coeffs", tuple(float(v) for v in self.rate_coeffs))
        if len(self.zero_ratio_slopes) != len(self.rate_coeffs):
            raise ValueError("need one zero-ratio slope and one rate coefficient per tier")
        if any(not 0 < v <= 1 for v in self.zero_ratio_slopes):
            raise ValueError("zero-ratio slopes must lie in (0, 1]")
        if any(v <= 0 for v in self.rate_coeffs) or self.rate_decay <= 0 or self.c_com <= 0:
            raise ValueError("comment constants must be positive")


@dataclass(frozen=True, eq=False)
class CommentNetwork:
    """Unnormalized comment masses for one step.

    ``pair_mass`` is condensed like ``SemanticNetwork.pair_weights``.
    """

    frequency_mass: np.ndarray
    pair_mass: np.ndarray
    total_mass: float
    n_overflow: int = 0
    n_news: int = 0

    @cached_property
    def weight_mass(self) -> np.ndarray:
        return to_dense(self.pair_mass)


@lru_cache(maxsize=8)
def harmonic_bound_table(n_max: int) -> np.ndarray:
    """``table[n] = n * H(n)`` for ``n = 0..n_max`` (``H`` the n-th harmonic number)."""
    n = np.arange(n_max + 1, dtype=float)
    h = np.concatenate([[0.0], np.cumsum(1.0 / n[1:])])
    table = n * h
    table.flags.writeable = False
    return table


def multiplier_bounds(rank, c, n_topics: int, c_com: float):
    """Support ``[lo, hi]`` of the non-zero multiplier for normalized rank ``rank``.

    ``hi = n H(n)`` with ``n = round(rank * N)``; ``lo = min(c_com * hi / c, hi)``.
    """
    n = np.rint(np.asarray(rank, dtype=float) * n_topics).astype(np.int64)
    hi = harmonic_bound_table(n_topics)[np.clip(n, 1, n_topics)]
    lo = np.minimum(c_com * hi / np.asarray(c, dtype=float), hi)
    return lo, hi


def sample_comment_mass(params: CommentParams, stream: np.random.Generator, size=None):
    """Relative comment count per news item, redrawn until strictly positive."""
    return sample_lognormal(stream, params.comment_mass_dist, lo=np.nextafter(0.0, 1.0), size=size)


def sample_tier_multipliers(news, community_ranks, c, params: CommentParams, stream: np.random.Generator):
    """Comment multipliers per tier for one news item (1-D ``news``) or a batch (2-D).

    A tier topic with normalized rank ``r`` gets zero with probability
    ``min(C_zq * r, 1)``; otherwise a truncated exponential with rate
    ``a_q * exp(-b * r)`` on the harmonic bounds.
    """
    news = np.asarray(news)
    single = news.ndim == 1
    news2 = news[None, :] if single else news
    c_arr = np.atleast_1d(np.asarray(c, dtype=float))
    if np.any(c_arr <= 0):
        raise ValueError("comment mass must be positive")
    m, q = news2.shape
    ranks = np.asarray(community_ranks, dtype=float)
    n_topics = ranks.shape[0]
    r = ranks[news2]
    slopes = np.asarray(params.zero_ratio_slopes[:q])
    coeffs = np.asarray(params.rate_coeffs[:q])

    u_zero = stream.random((m, q))
    u_val = stream.random((m, q))
    zero = u_zero < np.minimum(slopes * r, 1.0)
    rate = coeffs * np.exp(-params.rate_decay * r)
    lo, hi = multiplier_bounds(r, c_arr[:, None], n_topics, params.c_com)
    mult = np.clip(truncated_exponential_ppf(u_val, rate, lo, hi), lo, hi)
    mult[zero] = 0.0
    return mult[0] if single else mult


def news_comment_frequencies(news, community_freq, multipliers, c: float,
                             troll_strength: float = 1.0, troll_target: Optional[int] = None,
                             counterspeech: float = 1.0) -> np.ndarray:
    """Per-topic comment mass under one news item.

    Tier topics get ``c * s_cs * m_q * f``; every other topic gets ``c * f * C``
    with ``C`` chosen so the total is ``c``. When ``sum m' f >= 1`` the off-topic
    mass is zero and the total exceeds ``c``. A troll boost multiplies the
    target's entry by ``troll_strength`` and rescales back to the pre-boost total.
    """
    f = np.asarray(community_freq, dtype=float)
    news = np.asarray(news)
    m_eff = counterspeech * np.asarray(multipliers, dtype=float)
    fz = f[news]
    on = float(np.dot(m_eff, fz))
    off_scale = (1.0 - min(on, 1.0)) / (1.0 - fz.sum())
    out = c * f * off_scale
    out[news] = c * m_eff * fz
    if troll_target is not None and troll_strength != 1.0:
        total = out.sum()
        out[troll_target] *= troll_strength
        out *= total / out.sum()
    return out


def news_comment_weights(news, c: float, n_topics: int) -> np.ndarray:
    """Condensed pair masses: every unordered tier pair of the item gets ``c``."""
    news = np.asarray(news)
    qa, qb = np.triu_indices(news.shape[0], k=1)
    out = np.zeros(n_pairs(n_topics))
    out[pair_index(news[qa], news[qb], n_topics)] += c
    return out


def aggregate_comment_network(per_news_freq, per_news_pairs, masses, n_topics: int,
                              n_overflow: int = 0) -> CommentNetwork:
    """Sum per-news arrays into the step's comment network."""
    freq = np.zeros(n_topics)
    pairs = np.zeros(n_pairs(n_topics))
    for a in per_news_freq:
        freq += a
    for w in per_news_pairs:
        pairs += w
    masses = np.asarray(masses, dtype=float)
    return CommentNetwork(freq, pairs, float(masses.sum()), n_overflow, int(masses.shape[0]))


def generate_comment_network(news: np.ndarray, community_freq, community_ranks, params: CommentParams,
                             stream: np.random.Generator, troll_strength: float = 1.0,
                             troll_target: Optional[int] = None, counterspeech: float = 1.0) -> CommentNetwork:
    """Vectorized comment generation for a whole news batch.

    Equivalent to summing ``news_comment_frequencies`` / ``news_comment_weights``
    over the batch, but linear in the number of news items: the off-topic part of
    every item is a multiple of ``f``, so only the tier entries need per-item work.
    """
    f = np.asarray(community_freq, dtype=float)
    n = f.shape[0]
    m_news, q = news.shape
    if m_news == 0:
        return CommentNetwork(np.zeros(n), np.zeros(n_pairs(n)), 0.0, 0, 0)
    c = sample_comment_mass(params, stream, size=m_news)
    mult = counterspeech * sample_tier_multipliers(news, community_ranks, c, params, stream)

    fz = f[news]
    on = np.einsum("ij,ij->i", mult, fz)
    overflow = on >= 1.0
    off_scale = (1.0 - np.minimum(on, 1.0)) / (1.0 - fz.sum(axis=1))

    if troll_target is not None and troll_strength != 1.0:
        total = c * np.where(overflow, on, 1.0)
        in_news = news == troll_target
        tier_of_target = np.where(in_news.any(axis=1), in_news.argmax(axis=1), -1)
        entry = np.where(tier_of_target >= 0,
                         c * mult[np.arange(m_news), np.maximum(tier_of_target, 0)] * f[troll_target],
                         c * off_scale * f[troll_target])
        kappa = total / (total + (troll_strength - 1.0) * entry)
        extra = (troll_strength - 1.0) * float(np.dot(kappa, entry))
    else:
        kappa = None
        extra = 0.0

    ck = c if kappa is None else c * kappa
    freq = f * float(np.dot(ck, off_scale))
    tier_mass = ck[:, None] * (mult - off_scale[:, None]) * fz
    freq += np.bincount(news.ravel(), weights=tier_mass.ravel(), minlength=n)
    if extra:
        freq[troll_target] += extra

    qa, qb = np.triu_indices(q, k=1)
    idx = pair_index(news[:, qa], news[:, qb], n)
    pair_mass = np.bincount(idx.ravel(), weights=np.repeat(c, qa.shape[0]), minlength=n_pairs(n))
    return CommentNetwork(freq, pair_mass, float(c.sum()), int(overflow.sum()), m_news)
