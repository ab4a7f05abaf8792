"""World events: topic tuples drawn from the general network's ranking.

An event batch is an integer array of shape ``(n_events, n_tiers)``; column
``q`` holds the tier-``q`` topic (column 0 is the most relevant).
"""
from __future__ import annotations

import numpy as np


def base_event_distribution(general_ranks) -> np.ndarray:
    """Event sampling probabilities proportional to ``-ln(rank)``."""
    r = np.asarray(general_ranks, dtype=float)
    p = -np.log(r)
    p[r >= 1.0] = 0.0
    return p / p.sum()


def evolve_event_distribution(previous, general_ranks, lambda_e: float, n_draws: int,
                              stream: np.random.Generator) -> np.ndarray:
    """Blend a freshly sampled topic histogram with the previous distribution.

    The fresh part is the normalized histogram of ``n_draws`` topics drawn from
    the base distribution; the result is ``(1 - lambda_e) * fresh + lambda_e * previous``.
    """
    if not 0.0 <= lambda_e <= 1.0:
        raise ValueError("lambda_e must lie in [0, 1]")
    previous = np.asarray(previous, dtype=float)
    if lambda_e == 1.0:
        return previous.copy()
    base = base_event_distribution(general_ranks)
    # histogram of n_draws categorical draws, drawn directly as one multinomial
    fresh = stream.multinomial(n_draws, base) / n_draws
    out = (1.0 - lambda_e) * fresh + lambda_e * previous
    return out / out.sum()


def _draw_topics(stream, cdf, size):
    u = stream.random(size) * cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, cdf.shape[0] - 1)


def generate_events(dist, n_events: int, n_tiers: int, stream: np.random.Generator) -> np.ndarray:
    """Draw ``n_events`` events with distinct topics across tiers.

    Tier ``q`` follows ``dist`` restricted to topics not already in the event.
    A draw that repeats an earlier tier is redrawn from the full distribution,
    which has exactly that conditional law.
    """
    p = np.asarray(dist, dtype=float)
    if np.count_nonzero(p > 0) < n_tiers:
        raise ValueError(f"need at least {n_tiers} topics with positive probability")
    cdf = np.cumsum(p)
    events = np.empty((n_events, n_tiers), dtype=np.int64)
    for q in range(n_tiers):
        col = _draw_topics(stream, cdf, n_events)
        if q:
            dup = (events[:, :q] == col[:, None]).any(axis=1)
            while dup.any():
                rows = np.flatnonzero(dup)
                col[rows] = _draw_topics(stream, cdf, rows.shape[0])
                dup[rows] = (events[rows, :q] == col[rows, None]).any(axis=1)
        events[:, q] = col
    return events
