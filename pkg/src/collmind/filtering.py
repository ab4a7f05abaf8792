"""Two-stage editorial filter that turns events into news."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .influence import ResolvedStepParams, apply_amplified_general_view, apply_reframing
from .network import SemanticNetwork, normalized_ranks, pair_index
from .rng import gumbel_top_k


@dataclass(frozen=True)
class FilterParams:
    alpha: tuple = (0.4, 0.2, 0.1)
    r1: float = 0.5
    r2: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        if not (0 < self.r1 <= 1 and 0 < self.r2 <= 1):
            raise ValueError("retention ratios must lie in (0, 1]")
        if not all(np.isfinite(self.alpha)):
            raise ValueError("filter exponents must be finite")


def stage1_log_weights(events: np.ndarray, blended_ranks, params: FilterParams) -> np.ndarray:
    """Log selection weight per event: ``-sum_q (alpha_q / r2) * ln(rank of tier-q topic)``."""
    alpha = np.asarray(params.alpha[: events.shape[1]]) / params.r2
    return -(np.log(np.asarray(blended_ranks)[events]) @ alpha)


def stage1_select(events: np.ndarray, blended_ranks, params: FilterParams,
                  stream: np.random.Generator) -> np.ndarray:
    """Keep ``floor(r1 * n)`` events drawn without replacement by frequency rank.

    Popular topics (small normalized rank) get large weights. Survivors are
    returned in their original event order.
    """
    if events.shape[0] == 0:
        raise ValueError("no events to filter")
    k = int(np.floor(params.r1 * events.shape[0]))
    chosen = gumbel_top_k(stream, stage1_log_weights(events, blended_ranks, params), k)
    return events[np.sort(chosen)]


def tier_pair_columns(n_tiers: int) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.triu_indices(n_tiers, k=1)
    return a, b


def stage2_scores(events: np.ndarray, blended_pair_weights, n_topics: int) -> np.ndarray:
    """Product of blended similarities over every unordered tier pair (floored at 0)."""
    qa, qb = tier_pair_columns(events.shape[1])
    idx = pair_index(events[:, qa], events[:, qb], n_topics)
    w = np.maximum(np.asarray(blended_pair_weights)[idx], 0.0)
    return np.prod(w, axis=1)


def stage2_select(events: np.ndarray, blended_pair_weights, params: FilterParams, n_topics: int) -> np.ndarray:
    """Keep the top ``floor(r2 * n)`` events by similarity score; ties keep input order."""
    k = int(np.floor(params.r2 * events.shape[0]))
    scores = stage2_scores(events, blended_pair_weights, n_topics)
    order = np.argsort(-scores, kind="stable")[:k]
    return events[np.sort(order)]


def blended_pair_values(community: SemanticNetwork, general: SemanticNetwork, lambda_f: float, idx):
    """Blended similarity for selected condensed pair indices only."""
    if lambda_f == 0:
        return general.pair_weights[idx]
    if lambda_f == 1:
        return community.pair_weights[idx]
    return lambda_f * community.pair_weights[idx] + (1 - lambda_f) * general.pair_weights[idx]


def filter_events(events: np.ndarray, community: SemanticNetwork, general: SemanticNetwork,
                  params: FilterParams, step: ResolvedStepParams, stream: np.random.Generator,
                  reframe_stream: np.random.Generator | None = None) -> np.ndarray:
    """Full editorial pipeline for one step: perceived view, both stages, reframing."""
    if community.n_topics != general.n_topics:
        raise ValueError("networks must have the same number of topics")
    n = general.n_topics
    lam = step.lambda_f
    gf = apply_amplified_general_view(general.frequency, step.s_amp, step.amp_target)
    if lam == 0:
        fbar = gf
    elif lam == 1:
        fbar = community.frequency
    else:
        fbar = lam * community.frequency + (1 - lam) * gf
    ranks = normalized_ranks(fbar)

    survivors = stage1_select(events, ranks, params, stream)

    qa, qb = tier_pair_columns(events.shape[1])
    idx = pair_index(survivors[:, qa], survivors[:, qb], n)
    scores = np.prod(np.maximum(blended_pair_values(community, general, lam, idx), 0.0), axis=1)
    k = int(np.floor(params.r2 * survivors.shape[0]))
    news = survivors[np.sort(np.argsort(-scores, kind="stable")[:k])]

    if step.p_ref > 0:
        news = apply_reframing(news, step.p_ref, step.ref_target, step.ref_tier,
                               stream if reframe_stream is None else reframe_stream)
    return news
