"""Feedback step: the comment network reshapes the community network."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .comments import CommentNetwork
from .network import SemanticNetwork, frequency_support, rank_quantize


@dataclass(frozen=True)
class UpdateParams:
    eta: float = 10.0
    w_max: float = 0.8
    sigma_wn: float = 0.001
    # Drop the carry-over term and use the update exactly as printed
    # (w' = hebb - gamma*w + eps). Kept for comparison runs only.
    literal_form: bool = False

    def __post_init__(self):
        if self.eta <= 0:
            raise ValueError("eta must be positive")
        if not 0 < self.w_max <= 1:
            raise ValueError("w_max must lie in (0, 1]")
        if self.sigma_wn < 0:
            raise ValueError("sigma_wn must be non-negative")


def update_frequencies(community: SemanticNetwork, comments: CommentNetwork, lambda_m: float,
                       alpha_c: float = 1.0) -> np.ndarray:
    """Blend old frequencies with the comment share, then re-quantize by rank.

    The topic whose proxy ``lambda_m * f + (1 - lambda_m) * share`` ranks k-th
    gets the k-th support value; ties keep the previous order.
    """
    total = float(comments.frequency_mass.sum())
    if not total > 0:
        raise ValueError("comment network has zero total mass")
    if not 0.0 <= lambda_m <= 1.0:
        raise ValueError("lambda_m must lie in [0, 1]")
    if lambda_m == 1.0:
        return community.frequency.copy()
    proxy = lambda_m * community.frequency + (1.0 - lambda_m) * (comments.frequency_mass / total)
    support = frequency_support(community.n_topics, alpha_c)
    return rank_quantize(proxy, support, tiebreak=community.ranks)


def update_weights(community: SemanticNetwork, comments: CommentNetwork, params: UpdateParams,
                   stream: np.random.Generator, n_tiers: int = 3) -> np.ndarray:
    """Hebbian increment with a decay rate that keeps the total weight fixed.

    Works on condensed pair vectors and returns the new one. Noise is one draw
    per unordered pair. Results are clamped to ``[0, w_max]``.
    """
    w = community.pair_weights
    denom = n_tiers * (n_tiers - 1) / 2 * comments.total_mass
    # the Hebbian term is zero off the co-occurrence support, so only touch that
    active = np.flatnonzero(comments.pair_mass) if denom > 0 else np.empty(0, dtype=np.intp)
    hebb = params.eta * (params.w_max - np.abs(w[active])) * (comments.pair_mass[active] / denom)
    if params.sigma_wn > 0:
        eps = stream.normal(0.0, params.sigma_wn, w.shape[0])
        eps_sum = eps.sum()
    else:
        eps = None
        eps_sum = 0.0
    w_total = w.sum()
    gamma = (hebb.sum() + eps_sum) / w_total if w_total != 0 else 0.0
    if params.literal_form:
        new = -gamma * w
    else:
        new = (1.0 - gamma) * w
    if eps is not None:
        new += eps
    new[active] += hebb
    return np.clip(new, 0.0, params.w_max, out=new)
