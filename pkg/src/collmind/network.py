"""Semantic networks: topic frequencies plus pairwise similarity weights.

Pair weights are stored in condensed form (upper triangle, row-major, the
same layout as ``scipy.spatial.distance.squareform``); ``SemanticNetwork.weight``
expands them to the symmetric matrix on demand.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.spatial.distance import squareform

from .rng import LogNormalParams, sample_lognormal

FREQ_FLOOR = 1e-12


def n_pairs(n: int) -> int:
    return n * (n - 1) // 2


def pair_index(i, j, n: int):
    """Condensed index of the unordered pair ``{i, j}`` (``i != j``)."""
    i = np.asarray(i)
    j = np.asarray(j)
    a = np.minimum(i, j)
    b = np.maximum(i, j)
    return a * n - a * (a + 1) // 2 + (b - a - 1)


def to_dense(pair_weights: np.ndarray) -> np.ndarray:
    return squareform(np.asarray(pair_weights, dtype=float), checks=False)


def to_condensed(matrix: np.ndarray) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if m.shape[0] != m.shape[1]:
        raise ValueError("weight matrix must be square")
    return m[np.triu_indices(m.shape[0], k=1)]


def frequency_support(n_topics: int, alpha_c: float = 1.0) -> np.ndarray:
    """Rank-ordered frequency values ``k**-alpha_c / C`` for ``k = 1..N``."""
    k = np.arange(1, n_topics + 1, dtype=float)
    vals = k ** -alpha_c
    return vals / vals.sum()


def normalized_ranks(freq) -> np.ndarray:
    """Normalized rank ``rank/N`` of each topic; rank 1 is the largest value.

    Ties go to the lower topic index.
    """
    f = np.asarray(freq, dtype=float)
    n = f.shape[0]
    order = np.argsort(-f, kind="stable")
    ranks = np.empty(n, dtype=float)
    ranks[order] = np.arange(1, n + 1) / n
    return ranks


def rank_quantize(values, support: np.ndarray, tiebreak=None) -> np.ndarray:
    """Give the k-th largest entry of ``values`` the k-th support value.

    ``tiebreak`` (lower wins) orders equal values; topic index is the final key.
    """
    v = np.asarray(values, dtype=float)
    n = v.shape[0]
    keys = (np.arange(n), -v) if tiebreak is None else (np.arange(n), np.asarray(tiebreak), -v)
    order = np.lexsort(keys)
    out = np.empty(n, dtype=float)
    out[order] = support
    return out


@dataclass(frozen=True)
class InitParams:
    alpha_c: float = 1.0
    weight_dist: LogNormalParams = field(default_factory=lambda: LogNormalParams(-0.65, 1.0, 0.12))
    sigma_fp: float = 0.0
    sigma_wp: float = 0.0

    def __post_init__(self):
        if self.alpha_c <= 0:
            raise ValueError("alpha_c must be positive")
        if self.sigma_fp < 0 or self.sigma_wp < 0:
            raise ValueError("perturbation s.d. must be non-negative")


@dataclass(frozen=True, eq=False)
class SemanticNetwork:
    """Complete topic graph at one time step.

    ``frequency`` sums to one; ``pair_weights`` is the condensed upper
    triangle of the symmetric similarity matrix with values in [0, 1].
    """

    frequency: np.ndarray
    pair_weights: np.ndarray
    epoch: int = 0

    def __post_init__(self):
        n = self.frequency.shape[0]
        if self.pair_weights.shape != (n_pairs(n),):
            raise ValueError(f"expected {n_pairs(n)} pair weights for {n} topics, "
                             f"got {self.pair_weights.shape}")

    @property
    def n_topics(self) -> int:
        return self.frequency.shape[0]

    @cached_property
    def weight(self) -> np.ndarray:
        return to_dense(self.pair_weights)

    @cached_property
    def ranks(self) -> np.ndarray:
        return normalized_ranks(self.frequency)

    def with_values(self, frequency=None, pair_weights=None, epoch=None) -> "SemanticNetwork":
        return SemanticNetwork(
            self.frequency if frequency is None else frequency,
            self.pair_weights if pair_weights is None else pair_weights,
            self.epoch if epoch is None else epoch,
        )


def init_general_network(n_topics: int, params: InitParams, stream: np.random.Generator) -> SemanticNetwork:
    if n_topics < 2:
        raise ValueError("need at least two topics")
    freq = frequency_support(n_topics, params.alpha_c)
    weights = sample_lognormal(stream, params.weight_dist, 0.0, 1.0, size=n_pairs(n_topics))
    return SemanticNetwork(freq, weights, 0)


def init_community_network(general: SemanticNetwork, params: InitParams,
                           stream: np.random.Generator) -> SemanticNetwork:
    """Perturbed copy of ``general``.

    Frequencies get multiplicative-scale Gaussian noise, are floored, renormalized
    and put back on the rank-quantized support; weights get additive noise and
    are clamped to [0, 1].
    """
    n = general.n_topics
    support = frequency_support(n, params.alpha_c)
    if params.sigma_fp > 0:
        noisy = general.frequency + stream.normal(0.0, params.sigma_fp, n) * support
        noisy = np.maximum(noisy, FREQ_FLOOR)
        noisy /= noisy.sum()
        freq = rank_quantize(noisy, support)
    else:
        freq = general.frequency.copy()
    if params.sigma_wp > 0:
        weights = general.pair_weights + stream.normal(0.0, params.sigma_wp, general.pair_weights.shape)
        np.clip(weights, 0.0, 1.0, out=weights)
    else:
        weights = general.pair_weights.copy()
    return SemanticNetwork(freq, weights, general.epoch)


def blended_view(community: SemanticNetwork, general: SemanticNetwork, lambda_f: float,
                 general_frequency=None):
    """Editor's view: ``lambda_f * community + (1 - lambda_f) * general``.

    Returns ``(frequency, pair_weights, ranks)``. ``general_frequency`` overrides
    the general frequencies (the perceived view under amplification). For
    ``lambda_f > 1`` entries may be negative; only their ranks are used
    downstream.
    """
    if community.n_topics != general.n_topics:
        raise ValueError("networks must have the same number of topics")
    if lambda_f < 0:
        raise ValueError("lambda_f must be non-negative")
    gf = general.frequency if general_frequency is None else np.asarray(general_frequency)
    if lambda_f == 0:
        f = gf.copy()
        w = general.pair_weights.copy()
    elif lambda_f == 1:
        f = community.frequency.copy()
        w = community.pair_weights.copy()
    else:
        f = lambda_f * community.frequency + (1 - lambda_f) * gf
        w = lambda_f * community.pair_weights + (1 - lambda_f) * general.pair_weights
    return f, w, normalized_ranks(f)


def write_snapshot(net: SemanticNetwork, directory, stem: str) -> tuple[Path, Path]:
    """Write ``<stem>_frequency.csv`` (topic_id,frequency) and ``<stem>_weights.csv`` (i,j,weight)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    fpath = directory / f"{stem}_frequency.csv"
    wpath = directory / f"{stem}_weights.csv"
    with open(fpath, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["topic_id", "frequency"])
        for i, v in enumerate(net.frequency):
            w.writerow([i, f"{v:.17g}"])
    iu, ju = np.triu_indices(net.n_topics, k=1)
    with open(wpath, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["i", "j", "weight"])
        for a, b, v in zip(iu.tolist(), ju.tolist(), net.pair_weights.tolist()):
            w.writerow([a, b, f"{v:.17g}"])
    return fpath, wpath


def read_snapshot(freq_path, weight_path, epoch: int = 0) -> SemanticNetwork:
    freq = np.loadtxt(freq_path, delimiter=",", skiprows=1, ndmin=2)
    order = np.argsort(freq[:, 0], kind="stable")
    f = freq[order, 1]
    n = f.shape[0]
    pairs = np.loadtxt(weight_path, delimiter=",", skiprows=1, ndmin=2)
    w = np.zeros(n_pairs(n))
    w[pair_index(pairs[:, 0].astype(int), pairs[:, 1].astype(int), n)] = pairs[:, 2]
    return SemanticNetwork(f, w, epoch)
