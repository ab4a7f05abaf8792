"""Seeded random streams and the sampling primitives used by every model process."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

# Named substreams used by the simulator. Each model process owns one, so
# toggling an influence never shifts the draws seen by another process.
STREAM_LABELS = ("init", "events", "filter", "comments", "noise", "reframe", "analysis")

_MIN_ACCEPTANCE = 1e-6


@dataclass(frozen=True)
class SeedSpec:
    master_seed: int
    replica_index: int = 0
    stream_label: str = "main"

    def __post_init__(self):
        if self.replica_index < 0:
            raise ValueError("replica_index must be non-negative")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class LogNormalParams:
    """Shifted log-normal: ``x = a + b * exp(s * Z)`` with ``Z ~ N(0, 1)``.

    The median is ``a + b``.
    """

    a: float
    b: float
    s: float

    def __post_init__(self):
        if self.b <= 0:
            raise ValueError(f"log-normal scale b must be positive, got {self.b}")
        if self.s < 0:
            raise ValueError(f"log-normal shape s must be non-negative, got {self.s}")

    @property
    def median(self) -> float:
        return self.a + self.b


def _label_words(label: str) -> list[int]:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    return [int.from_bytes(digest[i:i + 4], "little") for i in range(0, 16, 4)]


def derive_substream(spec: SeedSpec) -> np.random.Generator:
    """Return a generator keyed by (master seed, replica, label).

    The key is fed to ``SeedSequence`` as a fixed-length word list, so distinct
    specs never share entropy and the mapping is platform independent. SFC64
    is used for throughput: Gaussian weight noise dominates the step cost.
    """
    seed = int(spec.master_seed)
    entropy = [seed & 0xFFFFFFFF, seed >> 32, int(spec.replica_index)]
    entropy += _label_words(spec.stream_label)
    return np.random.Generator(np.random.SFC64(np.random.SeedSequence(entropy)))


def replica_streams(master_seed: int, replica_index: int, labels=STREAM_LABELS) -> dict[str, np.random.Generator]:
    return {lab: derive_substream(SeedSpec(master_seed, replica_index, lab)) for lab in labels}


def _lognormal_acceptance(params: LogNormalParams, lo: float, hi: float) -> float:
    from scipy.stats import norm

    if params.s == 0:
        return 1.0 if lo <= params.median <= hi else 0.0

    def cdf(x):
        if x <= params.a:
            return 0.0
        if np.isinf(x):
            return 1.0
        return float(norm.cdf(np.log((x - params.a) / params.b) / params.s))

    return cdf(hi) - cdf(lo)


def sample_lognormal(stream: np.random.Generator, params: LogNormalParams,
                     lo: float = -np.inf, hi: float = np.inf, size=None):
    """Draw from the shifted log-normal, redrawing anything outside ``[lo, hi]``.

    Returns a float when ``size`` is None, otherwise an array of that shape.
    Raises ``ValueError`` when the window holds less than 1e-6 of the mass.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    p_accept = _lognormal_acceptance(params, lo, hi)
    if p_accept < _MIN_ACCEPTANCE:
        raise ValueError(
            f"window [{lo}, {hi}] holds {p_accept:.3g} of the log-normal mass; check the configuration")

    n = 1 if size is None else int(np.prod(size))
    out = params.a + params.b * np.exp(params.s * stream.standard_normal(n))
    bad = (out < lo) | (out > hi)
    while bad.any():
        k = int(bad.sum())
        out[bad] = params.a + params.b * np.exp(params.s * stream.standard_normal(k))
        bad = (out < lo) | (out > hi)
    if size is None:
        return float(out[0])
    return out.reshape(size)


def truncated_exponential_ppf(u, rate, lo, hi):
    """Inverse CDF of the density proportional to ``exp(-rate*m)`` on ``[lo, hi]``.

    Works elementwise on arrays; ``rate == 0`` gives the uniform distribution
    and ``lo == hi`` the point mass.
    """
    u, rate, lo, hi = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (u, rate, lo, hi)))
    width = hi - lo
    x = rate * width
    small = x < 1e-12
    with np.errstate(divide="ignore", invalid="ignore"):
        # -log(1 - u*(1 - e^{-x})) / rate, written with expm1/log1p for small x
        exp_part = -np.log1p(u * np.expm1(-x)) / np.where(small, 1.0, rate)
    return np.where(small, lo + u * width, lo + exp_part)


def sample_truncated_exponential(stream: np.random.Generator, rate, lo, hi, size=None):
    """Draw with density proportional to ``exp(-rate*m)`` restricted to ``[lo, hi]``."""
    rate_a, lo_a, hi_a = (np.asarray(v, dtype=float) for v in (rate, lo, hi))
    if np.any(lo_a > hi_a):
        raise ValueError("truncated exponential needs lo <= hi")
    if np.any(rate_a < 0):
        raise ValueError("rate must be non-negative")
    shape = np.broadcast_shapes(rate_a.shape, lo_a.shape, hi_a.shape) if size is None else size
    u = stream.random(shape)
    out = np.clip(truncated_exponential_ppf(u, rate_a, lo_a, hi_a), lo_a, hi_a)
    if size is None and out.ndim == 0:
        return float(out)
    return out


def truncated_exponential_mean(rate: float, lo: float, hi: float) -> float:
    """Closed-form mean of the truncated exponential on ``[lo, hi]``."""
    if rate == 0:
        return 0.5 * (lo + hi)
    width = hi - lo
    return lo + 1.0 / rate - width / np.expm1(rate * width)


def weighted_sample_without_replacement(stream: np.random.Generator, weights, k: int) -> np.ndarray:
    """Pick ``k`` distinct indices by successive weight-proportional draws.

    Uses the Gumbel-top-k form of Efraimidis-Spirakis keys: the top ``k`` of
    ``log w + Gumbel`` has the same law as drawing one index at a time with
    probability proportional to weight and removing it. Indices come back in
    draw order.
    """
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite and non-negative")
    n_pos = int(np.count_nonzero(w))
    if k > n_pos:
        raise ValueError(f"cannot draw {k} items from {n_pos} positive weights")
    with np.errstate(divide="ignore"):
        return gumbel_top_k(stream, np.log(w), k)


def gumbel_top_k(stream: np.random.Generator, log_weights: np.ndarray, k: int) -> np.ndarray:
    """Top-``k`` indices of ``log_weights + Gumbel noise``, ordered by key."""
    n = log_weights.shape[0]
    keys = log_weights + stream.gumbel(size=n)
    if k == 0:
        return np.empty(0, dtype=np.intp)
    if k < n:
        top = np.argpartition(-keys, k - 1)[:k]
    else:
        top = np.arange(n)
    return top[np.argsort(-keys[top], kind="stable")]
