"""PCA + exact t-SNE projection of comment-profile trajectories (analysis only)."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class Trajectory:
    points: np.ndarray     # (T, 2)
    smoothed: np.ndarray   # (ceil(T / window), 2) block means
    window: int

    def smoothed_per_step(self) -> np.ndarray:
        """Block mean repeated onto every step of its block."""
        return np.repeat(self.smoothed, self.window, axis=0)[: self.points.shape[0]]


def pca_project(data, n_components: int) -> np.ndarray:
    """Scores of centered ``data`` on its leading principal axes."""
    raw = np.asarray(data, dtype=float)
    x = raw - raw.mean(axis=0)
    u, s, _ = np.linalg.svd(x, full_matrices=False)
    # centering residue of a constant column is rounding noise, not signal
    tol = 1e-10 * max(np.abs(raw).max(initial=0.0), 1e-300) * np.sqrt(raw.size)
    rank = int(np.count_nonzero(s > tol))
    k = min(n_components, rank)
    return u[:, :k] * s[:k]


def pca_reconstruction_error(data, n_components: int) -> float:
    x = np.asarray(data, dtype=float)
    xc = x - x.mean(axis=0)
    u, s, vt = np.linalg.svd(xc, full_matrices=False)
    k = min(n_components, s.shape[0])
    approx = (u[:, :k] * s[:k]) @ vt[:k]
    return float(np.sum((xc - approx) ** 2))


def block_average(points, window: int) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    n_blocks = -(-pts.shape[0] // window)
    return np.stack([pts[i * window:(i + 1) * window].mean(axis=0) for i in range(n_blocks)])


def project_trajectory(profiles, stream: np.random.Generator, pca_dims: int = 50, out_dims: int = 2,
                       smooth_window: int = 25, perplexity: float = 30.0, n_iter: int = 1000):
    """Embed one or more profile series ``(T, N)`` into a shared 2-D space.

    Several series are stacked and fit jointly so their trajectories are
    comparable; a single array returns a single ``Trajectory``.
    """
    from sklearn.manifold import TSNE

    single = isinstance(profiles, np.ndarray) and profiles.ndim == 2
    series = [np.asarray(profiles, dtype=float)] if single else [np.asarray(p, dtype=float) for p in profiles]
    lengths = [s.shape[0] for s in series]
    if min(lengths) < 5:
        raise ValueError("need at least 5 time points per trajectory")
    if out_dims != 2:
        raise ValueError("only 2-D embeddings are supported")
    stacked = np.vstack(series)
    scores = pca_project(stacked, pca_dims)
    if scores.shape[1] == 0:
        emb = np.zeros((stacked.shape[0], out_dims))
    else:
        if scores.shape[1] < out_dims:
            scores = np.hstack([scores, np.zeros((scores.shape[0], out_dims - scores.shape[1]))])
        perp = min(perplexity, (stacked.shape[0] - 1) / 3.0)
        seed = int(stream.integers(0, 2**31 - 1))
        tsne = TSNE(n_components=out_dims, perplexity=perp, method="exact", init="pca",
                    max_iter=n_iter, random_state=seed)
        emb = tsne.fit_transform(scores)
    out, start = [], 0
    for n in lengths:
        pts = emb[start:start + n]
        out.append(Trajectory(pts, block_average(pts, smooth_window), smooth_window))
        start += n
    return out[0] if single else out
