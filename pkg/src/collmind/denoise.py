"""Exact 1-D total variation denoising."""
from __future__ import annotations

import numpy as np


def tv1d(y, lam: float) -> np.ndarray:
    """Solve ``min_x 0.5*||y - x||^2 + lam * sum |x[k+1] - x[k]|`` exactly.

    Condat's direct algorithm (a taut-string method), O(n) in practice.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    x = np.empty(n)
    if n == 0:
        return x
    if lam <= 0 or n == 1:
        x[:] = y
        return x
    k = k0 = kplus = kminus = 0
    umin, umax = lam, -lam
    vmin, vmax = y[0] - lam, y[0] + lam
    while True:
        while k == n - 1:
            if umin < 0.0:
                x[k0:kminus + 1] = vmin
                k0 = kminus + 1
                k = kminus = k0
                vmin = y[k0]
                umin = lam
                umax = vmin + umin - vmax
            elif umax > 0.0:
                x[k0:kplus + 1] = vmax
                k0 = kplus + 1
                k = kplus = k0
                vmax = y[k0]
                umax = -lam
                umin = vmax + umax - vmin
            else:
                vmin += umin / (k - k0 + 1)
                x[k0:k + 1] = vmin
                return x
        umin += y[k + 1] - vmin
        if umin < -lam:
            x[k0:kminus + 1] = vmin
            k0 = kminus + 1
            k = kminus = kplus = k0
            vmin = y[k0]
            vmax = vmin + 2 * lam
            umin, umax = lam, -lam
            continue
        umax += y[k + 1] - vmax
        if umax > lam:
            x[k0:kplus + 1] = vmax
            k0 = kplus + 1
            k = kminus = kplus = k0
            vmax = y[k0]
            vmin = vmax - 2 * lam
            umin, umax = lam, -lam
            continue
        k += 1
        if umin >= lam:
            kminus = k
            vmin += (umin - lam) / (k - k0 + 1)
            umin = lam
        if umax <= -lam:
            kplus = k
            vmax += (umax + lam) / (k - k0 + 1)
            umax = -lam


def tv_objective(x, y, lam: float) -> float:
    """``mean((x - y)**2) + lam * sum |y[k+1] - y[k]|`` for raw ``x`` and candidate ``y``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return float(np.mean((x - y) ** 2) + lam * np.abs(np.diff(y)).sum())


def tv_denoise(series, lam: float = 0.4) -> np.ndarray:
    """Minimize ``mean((x - y)**2) + lam * TV(y)`` over ``y``.

    The mean-squared fidelity is rescaled to the standard half-sum form, where
    the penalty becomes ``lam * n / 2``.
    """
    x = np.asarray(series, dtype=float)
    if lam < 0:
        raise ValueError("lam must be non-negative")
    if x.ndim != 1 or x.shape[0] < 1:
        raise ValueError("series must be a non-empty 1-D array")
    if lam == 0:
        return x.copy()
    return tv1d(x, lam * x.shape[0] / 2.0)
