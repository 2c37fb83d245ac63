"""Pure-Python/numpy dependent-DTW kernels (fallback for the compiled core)."""

import math

import numpy as np


def _step_costs(a, b):
    # sequential accumulation over dims keeps the rounding identical to the compiled kernel
    sq = (a[..., :, None, :] - b[..., None, :, :]) ** 2
    s = sq[..., 0].copy()
    for d in range(1, sq.shape[-1]):
        s += sq[..., d]
    return np.sqrt(s)


def dtw_window(a, b):
    """DTW between two (length, dims) windows."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape[1] != b.shape[1]:
        raise ValueError("dimension mismatch")
    cost = _step_costs(a, b).tolist()
    n1, n2 = len(cost), len(cost[0])
    inf = math.inf
    prev = [0.0] + [inf] * n2
    for i in range(n1):
        row = cost[i]
        cur = [inf] * (n2 + 1)
        for j in range(1, n2 + 1):
            cur[j] = row[j - 1] + min(prev[j - 1], prev[j], cur[j - 1])
        prev = cur
    return prev[n2]


def dtw_pairs(a, b, n_threads=0, chunk=512):
    """DTW for each aligned pair ``(a[p], b[p])``, vectorised across pairs."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape[0] != b.shape[0] or a.shape[2] != b.shape[2]:
        raise ValueError("pair count or dimension mismatch")
    n_pairs, n1, n2 = a.shape[0], a.shape[1], b.shape[1]
    out = np.empty(n_pairs, dtype=np.float64)
    for s in range(0, n_pairs, chunk):
        cost = _step_costs(a[s:s + chunk], b[s:s + chunk])
        m = cost.shape[0]
        prev = np.full((m, n2 + 1), np.inf)
        prev[:, 0] = 0.0
        for i in range(n1):
            cur = np.full((m, n2 + 1), np.inf)
            diag_up = np.minimum(prev[:, :-1], prev[:, 1:])
            for j in range(1, n2 + 1):
                cur[:, j] = cost[:, i, j - 1] + np.minimum(diag_up[:, j - 1], cur[:, j - 1])
            prev = cur
        out[s:s + m] = prev[:, n2]
    return out
