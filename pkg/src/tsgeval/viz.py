"""Plot-ready data for visual comparison: a 2-D t-SNE embedding of original
and generated windows, and pooled value distributions. Nothing is rendered.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .measures import _check_pair

TSNE_DEFAULTS = {
    "perplexity": 30.0,
    "iters": 1000,
    "learning_rate": 200.0,
    "early_exaggeration": 12.0,
    "exaggeration_iters": 250,
    "momentum": (0.5, 0.8),
    "momentum_switch": 250,
    "kl_every": 10,
}


@dataclass
class Embedding2D:
    points: np.ndarray          # (n, 2)
    labels: list[str]           # "real" | "synthetic"
    kl_trace: list[float]
    params: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "y", "label"])
        for (x, y), lab in zip(self.points.tolist(), self.labels):
            w.writerow([repr(x), repr(y), lab])
        return buf.getvalue()


def sq_distances(x: np.ndarray) -> np.ndarray:
    sq = (x * x).sum(axis=1)
    d = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d, 0.0, out=d)
    np.fill_diagonal(d, 0.0)
    return d


def conditional_affinities(d2: np.ndarray, perplexity: float, tol: float = 1e-10,
                           max_iter: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Row-stochastic P(j|i) with each row's Gaussian precision found by
    bisection so that 2**H(P_i) matches ``perplexity``.

    Returns ``(P, achieved_perplexity)``.
    """
    n = d2.shape[0]
    if not 1.0 <= perplexity < n - 1:
        raise ParameterError(f"perplexity {perplexity} infeasible for {n} points")
    target = math.log(perplexity)
    P = np.zeros((n, n))
    achieved = np.empty(n)
    for i in range(n):
        di = np.delete(d2[i], i)
        di = di - di.min()  # shift for stability; P is invariant to it
        beta, lo, hi = 1.0, 0.0, np.inf
        for _ in range(max_iter):
            w = np.exp(-di * beta)
            sw = w.sum()
            p = w / sw
            H = math.log(sw) + beta * float((di * p).sum())
            if abs(H - target) < tol:
                break
            if H > target:
                lo = beta
                beta = beta * 2.0 if hi == np.inf else (beta + hi) / 2.0
            else:
                hi = beta
                beta = (beta + lo) / 2.0
        P[i, np.arange(n) != i] = p
        achieved[i] = math.exp(H)
    return P, achieved


def joint_affinities(P_cond: np.ndarray) -> np.ndarray:
    P = P_cond + P_cond.T
    return P / P.sum()


def _kl(P, Q):
    mask = P > 0
    return float((P[mask] * np.log(P[mask] / Q[mask])).sum())


def tsne(x: np.ndarray, perplexity: float = 30.0, iters: int = 1000, seed: int = 0,
         **overrides) -> tuple[np.ndarray, list[float], np.ndarray]:
    """Exact t-SNE of the rows of ``x``. Returns ``(Y, kl_trace, achieved_perplexity)``."""
    opts = {**TSNE_DEFAULTS, **overrides}
    n = x.shape[0]
    P_cond, achieved = conditional_affinities(sq_distances(x), perplexity)
    P = np.maximum(joint_affinities(P_cond), 1e-12)
    rng = np.random.default_rng(seed)
    Y = rng.normal(0.0, 1e-4, size=(n, 2))
    update = np.zeros_like(Y)
    gains = np.ones_like(Y)
    kl_trace = []
    m_early, m_late = opts["momentum"]
    for it in range(iters + 1):
        num = 1.0 / (1.0 + sq_distances(Y))
        np.fill_diagonal(num, 0.0)
        Q = np.maximum(num / num.sum(), 1e-12)
        if it % opts["kl_every"] == 0 or it == iters:
            kl_trace.append(_kl(P, Q))
        if it == iters:
            break
        exag = opts["early_exaggeration"] if it < opts["exaggeration_iters"] else 1.0
        PQ = (exag * P - Q) * num
        grad = 4.0 * ((np.diag(PQ.sum(axis=1)) - PQ) @ Y)
        momentum = m_early if it < opts["momentum_switch"] else m_late
        same_sign = np.sign(grad) == np.sign(update)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.maximum(gains, 0.01, out=gains)
        update = momentum * update - opts["learning_rate"] * gains * grad
        Y = Y + update
        Y = Y - Y.mean(axis=0)
    return Y, kl_trace, achieved


def _subsample(x, cap, seed):
    if x.shape[0] <= cap:
        return x
    idx = np.sort(np.random.default_rng(seed).choice(x.shape[0], cap, replace=False))
    return x[idx]


def tsne_embed(orig, gen, perplexity: float = 30.0, iters: int = 1000, seed: int = 0,
               cap: int = 2000, **overrides) -> Embedding2D:
    """Embed flattened windows of both tensors into 2-D.

    Each set is capped at ``cap`` windows (seeded subsample). Points are
    embedded in lexicographic order of their flattened values, so swapping
    ``orig`` and ``gen`` only swaps labels.
    """
    o, g = _check_pair(orig, gen)
    if cap < 10:
        raise ParameterError("cap must be >= 10")
    of = _subsample(o.reshape(o.shape[0], -1), cap, seed)
    gf = _subsample(g.reshape(g.shape[0], -1), cap, seed)
    x = np.concatenate([of, gf])
    labels = np.array(["real"] * len(of) + ["synthetic"] * len(gf))
    n = x.shape[0]
    if not perplexity < (n - 1) / 3.0:
        raise ParameterError(f"perplexity {perplexity} too large for {n} points; "
                             f"need < {(n - 1) / 3.0:.3f}")
    order = np.lexsort(x.T[::-1])
    x, labels = x[order], labels[order]
    Y, kl, achieved = tsne(x, perplexity, iters, seed, **overrides)
    params = {**TSNE_DEFAULTS, **overrides, "perplexity": perplexity, "iters": iters,
              "seed": seed, "cap": cap, "max_perplexity_error": float(np.abs(achieved - perplexity).max())}
    return Embedding2D(Y, labels.tolist(), kl, params)


@dataclass
class DistributionData:
    positions: np.ndarray
    densities: dict[str, np.ndarray]
    mode: str = "hist"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["position", "density", "label"])
        for label, dens in self.densities.items():
            for pos, d in zip(self.positions.tolist(), dens.tolist()):
                w.writerow([repr(pos), repr(d), label])
        return buf.getvalue()


def _silverman_kde(values, grid):
    n = values.size
    sigma = values.std(ddof=1)
    q75, q25 = np.percentile(values, [75, 25])
    spread = min(sigma, (q75 - q25) / 1.34) if q75 > q25 else sigma
    h = 0.9 * spread * n ** -0.2 if spread > 0 else 1e-3
    dens = np.zeros_like(grid)
    for s in range(0, n, 4096):
        z = (grid[:, None] - values[None, s:s + 4096]) / h
        dens += np.exp(-0.5 * z * z).sum(axis=1)
    return dens / (n * h * math.sqrt(2.0 * math.pi))


def distribution_data(orig, gen, bins: int = 50, mode: str = "hist") -> DistributionData:
    """Pooled value distributions of both tensors on a shared grid.

    ``hist``: relative frequencies over ``bins`` aligned bins spanning the
    union range (positions are bin centres). ``kde``: Gaussian KDE with
    Silverman's bandwidth evaluated at ``bins`` grid points.
    """
    o, g = _check_pair(orig, gen, same_len=False)
    if bins < 2:
        raise ParameterError("bins must be >= 2")
    ov, gv = o.ravel(), g.ravel()
    lo = min(ov.min(), gv.min())
    hi = max(ov.max(), gv.max())
    if hi == lo:
        hi = lo + 1.0
    if mode == "hist":
        edges = np.linspace(lo, hi, bins + 1)
        centres = (edges[:-1] + edges[1:]) / 2.0
        dens = {lab: np.histogram(v, edges)[0] / v.size for lab, v in (("real", ov), ("synthetic", gv))}
        return DistributionData(centres, dens, "hist")
    if mode == "kde":
        grid = np.linspace(lo, hi, bins)
        dens = {lab: _silverman_kde(v, grid) for lab, v in (("real", ov), ("synthetic", gv))}
        return DistributionData(grid, dens, "kde")
    raise ParameterError(f"unknown mode {mode!r}")
