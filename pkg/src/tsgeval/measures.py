"""Feature-based and distance-based fidelity measures between an original and
a generated tensor, plus the repeated-run suite and wall-clock timing.

Every measure is "lower is better" and returns exactly 0 when the generated
tensor is identical to the original.
"""

from __future__ import annotations

import json
import logging
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .errors import DegenerateError, PairingError, ParameterError, ShapeError, TsgError
from .tensor import check_tensor, tensor_digest

log = logging.getLogger(__name__)

MEASURES = ("MDD", "ACD", "SD", "KD", "ED", "DTW")
EXTERNAL_MEASURES = ("DS", "PS", "C-FID")


def _check_pair(orig, gen, same_len=True):
    o = check_tensor(orig, "orig")
    g = check_tensor(gen, "gen")
    if o.shape[2] != g.shape[2]:
        raise ShapeError(f"dimension mismatch: orig N={o.shape[2]}, gen N={g.shape[2]}")
    if same_len and o.shape[1] != g.shape[1]:
        raise ShapeError(f"length mismatch: orig l={o.shape[1]}, gen l={g.shape[1]}")
    return o, g


# -- feature-based ----------------------------------------------------------

def _cell_histograms(x, lo, span, bins):
    """Relative-frequency histograms per (time step, dim): shape (l, N, bins)."""
    R, l, N = x.shape
    scaled = (x - lo) / np.where(span > 0, span, 1.0) * bins
    idx = np.clip(np.floor(scaled), 0, bins - 1).astype(np.int64)
    idx[:, span == 0] = 0
    flat = idx + (np.arange(l * N).reshape(l, N) * bins)
    counts = np.bincount(flat.ravel(), minlength=l * N * bins)
    return counts.reshape(l, N, bins) / R


def mdd(orig, gen, bins: int = 50) -> float:
    """Marginal distribution difference.

    For every (time step, dimension) cell, ``bins`` equal-width bins span the
    original's range at that cell; both sets are histogrammed as relative
    frequencies (generated values outside the range fall into the end bins)
    and the absolute frequency gaps are averaged over cells and bins.
    """
    o, g = _check_pair(orig, gen)
    if bins < 2:
        raise ParameterError(f"bins must be >= 2, got {bins}")
    lo = o.min(axis=0)
    span = o.max(axis=0) - lo
    ho = _cell_histograms(o, lo, span, bins)
    hg = _cell_histograms(g, lo, span, bins)
    return float(np.abs(ho - hg).mean())


def window_acf(t, max_lag: int) -> np.ndarray:
    """Per-window biased ACF at lags 1..max_lag, averaged over windows: (max_lag, N).

    Windows whose dimension is constant contribute 0 at every lag.
    """
    x = check_tensor(t)
    R, l, N = x.shape
    if not 1 <= max_lag < l:
        raise ParameterError(f"max_lag must satisfy 1 <= max_lag < l={l}, got {max_lag}")
    xc = x - x.mean(axis=1, keepdims=True)
    denom = (xc * xc).sum(axis=1)  # (R, N)
    flat = denom == 0
    if flat.any():
        log.info("ACF: %d constant window-dimensions treated as zero autocorrelation",
                 int(flat.sum()))
    denom = np.where(flat, 1.0, denom)
    # lagged products via FFT of the zero-padded windows
    nfft = 1 << int(np.ceil(np.log2(2 * l - 1)))
    spec = np.fft.rfft(xc, n=nfft, axis=1)
    cov = np.fft.irfft(spec.real ** 2 + spec.imag ** 2, n=nfft, axis=1)[:, 1:max_lag + 1]
    acf = cov / denom[:, None, :]
    acf[np.broadcast_to(flat[:, None, :], acf.shape)] = 0.0
    return acf.mean(axis=0)


def acd(orig, gen, max_lag: int | None = None) -> float:
    """Autocorrelation difference: mean |ACF_orig - ACF_gen| over lags and dims."""
    o, g = _check_pair(orig, gen)
    if max_lag is None:
        max_lag = o.shape[1] - 1
    if max_lag < 1:
        # single-step windows carry no autocorrelation
        return 0.0
    return float(np.abs(window_acf(o, max_lag) - window_acf(g, max_lag)).mean())


def _standardized_moment(x, order, name):
    pooled = x.reshape(-1, x.shape[2])
    for i in np.flatnonzero(np.ptp(pooled, axis=0) == 0):
        raise DegenerateError(f"{name}: dimension {i} has zero variance")
    dev = pooled - pooled.mean(axis=0)
    dev2 = dev * dev
    var = dev2.mean(axis=0)
    if order == 3:
        return (dev2 * dev).mean(axis=0) / (var * np.sqrt(var))
    return (dev2 * dev2).mean(axis=0) / (var * var)


def skewness(t) -> np.ndarray:
    """Per-dimension skewness E[(X-mu)^3]/sigma^3 pooled over windows and steps."""
    return _standardized_moment(check_tensor(t), 3, "skewness")


def kurtosis(t) -> np.ndarray:
    """Per-dimension (non-excess) kurtosis E[(X-mu)^4]/sigma^4."""
    return _standardized_moment(check_tensor(t), 4, "kurtosis")


def sd(orig, gen) -> float:
    o, g = _check_pair(orig, gen, same_len=False)
    return float(np.abs(skewness(g) - skewness(o)).mean())


def kd(orig, gen) -> float:
    o, g = _check_pair(orig, gen, same_len=False)
    return float(np.abs(kurtosis(g) - kurtosis(o)).mean())


# -- distance-based ---------------------------------------------------------

def nearest_original(orig, gen, chunk: int = 1024) -> tuple[np.ndarray, np.ndarray]:
    """For each generated window, the index of and exact Euclidean distance to
    its nearest original window (ties -> lowest index).
    """
    o, g = _check_pair(orig, gen)
    of = o.reshape(o.shape[0], -1)
    gf = g.reshape(g.shape[0], -1)
    o_sq = np.einsum("ij,ij->i", of, of)
    idx = np.empty(gf.shape[0], dtype=np.int64)
    for s in range(0, gf.shape[0], chunk):
        blk = gf[s:s + chunk]
        # |o|^2 - 2 g.o  (|g|^2 is constant per row and does not move the argmin)
        d = o_sq[None, :] - 2.0 * (blk @ of.T)
        idx[s:s + chunk] = d.argmin(axis=1)
    # recompute the distances directly: the expansion above cancels badly near 0
    dist = np.sqrt(((gf - of[idx]) ** 2).sum(axis=1))
    return idx, dist


def _pairs(o, g, pairing):
    """Original partner index for every generated window."""
    if pairing == "index":
        if o.shape[0] != g.shape[0]:
            raise PairingError(f"index pairing needs equal R, got {o.shape[0]} and {g.shape[0]}")
        return np.arange(g.shape[0])
    if pairing in ("nn", "nearest-neighbor"):
        return nearest_original(o, g)[0]
    raise ParameterError(f"unknown pairing {pairing!r}")


def ed(orig, gen, pairing: str = "nearest-neighbor") -> float:
    """Mean window-level Euclidean distance between paired windows."""
    o, g = _check_pair(orig, gen)
    if pairing in ("nn", "nearest-neighbor"):
        return float(nearest_original(o, g)[1].mean())
    idx = _pairs(o, g, pairing)
    diff = (g - o[idx]).reshape(g.shape[0], -1)
    return float(np.sqrt((diff ** 2).sum(axis=1)).mean())


def dtw(a, b) -> float:
    """Dependent multivariate DTW between two windows of shape (length, N).

    Step cost is the Euclidean distance across dimensions; steps (1,0),
    (0,1), (1,1); lengths may differ.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.shape[1] != b.shape[1]:
        raise ShapeError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    return float(_kernels.dtw_window(a, b))


def dtw_set(orig, gen, pairing: str = "nearest-neighbor", partners=None) -> float:
    """Mean window DTW over pairs. Nearest-neighbour pairing reuses each
    generated window's Euclidean-nearest original (not the DTW-nearest).
    """
    o, g = _check_pair(orig, gen, same_len=False)
    if partners is None:
        if pairing in ("nn", "nearest-neighbor") and o.shape[1] != g.shape[1]:
            raise PairingError("nearest-neighbour pairing needs equal window lengths")
        partners = _pairs(o, g, pairing)
    return float(_kernels.dtw_pairs(np.ascontiguousarray(o[partners]), g).mean())


# -- suite --------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureConfig:
    histogram_bins: int = 50
    acf_max_lag: int | None = None  # None -> l - 1
    pairing: str = "nearest-neighbor"
    repeats: int = 5
    nn_subsample: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.histogram_bins < 2:
            raise ParameterError("histogram_bins must be >= 2")
        if self.repeats < 1:
            raise ParameterError("repeats must be >= 1")
        if self.pairing not in ("index", "nearest-neighbor", "nn"):
            raise ParameterError(f"unknown pairing {self.pairing!r}")
        if self.nn_subsample is not None and self.nn_subsample < 1:
            raise ParameterError("nn_subsample must be >= 1")


@dataclass
class MeasureReport:
    entries: dict[str, tuple[float, float]] = field(default_factory=dict)
    wall_clock: dict[str, float] = field(default_factory=dict)
    diagnostics: dict[str, str] = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def mean(self, name: str) -> float:
        return self.entries[name][0]

    def merge_external(self, values: dict[str, tuple[float, float] | float]) -> None:
        """Attach externally computed measures (e.g. DS, PS, C-FID)."""
        for name, val in values.items():
            mean, std = (val, 0.0) if np.isscalar(val) else val
            self.entries[name] = (float(mean), float(std))

    def to_dict(self) -> dict:
        out = {"measures": {k: {"mean": m, "std": s} for k, (m, s) in self.entries.items()}}
        if self.wall_clock:
            out["wall_clock_seconds"] = dict(self.wall_clock)
        if self.diagnostics:
            out["diagnostics"] = dict(self.diagnostics)
        if self.provenance:
            out["provenance"] = self.provenance
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "MeasureReport":
        rep = cls()
        for k, v in d.get("measures", {}).items():
            rep.entries[k] = (float(v["mean"]), float(v["std"]))
        rep.wall_clock = dict(d.get("wall_clock_seconds", {}))
        rep.diagnostics = dict(d.get("diagnostics", {}))
        rep.provenance = dict(d.get("provenance", {}))
        return rep


def _one_pass(o, g, cfg, rng):
    if cfg.nn_subsample is not None:
        if o.shape[0] > cfg.nn_subsample:
            o = o[np.sort(rng.choice(o.shape[0], cfg.nn_subsample, replace=False))]
        if g.shape[0] > cfg.nn_subsample:
            g = g[np.sort(rng.choice(g.shape[0], cfg.nn_subsample, replace=False))]
    results, errors = {}, {}
    partners = None
    steps = [
        ("MDD", lambda: mdd(o, g, cfg.histogram_bins)),
        ("ACD", lambda: acd(o, g, cfg.acf_max_lag)),
        ("SD", lambda: sd(o, g)),
        ("KD", lambda: kd(o, g)),
    ]
    for name, fn in steps:
        try:
            results[name] = fn()
        except TsgError as exc:
            errors[name] = f"{type(exc).__name__}: {exc}"
    try:
        if cfg.pairing == "index":
            partners = _pairs(o, g, "index")
            results["ED"] = ed(o, g, "index")
        else:
            partners, dist = nearest_original(o, g)
            results["ED"] = float(dist.mean())
        results["DTW"] = dtw_set(o, g, partners=partners)
    except TsgError as exc:
        errors["ED"] = errors["DTW"] = f"{type(exc).__name__}: {exc}"
    return results, errors


def run_suite(orig, gen, cfg: MeasureConfig = MeasureConfig(), timings=None) -> MeasureReport:
    """Evaluate all six measures ``cfg.repeats`` times and report mean and std.

    A measure that fails is left out of ``entries`` and its error recorded in
    ``diagnostics``. ``timings`` (label -> seconds, e.g. from :func:`timed`)
    is copied into the report's wall-clock block.
    """
    o, g = _check_pair(orig, gen)
    rng = np.random.default_rng(cfg.seed)
    runs = {name: [] for name in MEASURES}
    report = MeasureReport()
    for _ in range(cfg.repeats):
        res, errs = _one_pass(o, g, cfg, rng)
        for name, val in res.items():
            runs[name].append(val)
        report.diagnostics.update(errs)
    for name in MEASURES:
        vals = runs[name]
        if name in report.diagnostics or not vals:
            continue
        arr = np.asarray(vals)
        if (arr == arr[0]).all():
            report.entries[name] = (float(arr[0]), 0.0)
        else:
            report.entries[name] = (float(arr.mean()), float(arr.std()))
    if timings:
        report.wall_clock.update(timings)
    report.provenance = {
        "config": asdict(cfg),
        "orig_sha256": tensor_digest(o),
        "gen_sha256": tensor_digest(g),
        "backend": _kernels.BACKEND,
    }
    return report


def timed(label: str, action, *args, **kwargs):
    """Run ``action(*args, **kwargs)``; return ``(result, seconds)`` on a monotonic clock."""
    t0 = time.perf_counter()
    result = action(*args, **kwargs)
    elapsed = time.perf_counter() - t0
    log.info("%s took %.3f s", label, elapsed)
    return result, elapsed


@contextmanager
def timing_scope(label: str, sink: dict):
    """Context-manager variant of :func:`timed` writing into ``sink[label]``."""
    t0 = time.perf_counter()
    try:
        yield
    finally:
        sink[label] = time.perf_counter() - t0
