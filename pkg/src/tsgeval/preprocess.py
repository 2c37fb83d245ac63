"""Dataset preprocessing: period estimation, windowing, shuffling, splitting
and min-max normalisation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateError, InputError, ParameterError, ShapeError, SplitError
from .tensor import RawSeries, check_tensor

log = logging.getLogger(__name__)

ACF_PEAK_THRESHOLD = 0.1


@dataclass(frozen=True)
class PreprocessConfig:
    seq_len: int | str = "auto"
    stride: int = 1
    split_ratio: float = 0.9
    shuffle_seed: int = 0
    normalize: bool = True
    max_lag: int | None = None  # period search horizon for seq_len="auto"; default L // 2

    def __post_init__(self):
        if self.seq_len != "auto" and (not isinstance(self.seq_len, int) or self.seq_len < 1):
            raise ParameterError(f"seq_len must be a positive int or 'auto', got {self.seq_len!r}")
        if self.stride < 1:
            raise ParameterError(f"stride must be >= 1, got {self.stride}")
        if not 0.0 < self.split_ratio < 1.0:
            raise ParameterError(f"split_ratio must lie in (0, 1), got {self.split_ratio}")


def _acf_biased(x: np.ndarray, max_lag: int) -> np.ndarray:
    """Biased sample ACF of the columns of ``x`` (L, N) at lags 0..max_lag."""
    xc = x - x.mean(axis=0)
    denom = (xc * xc).sum(axis=0)
    out = np.empty((max_lag + 1, x.shape[1]))
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        out[k] = (xc[:-k] * xc[k:]).sum(axis=0) / denom
    return out


def estimate_period(raw: RawSeries, max_lag: int) -> int | None:
    """Smallest lag >= 2 at which the dimension-averaged ACF has a local
    maximum above 0.1, or ``None`` when there is no such lag.

    Dimensions with zero variance are left out of the average.
    """
    x = raw.values
    if not 2 <= max_lag < x.shape[0]:
        raise ParameterError(f"max_lag must satisfy 2 <= max_lag < L={x.shape[0]}")
    varying = np.ptp(x, axis=0) > 0
    if not varying.any():
        raise DegenerateError("constant series: every dimension has zero variance")
    acf = _acf_biased(x[:, varying], max_lag).mean(axis=1)
    for k in range(2, max_lag):
        if acf[k] > ACF_PEAK_THRESHOLD and acf[k] > acf[k - 1] and acf[k] >= acf[k + 1]:
            return k
    return None


def segment(raw: RawSeries | np.ndarray, l: int, stride: int = 1) -> np.ndarray:
    """Cut the long series into overlapping windows of length ``l``.

    Window ``r`` holds rows ``r*stride .. r*stride + l - 1``; with stride 1
    there are ``L - l + 1`` windows.
    """
    x = raw.values if isinstance(raw, RawSeries) else RawSeries(raw).values
    L = x.shape[0]
    if stride < 1:
        raise ParameterError(f"stride must be >= 1, got {stride}")
    if not 1 <= l <= L:
        raise ShapeError(f"window length {l} not in [1, L={L}]")
    view = np.lib.stride_tricks.sliding_window_view(x, l, axis=0)[::stride]
    # sliding_window_view puts the window axis last: (R, N, l) -> (R, l, N)
    return np.ascontiguousarray(view.transpose(0, 2, 1))


def shuffle_windows(t, seed: int) -> np.ndarray:
    arr = check_tensor(t)
    perm = np.random.default_rng(seed).permutation(arr.shape[0])
    return arr[perm]


def split(t, ratio: float = 0.9) -> tuple[np.ndarray, np.ndarray]:
    """Front ``floor(ratio * R)`` windows become train, the rest test."""
    arr = check_tensor(t)
    if not 0.0 < ratio < 1.0:
        raise SplitError(f"ratio must lie in (0, 1), got {ratio}")
    R = arr.shape[0]
    n_train = math.floor(ratio * R + 1e-9)
    if n_train < 1 or n_train >= R:
        raise SplitError(f"ratio {ratio} on {R} windows leaves an empty side ({n_train}/{R - n_train})")
    return arr[:n_train].copy(), arr[n_train:].copy()


@dataclass(frozen=True)
class Scaler:
    """Per-dimension min/max recorded from the training split."""

    minimum: np.ndarray
    maximum: np.ndarray

    def transform(self, t) -> np.ndarray:
        arr = check_tensor(t)
        if arr.shape[2] != self.minimum.shape[0]:
            raise ShapeError(f"scaler has {self.minimum.shape[0]} dims, tensor has {arr.shape[2]}")
        span = self.maximum - self.minimum
        const = span == 0
        out = (arr - self.minimum) / np.where(const, 1.0, span)
        out[..., const] = 0.5
        return out

    def inverse_transform(self, t) -> np.ndarray:
        arr = check_tensor(t)
        return arr * (self.maximum - self.minimum) + self.minimum

    def save(self, path) -> None:
        lines = ["dim,min,max"]
        lines += [f"{i},{lo!r},{hi!r}" for i, (lo, hi) in
                  enumerate(zip(self.minimum.tolist(), self.maximum.tolist()))]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path) -> "Scaler":
        path = Path(path)
        if not path.is_file():
            raise InputError(f"input not found: {path}")
        rows = [ln.split(",") for ln in path.read_text().splitlines()[1:] if ln.strip()]
        try:
            rows.sort(key=lambda r: int(r[0]))
            lo = np.array([float(r[1]) for r in rows])
            hi = np.array([float(r[2]) for r in rows])
        except (ValueError, IndexError):
            raise InputError(f"{path}: malformed scaler file") from None
        return cls(lo, hi)


def fit_normalize(train) -> tuple[Scaler, np.ndarray]:
    """Fit a min-max scaler on ``train`` and return it with the scaled train set.

    Constant dimensions map to 0.5.
    """
    arr = check_tensor(train)
    scaler = Scaler(arr.min(axis=(0, 1)), arr.max(axis=(0, 1)))
    return scaler, scaler.transform(arr)


def apply_normalize(scaler: Scaler, t) -> np.ndarray:
    """Scale ``t`` with a fitted scaler. Values outside the fit range are kept as-is."""
    return scaler.transform(t)


def run_pipeline(raw: RawSeries, cfg: PreprocessConfig = PreprocessConfig()):
    """segment -> shuffle -> split -> normalise.

    Returns ``(train, test, scaler, seq_len)``; ``scaler`` is ``None`` when
    normalisation is switched off.
    """
    L = raw.length
    l = cfg.seq_len
    if l == "auto":
        max_lag = cfg.max_lag if cfg.max_lag is not None else max(2, L // 2)
        max_lag = min(max_lag, L - 1)
        l = estimate_period(raw, max_lag)
        if l is None:
            raise DegenerateError("no period found by ACF; supply seq_len explicitly")
        log.info("ACF period estimate: l=%d", l)
    windows = segment(raw, l, cfg.stride)
    windows = shuffle_windows(windows, cfg.shuffle_seed)
    train, test = split(windows, cfg.split_ratio)
    scaler = None
    if cfg.normalize:
        scaler, train = fit_normalize(train)
        test = apply_normalize(scaler, test)
    return train, test, scaler, l
