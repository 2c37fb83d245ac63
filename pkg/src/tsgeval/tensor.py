"""Time-series tensors, raw series, on-disk formats and the dataset registry.

A tensor is a C-contiguous float64 ``numpy.ndarray`` of shape ``(R, l, N)``:
``R`` windows, ``l`` time steps, ``N`` dimensions.
"""

from __future__ import annotations

import csv
import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, InputError, ShapeError, TruncatedError

MAGIC = b"TSGT"
VERSION = 1
_HEADER = struct.Struct("<4sIQQQ")
HEADER_SIZE = _HEADER.size  # 32 bytes


def check_tensor(t, name: str = "tensor") -> np.ndarray:
    """Validate and return ``t`` as a C-contiguous float64 (R, l, N) array."""
    arr = np.ascontiguousarray(t, dtype=np.float64)
    if arr.ndim != 3:
        raise ShapeError(f"{name}: expected rank-3 (R, l, N), got shape {arr.shape}")
    if min(arr.shape) < 1:
        raise ShapeError(f"{name}: every axis must be >= 1, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ShapeError(f"{name}: contains NaN or Inf")
    return arr


def tensor_digest(t: np.ndarray) -> str:
    """SHA-256 over shape and payload bytes."""
    arr = check_tensor(t)
    h = hashlib.sha256()
    h.update(np.asarray(arr.shape, dtype="<u8").tobytes())
    h.update(arr.astype("<f8", copy=False).tobytes())
    return h.hexdigest()


@dataclass(frozen=True)
class RawSeries:
    """A long multivariate series: ``values`` has shape (L, N)."""

    values: np.ndarray
    columns: tuple[str, ...] | None = None

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ShapeError(f"raw series must be (L, N) with L, N >= 1, got {v.shape}")
        if not np.isfinite(v).all():
            raise ShapeError("raw series contains NaN or Inf")
        object.__setattr__(self, "values", v)
        if self.columns is not None:
            cols = tuple(self.columns)
            if len(cols) != v.shape[1]:
                raise ShapeError(f"{len(cols)} column names for {v.shape[1]} columns")
            object.__setattr__(self, "columns", cols)

    @property
    def length(self) -> int:
        return self.values.shape[0]

    @property
    def dim_count(self) -> int:
        return self.values.shape[1]


def _read_rows(path):
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input not found: {path}")
    with open(path, newline="") as fh:
        return [row for row in csv.reader(fh) if row]


def _parse_cell(cell, row_no, col_no):
    try:
        return float(cell)
    except ValueError:
        raise InputError(f"parse error at row {row_no}, column {col_no}: {cell!r}") from None


def load_raw_csv(path, has_header: bool = False) -> RawSeries:
    """Read a wide CSV (one row per time point, one column per dimension).

    Rows and columns are kept in file order. Row numbers in error messages
    are 1-based file lines, columns 1-based.
    """
    rows = _read_rows(path)
    columns = None
    start = 0
    if has_header:
        if not rows:
            raise InputError(f"{path}: empty file")
        columns = tuple(c.strip() for c in rows[0])
        start = 1
    body = rows[start:]
    if not body:
        raise InputError(f"{path}: no data rows")
    width = len(columns) if columns is not None else len(body[0])
    values = np.empty((len(body), width))
    for r, row in enumerate(body):
        if len(row) != width:
            raise InputError(
                f"ragged rows: row {r + start + 1} has {len(row)} columns, expected {width}"
            )
        for c, cell in enumerate(row):
            values[r, c] = _parse_cell(cell, r + start + 1, c + 1)
    return RawSeries(values, columns)


def load_long_csv(path) -> np.ndarray:
    """Read windowed data in long format: ``window_id,time_step,dim_0..dim_{N-1}``.

    Window ids and time steps must each form a dense 0-based range.
    """
    rows = _read_rows(path)
    if len(rows) < 2:
        raise InputError(f"{path}: no data rows")
    header = [h.strip() for h in rows[0]]
    if header[:2] != ["window_id", "time_step"] or len(header) < 3:
        raise InputError(f"{path}: header must start with window_id,time_step,dim_0,...")
    n_dim = len(header) - 2
    recs = []
    for r, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"ragged rows: row {r} has {len(row)} columns, expected {len(header)}")
        try:
            w, s = int(row[0]), int(row[1])
        except ValueError:
            raise InputError(f"parse error at row {r}: non-integer window_id/time_step") from None
        recs.append((w, s, [_parse_cell(c, r, k + 3) for k, c in enumerate(row[2:])]))
    n_win = max(w for w, _, _ in recs) + 1
    n_len = max(s for _, s, _ in recs) + 1
    if n_win * n_len != len(recs):
        raise ShapeError(f"{path}: expected {n_win}x{n_len} rows, got {len(recs)}")
    out = np.full((n_win, n_len, n_dim), np.nan)
    for w, s, vals in recs:
        if w < 0 or s < 0:
            raise InputError(f"{path}: negative window_id/time_step")
        out[w, s] = vals
    if np.isnan(out).any():
        raise ShapeError(f"{path}: duplicate or missing (window_id, time_step) rows")
    return check_tensor(out)


def save_long_csv(t, path) -> None:
    arr = check_tensor(t)
    R, l, N = arr.shape
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["window_id", "time_step"] + [f"dim_{i}" for i in range(N)])
        for r in range(R):
            for j in range(l):
                w.writerow([r, j] + [repr(float(x)) for x in arr[r, j]])


def tensor_to_bytes(t) -> bytes:
    arr = check_tensor(t)
    R, l, N = arr.shape
    return _HEADER.pack(MAGIC, VERSION, R, l, N) + arr.astype("<f8", copy=False).tobytes()


def tensor_from_bytes(buf: bytes) -> np.ndarray:
    if len(buf) < HEADER_SIZE:
        raise TruncatedError(f"header truncated: {len(buf)} < {HEADER_SIZE} bytes")
    magic, version, R, l, N = _HEADER.unpack_from(buf)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"unsupported format version {version}")
    if min(R, l, N) < 1:
        raise FormatError(f"invalid shape ({R}, {l}, {N}) in header")
    expected = R * l * N * 8
    got = len(buf) - HEADER_SIZE
    if got != expected:
        raise TruncatedError(f"payload is {got} bytes, header promises {expected}")
    arr = np.frombuffer(buf, dtype="<f8", offset=HEADER_SIZE).reshape(R, l, N)
    return check_tensor(arr.astype(np.float64))


def save_tensor(t, path) -> None:
    """Write ``t`` in the TSGT binary format."""
    Path(path).write_bytes(tensor_to_bytes(t))


def load_tensor(path) -> np.ndarray:
    """Read a TSGT file written by :func:`save_tensor` (or any conforming writer)."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input not found: {path}")
    return tensor_from_bytes(path.read_bytes())


@dataclass(frozen=True)
class DatasetMeta:
    name: str
    r_count: int
    seq_len: int
    dim_count: int
    domain: str


_REGISTRY = (
    DatasetMeta("DLG", 246, 14, 20, "Traffic"),
    DatasetMeta("Stock", 3294, 24, 6, "Financial"),
    DatasetMeta("Stock Long", 3204, 125, 6, "Financial"),
    DatasetMeta("Exchange", 6715, 125, 8, "Financial"),
    DatasetMeta("Energy", 17739, 24, 28, "Appliances"),
    DatasetMeta("Energy Long", 17649, 125, 28, "Appliances"),
    DatasetMeta("EEG", 13366, 128, 14, "Medical"),
    DatasetMeta("HAPT", 1514, 128, 6, "Medical"),
    DatasetMeta("Air", 7731, 168, 6, "Sensor"),
    DatasetMeta("Boiler", 80935, 192, 11, "Industrial"),
)


def registry() -> list[DatasetMeta]:
    """The ten benchmark datasets with their windowed shapes."""
    return list(_REGISTRY)


def get_dataset(name: str) -> DatasetMeta | None:
    """Case-insensitive lookup; ``None`` when the name is unknown."""
    key = name.strip().lower()
    for meta in _REGISTRY:
        if meta.name.lower() == key:
            return meta
    return None
