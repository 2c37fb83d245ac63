"""Domain-adaptation scenarios: single, cross and reference training sets,
all evaluated against target-domain ground truth.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateError, InputError, ShapeError, SplitError
from .measures import MeasureConfig, MeasureReport, run_suite
from .tensor import check_tensor

KINDS = ("single", "cross", "reference")

# domain attribute, source domain, target domains
PRESETS = {
    "HAPT": {"attribute": "user", "source": "14", "targets": ["0", "23", "18", "52", "20"],
             "filter": {"activity": "walking"}},
    "Air": {"attribute": "city", "source": "TJ", "targets": ["BJ", "GZ", "SZ"]},
    "Boiler": {"attribute": "boiler", "source": "1", "targets": ["2", "3"]},
}


@dataclass(frozen=True)
class DomainData:
    source_train: np.ndarray
    target_hist: np.ndarray
    target_gt: np.ndarray
    source_test: np.ndarray | None = None
    source_name: str = "source"
    target_name: str = "target"

    def __post_init__(self):
        shapes = {}
        for name in ("source_train", "target_hist", "target_gt", "source_test"):
            val = getattr(self, name)
            if val is None:
                continue
            if name == "target_hist" and np.asarray(val).size == 0:
                # an empty history is representable; scenarios needing it reject it
                arr = np.asarray(val, dtype=np.float64)
            else:
                arr = check_tensor(val, name)
                shapes[name] = arr.shape[1:]
            object.__setattr__(self, name, arr)
        if len(set(shapes.values())) > 1:
            raise ShapeError(f"(l, N) differs across domain tensors: {shapes}")
        hist = self.target_hist
        if hist.size and hist.shape[0] >= self.target_gt.shape[0]:
            raise ShapeError("target history must have fewer windows than target ground truth")


@dataclass(frozen=True)
class DaScenario:
    kind: str
    training_set: np.ndarray
    eval_gt: np.ndarray
    source_name: str = "source"
    target_name: str = "target"


def _require_hist(d):
    if d.target_hist.size == 0:
        raise DegenerateError("target history is empty; cross/reference need target data")
    return d.target_hist


def build_single(d: DomainData) -> DaScenario:
    return DaScenario("single", d.source_train, d.target_gt, d.source_name, d.target_name)


def build_cross(d: DomainData, seed: int = 0) -> DaScenario:
    """Source train followed by target history, shuffled with ``seed``."""
    hist = _require_hist(d)
    joined = np.concatenate([d.source_train, hist], axis=0)
    joined = joined[np.random.default_rng(seed).permutation(joined.shape[0])]
    return DaScenario("cross", joined, d.target_gt, d.source_name, d.target_name)


def build_reference(d: DomainData) -> DaScenario:
    return DaScenario("reference", _require_hist(d), d.target_gt, d.source_name, d.target_name)


def build(kind: str, d: DomainData, seed: int = 0) -> DaScenario:
    if kind == "single":
        return build_single(d)
    if kind == "cross":
        return build_cross(d, seed)
    if kind == "reference":
        return build_reference(d)
    raise InputError(f"unknown scenario kind {kind!r}; expected one of {KINDS}")


def split_domain(target_full, hist_fraction: float = 0.1, seed: int = 0):
    """Shuffle the target windows and take the front ``floor(fraction * R)``
    as history; the remainder is ground truth.
    """
    arr = check_tensor(target_full, "target")
    if not 0.0 < hist_fraction < 1.0:
        raise SplitError(f"hist_fraction must lie in (0, 1), got {hist_fraction}")
    R = arr.shape[0]
    n_hist = math.floor(hist_fraction * R + 1e-9)
    if n_hist < 1 or n_hist >= R:
        raise SplitError(f"hist_fraction {hist_fraction} on {R} windows leaves an empty side")
    arr = arr[np.random.default_rng(seed).permutation(R)]
    return arr[:n_hist].copy(), arr[n_hist:].copy()


def evaluate_da(generated, scenario: DaScenario, cfg: MeasureConfig = MeasureConfig()) -> MeasureReport:
    """Score generated target data against the scenario's ground truth."""
    gen = check_tensor(generated, "generated")
    if gen.shape[1:] != scenario.eval_gt.shape[1:]:
        raise ShapeError(f"generated (l, N)={gen.shape[1:]} but ground truth has "
                         f"{scenario.eval_gt.shape[1:]}")
    return run_suite(scenario.eval_gt, gen, cfg)


def write_manifest(path, *, kind, source_name, target_name, training_path, gt_path,
                   hist_fraction, seeds: dict, extra: dict | None = None) -> dict:
    """Write the scenario manifest handed to an external generator."""
    manifest = {
        "kind": kind,
        "source": source_name,
        "target": target_name,
        "training_tensor": str(training_path),
        "ground_truth_tensor": str(gt_path),
        "hist_fraction": hist_fraction,
        "seeds": seeds,
    }
    if extra:
        manifest.update(extra)
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def read_manifest(path) -> dict:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input not found: {path}")
    try:
        manifest = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    missing = {"kind", "training_tensor", "ground_truth_tensor"} - manifest.keys()
    if missing:
        raise InputError(f"{path}: manifest missing {sorted(missing)}")
    return manifest
