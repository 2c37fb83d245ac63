"""Random-phase sine datasets and the identical vs. random-sampling
robustness table for the measure suite.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

import numpy as np

from .measures import MEASURES, MeasureConfig, MeasureReport, run_suite


@dataclass(frozen=True)
class SineConfig:
    r_count: int = 10000
    seq_len: int = 24
    dim_count: int = 5
    seed: int = 0
    shared_params: bool = False  # one (eta, theta) per window instead of per dimension


def sine_windows(eta: np.ndarray, theta: np.ndarray, seq_len: int) -> np.ndarray:
    """x[r, j, i] = sin(2*pi*eta[r, i]*j + theta[r, i]) for j = 1..seq_len."""
    eta = np.asarray(eta, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    j = np.arange(1, seq_len + 1, dtype=np.float64)[None, :, None]
    return np.sin(2.0 * np.pi * eta[:, None, :] * j + theta[:, None, :])


def gen_sine(cfg: SineConfig = SineConfig()) -> np.ndarray:
    """Draw eta ~ U[0, 1), theta ~ U[-pi, pi) and build the (R, l, N) sine tensor."""
    rng = np.random.default_rng(cfg.seed)
    cols = 1 if cfg.shared_params else cfg.dim_count
    eta = rng.uniform(0.0, 1.0, size=(cfg.r_count, cols))
    theta = rng.uniform(-np.pi, np.pi, size=(cfg.r_count, cols))
    if cfg.shared_params:
        eta = np.repeat(eta, cfg.dim_count, axis=1)
        theta = np.repeat(theta, cfg.dim_count, axis=1)
    return sine_windows(eta, theta, cfg.seq_len)


SCENARIOS = ("Identical", "Random Sampling")


def run_robustness(l: int, seed: int = 0, cfg: MeasureConfig = MeasureConfig(),
                   r_count: int = 10000, dim_count: int = 5,
                   shared_params: bool = False) -> dict[str, MeasureReport]:
    """Evaluate a sine dataset against itself and against an independently
    seeded draw (seed + 1). Data is used raw, without [0, 1] scaling.
    """
    base = SineConfig(r_count, l, dim_count, seed, shared_params)
    orig = gen_sine(base)
    other = gen_sine(SineConfig(r_count, l, dim_count, seed + 1, shared_params))
    return {
        "Identical": run_suite(orig, orig, cfg),
        "Random Sampling": run_suite(orig, other, cfg),
    }


def _shape_label(r_count, l, dim_count):
    return f"({r_count:,}, {l}, {dim_count})"


def robustness_rows(tables: dict[int, dict[str, MeasureReport]], r_count=10000, dim_count=5):
    """Flatten {l: {scenario: report}} into table rows ordered scenario-major."""
    rows = []
    for scenario in SCENARIOS:
        for l in sorted(tables):
            rep = tables[l][scenario]
            row = {"Input": scenario, "Shape (R,l,N)": _shape_label(r_count, l, dim_count)}
            for name in MEASURES:
                row[name] = rep.entries[name][0] if name in rep.entries else None
            rows.append(row)
    return rows


def robustness_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["Input", "Shape (R,l,N)", *MEASURES], lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: ("" if v is None else (repr(v) if isinstance(v, float) else v))
                    for k, v in row.items()})
    return buf.getvalue()


def robustness_json(rows) -> str:
    return json.dumps(rows, indent=2) + "\n"
