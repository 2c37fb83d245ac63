"""Friedman test, Conover post-hoc comparisons and critical-difference tiers
over a methods x datasets score table (lower score is better).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError, ShapeError
from .special import chi2_sf, t_sf


@dataclass(frozen=True)
class ScoreTable:
    methods: tuple[str, ...]
    datasets: tuple[str, ...]
    scores: np.ndarray  # (k methods, n datasets)

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=np.float64)
        object.__setattr__(self, "scores", s)
        object.__setattr__(self, "methods", tuple(self.methods))
        object.__setattr__(self, "datasets", tuple(self.datasets))
        if s.shape != (len(self.methods), len(self.datasets)):
            raise ShapeError(f"scores shape {s.shape} != ({len(self.methods)}, {len(self.datasets)})")
        if s.shape[0] < 2 or s.shape[1] < 2:
            raise ShapeError("need at least 2 methods and 2 datasets")
        if not np.isfinite(s).all():
            raise ShapeError("score table has missing or non-finite cells")

    @property
    def k(self) -> int:
        return len(self.methods)

    @property
    def n(self) -> int:
        return len(self.datasets)


def read_score_csv(path) -> ScoreTable:
    """CSV with a header row of dataset names (first cell ignored) and one row per method."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input not found: {path}")
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2:
        raise InputError(f"{path}: need a header and at least one method row")
    datasets = [c.strip() for c in rows[0][1:]]
    methods, scores = [], []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(datasets) + 1:
            raise InputError(f"ragged rows: row {i} has {len(row)} cells")
        methods.append(row[0].strip())
        try:
            scores.append([float(c) for c in row[1:]])
        except ValueError:
            raise InputError(f"parse error in row {i}") from None
    return ScoreTable(tuple(methods), tuple(datasets), np.array(scores))


def _rank_1d(col: np.ndarray) -> np.ndarray:
    order = np.argsort(col, kind="mergesort")
    ranks = np.empty(len(col))
    sorted_vals = col[order]
    i = 0
    while i < len(col):
        j = i
        while j + 1 < len(col) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def rank_columns(t: ScoreTable) -> np.ndarray:
    """(k, n) ranks per dataset; rank 1 is the lowest score, ties share the mean rank."""
    return np.column_stack([_rank_1d(t.scores[:, j]) for j in range(t.n)])


def friedman(t: ScoreTable, ranks: np.ndarray | None = None) -> tuple[float, float]:
    """Tie-corrected Friedman chi-square statistic and its p-value (df = k - 1)."""
    if ranks is None:
        ranks = rank_columns(t)
    k, n = t.k, t.n
    avg = ranks.mean(axis=1)
    stat = 12.0 * n / (k * (k + 1)) * float(((avg - (k + 1) / 2.0) ** 2).sum())
    ties = 0.0
    for j in range(n):
        _, counts = np.unique(ranks[:, j], return_counts=True)
        ties += float((counts ** 3 - counts).sum())
    correction = 1.0 - ties / (n * k * (k * k - 1))
    if correction <= 0 or stat == 0:
        return 0.0, 1.0
    stat /= correction
    return stat, chi2_sf(stat, k - 1)


def conover_posthoc(t: ScoreTable, ranks: np.ndarray | None = None) -> np.ndarray:
    """Two-sided pairwise p-values of Conover's test after Friedman.

    t = |R_i - R_j| / sqrt(2 (n A - sum R^2) / ((n - 1)(k - 1))) with
    rank sums R, A the sum of squared ranks, and (n-1)(k-1) degrees of
    freedom. A zero residual variance gives p = 1 for equal rank sums and
    p = 0 otherwise.
    """
    if ranks is None:
        ranks = rank_columns(t)
    k, n = t.k, t.n
    rank_sums = ranks.sum(axis=1)
    a1 = float((ranks ** 2).sum())
    df = (n - 1) * (k - 1)
    resid = 2.0 * (n * a1 - float((rank_sums ** 2).sum())) / df
    out = np.ones((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            diff = abs(rank_sums[i] - rank_sums[j])
            if diff == 0:
                p = 1.0
            elif resid <= 1e-12 * max(1.0, n * a1):
                p = 0.0
            else:
                p = min(1.0, 2.0 * t_sf(diff / math.sqrt(resid), df))
            out[i, j] = out[j, i] = p
    return out


@dataclass
class RankAnalysis:
    methods: tuple[str, ...]
    avg_ranks: np.ndarray
    friedman_stat: float
    p_value: float
    conover_p: np.ndarray
    alpha: float = 0.05
    tiers: list[list[str]] = field(default_factory=list)
    cliques: list[list[str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "methods": list(self.methods),
            "avg_ranks": [float(r) for r in self.avg_ranks],
            "friedman_stat": self.friedman_stat,
            "p_value": self.p_value,
            "df": len(self.methods) - 1,
            "alpha": self.alpha,
            "conover_p": self.conover_p.tolist(),
            "tiers": self.tiers,
            "cliques": self.cliques,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def tier_csv(self) -> str:
        tier_of = {m: i + 1 for i, tier in enumerate(self.tiers) for m in tier}
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["method", "avg_rank", "tier"])
        for i in np.argsort(self.avg_ranks, kind="mergesort"):
            m = self.methods[i]
            w.writerow([m, repr(float(self.avg_ranks[i])), tier_of.get(m, "")])
        return buf.getvalue()


def critical_difference_tiers(analysis: RankAnalysis, alpha: float | None = None):
    """Group methods, in average-rank order, into tiers of mutually
    non-significant methods (every pairwise p >= alpha). Also returns the
    maximal non-significance cliques over contiguous rank runs, which is what
    a critical-difference diagram draws as bars.
    """
    alpha = analysis.alpha if alpha is None else alpha
    order = list(np.argsort(analysis.avg_ranks, kind="mergesort"))
    p = analysis.conover_p
    tiers: list[list[int]] = []
    for i in order:
        if tiers and all(p[i, j] >= alpha for j in tiers[-1]):
            tiers[-1].append(i)
        else:
            tiers.append([i])
    cliques: list[tuple[int, int]] = []
    for s in range(len(order)):
        e = s
        while e + 1 < len(order) and all(p[order[e + 1], order[x]] >= alpha
                                          for x in range(s, e + 1)):
            e += 1
        if e > s and not any(cs <= s and e <= ce for cs, ce in cliques):
            cliques.append((s, e))
    names = analysis.methods
    return ([[names[i] for i in tier] for tier in tiers],
            [[names[order[x]] for x in range(s, e + 1)] for s, e in cliques])


def analyze(t: ScoreTable, alpha: float = 0.05) -> RankAnalysis:
    ranks = rank_columns(t)
    stat, p = friedman(t, ranks)
    res = RankAnalysis(t.methods, ranks.mean(axis=1), stat, p, conover_posthoc(t, ranks), alpha)
    res.tiers, res.cliques = critical_difference_tiers(res, alpha)
    return res
