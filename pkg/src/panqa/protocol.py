"""Standardize, combine and rank cost indexes across fusion candidates.

Costs are grouped into four product categories plus two process costs.
Within a category each cost column is z-scored across candidates and the
standardized columns are summed; category sums are converted to partial
ranks (PDPR), partial ranks are summed, and the sums ranked again to give
final ranks. Category 2 exists in two flavours: with the inverse-PCC
column (cases A/B) and without it (cases C/D). Process costs contribute
two further partial ranks (PSPR) in cases B/D.

Competition ("1224") ranking throughout: ties share the minimal rank.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegeneracyError, InputError

CATEGORY1_KEYS = ("mean", "std", "skewness", "kurtosis", "entropy")
CATEGORY3_KEYS = ("glcm_contrast", "glcm_energy", "glcm_lne", "cross_aura")


@dataclass
class QiRecord:
    """All scalar costs collected for one candidate. Lower is better."""

    candidate_id: str
    category1: dict[str, float]   # five summary-statistic costs
    category2: dict[str, float]   # post_class_change, inverse_pcc
    category3: dict[str, float]   # three texture costs + cross-aura
    category4: dict[str, float]   # binary_contour
    process: dict[str, float]     # wall_seconds, n_free_parameters

    def __post_init__(self):
        for group in (self.category1, self.category2, self.category3,
                      self.category4, self.process):
            for key, val in group.items():
                if not math.isfinite(val):
                    raise InputError(f"non-finite cost {key}")
        if self.process.get("n_free_parameters", 1) < 1:
            raise InputError("n_free_parameters must be >= 1")


@dataclass
class RankTable:
    candidate_ids: list[str]
    pdpr: dict[str, list[int]]        # per category key -> ranks
    pspr1: list[int] | None
    pspr2: list[int] | None
    sum_case_a: list[int]
    pdfr_case_a: list[int]
    sum_case_c: list[int]
    pdfr_case_c: list[int]
    sum_case_b: list[int] | None = None
    ppfr_case_b: list[int] | None = None
    sum_case_d: list[int] | None = None
    ppfr_case_d: list[int] | None = None
    dropped_columns: list[str] = field(default_factory=list)


def zscore(values) -> np.ndarray:
    """Population standard score; raises on fewer than 2 values or zero
    spread."""
    x = np.asarray(values, dtype=np.float64)
    if x.size < 2:
        raise InputError("need at least 2 values to standardize")
    std = x.std()
    if std == 0.0:
        raise DegeneracyError("degenerate QI: zero variance")
    return (x - x.mean()) / std


def rank(values, lower_is_better: bool = True) -> list[int]:
    """Competition ranking: 1 + number of strictly better values."""
    x = np.asarray(values, dtype=np.float64)
    if x.size < 1:
        raise InputError("empty value list")
    if lower_is_better:
        better = x[None, :] < x[:, None]
    else:
        better = x[None, :] > x[:, None]
    return [int(v) for v in 1 + better.sum(axis=1)]


def _standardized_sum(columns: dict[str, list[float]]
                      ) -> tuple[np.ndarray, list[str]]:
    """Sum of z-scored columns; degenerate columns dropped with a warning."""
    total = None
    dropped = []
    for key, col in columns.items():
        try:
            z = zscore(col)
        except DegeneracyError:
            warnings.warn(f"dropping degenerate QI column {key!r}",
                          stacklevel=3)
            dropped.append(key)
            continue
        total = z if total is None else total + z
    if total is None:
        total = np.zeros(len(next(iter(columns.values()))))
    return total, dropped


def category_sum(records: list[QiRecord], category: int,
                 case: str = "with_ipcc") -> np.ndarray:
    """Per-candidate sum of standardized costs for one category."""
    if len(records) < 2:
        raise InputError("need at least 2 candidates")
    if case not in ("with_ipcc", "without_ipcc"):
        raise InputError(f"unknown case {case!r}")
    group_name = {1: "category1", 2: "category2", 3: "category3",
                  4: "category4"}.get(category)
    if group_name is None:
        raise InputError(f"unknown category {category}")
    keys = list(getattr(records[0], group_name).keys())
    if category == 2 and case == "without_ipcc":
        keys = [k for k in keys if k != "inverse_pcc"]
    columns = {k: [getattr(r, group_name)[k] for r in records] for k in keys}
    total, _ = _standardized_sum(columns)
    return total


def combine_partial_ranks(pdpr1, pdpr2_i, pdpr2_ii, pdpr3, pdpr4,
                          pspr1=None, pspr2=None) -> dict[str, list[int]]:
    """Rank-combination stage: sums of partial ranks and final ranks for
    cases A/C (product) and, when process ranks are given, B/D."""
    cols = [np.asarray(c, dtype=np.int64)
            for c in (pdpr1, pdpr2_i, pdpr2_ii, pdpr3, pdpr4)]
    if len({c.size for c in cols}) != 1:
        raise InputError("partial rank columns differ in length")
    p1, p2i, p2ii, p3, p4 = cols
    out = {}
    sum_a = p1 + p2i + p3 + p4
    sum_c = p1 + p2ii + p3 + p4
    out["sum_case_a"] = list(map(int, sum_a))
    out["pdfr_case_a"] = rank(sum_a)
    out["sum_case_c"] = list(map(int, sum_c))
    out["pdfr_case_c"] = rank(sum_c)
    if pspr1 is not None and pspr2 is not None:
        s1 = np.asarray(pspr1, dtype=np.int64)
        s2 = np.asarray(pspr2, dtype=np.int64)
        if s1.size != p1.size or s2.size != p1.size:
            raise InputError("process rank columns differ in length")
        sum_b = sum_a + s1 + s2
        sum_d = sum_c + s1 + s2
        out["sum_case_b"] = list(map(int, sum_b))
        out["ppfr_case_b"] = rank(sum_b)
        out["sum_case_d"] = list(map(int, sum_d))
        out["ppfr_case_d"] = rank(sum_d)
    return out


def aggregate(records: list[QiRecord],
              include_process: bool = True) -> RankTable:
    """Full aggregation: z-score, category sums, partial and final ranks."""
    if len(records) < 2:
        raise InputError("need at least 2 candidates")
    ids = [r.candidate_id for r in records]
    if len(set(ids)) != len(ids):
        raise InputError("duplicate candidate ids")

    pdpr = {
        "category1": rank(category_sum(records, 1)),
        "category2_i": rank(category_sum(records, 2, "with_ipcc")),
        "category2_ii": rank(category_sum(records, 2, "without_ipcc")),
        "category3": rank(category_sum(records, 3)),
        "category4": rank(category_sum(records, 4)),
    }
    pspr1 = pspr2 = None
    if include_process:
        pspr1 = rank([r.process["wall_seconds"] for r in records])
        pspr2 = rank([r.process["n_free_parameters"] for r in records])
    combined = combine_partial_ranks(
        pdpr["category1"], pdpr["category2_i"], pdpr["category2_ii"],
        pdpr["category3"], pdpr["category4"], pspr1, pspr2)
    return RankTable(candidate_ids=ids, pdpr=pdpr, pspr1=pspr1, pspr2=pspr2,
                     **combined)


def srcc(ranks_a, ranks_b) -> float:
    """Tie-corrected Spearman correlation: Pearson on fractional ranks."""
    a = np.asarray(ranks_a, dtype=np.float64)
    b = np.asarray(ranks_b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise InputError("rank vectors must be 1-D and equal length")
    if a.size < 2:
        raise InputError("need at least 2 ranks")
    fa = _fractional_ranks(a)
    fb = _fractional_ranks(b)
    da, db = fa - fa.mean(), fb - fb.mean()
    denom = math.sqrt(np.sum(da**2) * np.sum(db**2))
    if denom == 0.0:
        raise DegeneracyError("zero rank variance")
    return float(np.sum(da * db) / denom)


def _fractional_ranks(x: np.ndarray) -> np.ndarray:
    """Average (fractional) ranks, ties sharing their mean position."""
    order = np.argsort(x, kind="stable")
    ranks = np.empty(x.size, dtype=np.float64)
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def bin_subjective_scores(scores, n_bins: int = 7,
                          dual_fraction: float = 0.10) -> list[str]:
    """Winner-take-all letter labels from a candidates x subjects score
    matrix (lower scores better).

    Each subject's scores are standardized across candidates, the pooled
    standardized range is split into n_bins equal-width bins labeled from
    'A', and each candidate is labeled with its most populated bin. A
    runner-up bin within dual_fraction of the winner count yields a dual
    label ordered best-first.
    """
    m = np.asarray(scores, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] < 2:
        raise InputError("need a candidates x subjects matrix, >= 2 subjects")
    z = np.column_stack([zscore(m[:, s]) for s in range(m.shape[1])])
    lo, hi = z.min(), z.max()
    if hi == lo:
        raise DegeneracyError("degenerate score distribution")
    edges = np.linspace(lo, hi, n_bins + 1)
    labels = []
    for c in range(m.shape[0]):
        idx = np.clip(np.searchsorted(edges, z[c], side="right") - 1,
                      0, n_bins - 1)
        counts = np.bincount(idx, minlength=n_bins)
        labels.append(winner_label(counts, dual_fraction))
    return labels


def winner_label(counts, dual_fraction: float = 0.10) -> str:
    """Letter of the most populated bin; runner-up within dual_fraction of
    the winner count gives a dual label like "B/C", best-first."""
    counts = np.asarray(counts)
    order = np.argsort(-counts, kind="stable")
    best, second = int(order[0]), int(order[1])
    if counts[second] > counts[best] * (1.0 - dual_fraction):
        lo_bin, hi_bin = sorted((best, second))
        return f"{chr(ord('A') + lo_bin)}/{chr(ord('A') + hi_bin)}"
    return chr(ord("A") + best)
