"""Reference spectral quantizer and label-map contour measures.

The quantizer is a deliberately simple stand-in for a prior-knowledge
rule base: a context-free per-pixel threshold code on calibrated
reflectance, delivered at three nested quantization levels (fine,
intermediate, coarse) linked by explicit merge tables. Any labeler with
the same interface can replace it.

Downstream measures: post-classification change counting, the three-level
8-adjacency cross-aura contour intensity (0..24), and the binarized
contour difference.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .raster import MultibandImage

# per-band reflectance thresholds for the fine 4-bin code
_FINE_THRESHOLDS = (0.25, 0.5, 0.75)
# bands entering the product code; 4^3 = 64 fine labels
_CODE_BANDS = 3

LEVELS = ("fine", "intermediate", "coarse")


@dataclass
class LabelMapStack:
    """Co-registered label planes at three quantization levels."""

    fine: np.ndarray
    intermediate: np.ndarray
    coarse: np.ndarray
    level_counts: tuple[int, int, int]
    merge_fine_to_intermediate: np.ndarray
    merge_intermediate_to_coarse: np.ndarray

    def __post_init__(self):
        if not (self.fine.shape == self.intermediate.shape
                == self.coarse.shape):
            raise InputError("label planes must share dimensions")
        if not (self.level_counts[0] > self.level_counts[1]
                > self.level_counts[2]):
            raise InputError("level counts must strictly decrease")

    def level(self, name: str) -> np.ndarray:
        if name not in LEVELS:
            raise InputError(f"unknown level {name!r}")
        return getattr(self, name)

    @property
    def shape(self) -> tuple[int, int]:
        return self.fine.shape


def quantize_spectral(img: MultibandImage) -> LabelMapStack:
    """Context-free per-pixel labeling of a reflectance image (B >= 3).

    Fine: base-4 product code over per-band thresholds on the first three
    bands. Intermediate: the same code with bins merged pairwise (base-2).
    Coarse: the first band's 2-bin digit alone.
    """
    if img.bands < _CODE_BANDS:
        raise InputError("quantizer needs at least 3 bands")
    s = img.samples
    if s.min() < -0.01 or s.max() > 1.5:
        raise InputError("samples outside plausible reflectance range")
    s = np.clip(s, 0.0, 1.0)

    digits = np.zeros(s.shape[:2] + (_CODE_BANDS,), dtype=np.int64)
    for t in _FINE_THRESHOLDS:
        digits += (s[:, :, :_CODE_BANDS] > t).astype(np.int64)

    fine = np.zeros(s.shape[:2], dtype=np.int64)
    for b in range(_CODE_BANDS):
        fine = fine * 4 + digits[:, :, b]

    n_fine = 4**_CODE_BANDS
    # fine digit d in {0..3} merges to d // 2; base-2 code over merged digits
    inter_table = np.zeros(n_fine, dtype=np.int64)
    for code in range(n_fine):
        rem, val = code, 0
        for b in range(_CODE_BANDS):
            digit = rem // 4**(_CODE_BANDS - 1 - b)
            rem %= 4**(_CODE_BANDS - 1 - b)
            val = val * 2 + digit // 2
        inter_table[code] = val
    n_inter = 2**_CODE_BANDS
    # coarse keeps only the leading (first-band) bit
    coarse_table = np.arange(n_inter) // 2**(_CODE_BANDS - 1)

    intermediate = inter_table[fine]
    coarse = coarse_table[intermediate]
    return LabelMapStack(
        fine=fine, intermediate=intermediate, coarse=coarse,
        level_counts=(n_fine, n_inter, 2),
        merge_fine_to_intermediate=inter_table,
        merge_intermediate_to_coarse=coarse_table,
    )


def post_classification_change_count(stack_a: LabelMapStack,
                                     stack_b: LabelMapStack,
                                     level: str = "coarse") -> int:
    """Number of pixels whose labels differ at the chosen level."""
    if stack_a.shape != stack_b.shape:
        raise InputError("dimension mismatch")
    return int(np.count_nonzero(stack_a.level(level) != stack_b.level(level)))


def _aura_plane(labels: np.ndarray) -> np.ndarray:
    """Per-pixel count of existing 8-neighbors with a different label."""
    h, w = labels.shape
    count = np.zeros((h, w), dtype=np.int64)
    for dy in (-1, 0, 1):
        for dx in (-1, 0, 1):
            if dy == 0 and dx == 0:
                continue
            ys = slice(max(dy, 0), h + min(dy, 0))
            xs = slice(max(dx, 0), w + min(dx, 0))
            ysn = slice(max(-dy, 0), h + min(-dy, 0))
            xsn = slice(max(-dx, 0), w + min(-dx, 0))
            count[ys, xs] += labels[ys, xs] != labels[ysn, xsn]
    return count


def cross_aura(stack: LabelMapStack) -> tuple[np.ndarray, float]:
    """Three-level contour intensity plane in {0..24} and its mean."""
    h, w = stack.shape
    if h < 3 or w < 3:
        raise InputError("stack must be at least 3x3")
    plane = sum(_aura_plane(stack.level(name)) for name in LEVELS)
    return plane, float(plane.mean())


def binary_contour_cost(stack_a: LabelMapStack,
                        stack_b: LabelMapStack) -> float:
    """Mean absolute difference of the binarized contour planes."""
    if stack_a.shape != stack_b.shape:
        raise InputError("dimension mismatch")
    bin_a = cross_aura(stack_a)[0] > 0
    bin_b = cross_aura(stack_b)[0] > 0
    return float(np.mean(bin_a != bin_b))
