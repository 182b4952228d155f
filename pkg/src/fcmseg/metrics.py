"""Segmentation quality metrics: Dice overlap and cluster matching."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError
from .types import LabelMap


@dataclass(frozen=True)
class BinaryMask:
    """Flat boolean raster marking one tissue class."""

    width: int
    height: int
    bits: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("mask dimensions must be at least 1x1")
        bits = np.ascontiguousarray(self.bits, dtype=bool)
        if bits.ndim != 1 or bits.shape[0] != self.width * self.height:
            raise ValueError("bit buffer length must equal width*height")
        object.__setattr__(self, "bits", bits)

    @property
    def count(self) -> int:
        return int(self.bits.sum())


@dataclass(frozen=True)
class DscReport:
    """Per-class Dice similarity values, each in [0, 1]."""

    per_class: dict

    def __post_init__(self):
        for name, value in self.per_class.items():
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"DSC for {name!r} is {value}, outside [0, 1]")


def dsc(pr: BinaryMask, gt: BinaryMask) -> float:
    """Dice similarity 2|PR ∩ GT| / (|PR| + |GT|).

    Two empty masks agree perfectly and score 1.0; empty versus non-empty
    scores 0.0.
    """
    if (pr.width, pr.height) != (gt.width, gt.height):
        raise DimensionMismatchError(
            f"masks are {pr.width}x{pr.height} and {gt.width}x{gt.height}"
        )
    a = pr.count
    b = gt.count
    if a + b == 0:
        return 1.0
    inter = int(np.logical_and(pr.bits, gt.bits).sum())
    return 2.0 * inter / (a + b)


def mask_for_class(labels: LabelMap, j: int) -> BinaryMask:
    """Binary mask of the pixels assigned to cluster j."""
    if not 0 <= j < labels.c:
        raise IndexError(f"cluster index {j} out of range [0, {labels.c})")
    return BinaryMask(labels.width, labels.height, labels.labels == j)


def match_clusters(pred: LabelMap, ref: LabelMap, c: int) -> tuple:
    """Permutation aligning predicted cluster indices to reference classes.

    Greedy on the c x c confusion matrix: repeatedly take the unassigned
    (pred, ref) pair with the largest overlap, ties resolved toward the
    lowest pair of indices. Returns perm with perm[p] = r meaning
    predicted cluster p plays the role of reference class r.
    """
    if (pred.width, pred.height) != (ref.width, ref.height):
        raise DimensionMismatchError(
            f"label maps are {pred.width}x{pred.height} and {ref.width}x{ref.height}"
        )
    if pred.c > c or ref.c > c:
        raise DimensionMismatchError(f"label maps use more than {c} clusters")
    conf = np.bincount(
        pred.labels.astype(np.int64) * c + ref.labels.astype(np.int64),
        minlength=c * c,
    ).reshape(c, c)
    work = conf.copy()
    perm = [-1] * c
    for _ in range(c):
        flat = int(np.argmax(work))
        p, r = divmod(flat, c)
        perm[p] = r
        work[p, :] = -1
        work[:, r] = -1
    return tuple(perm)
