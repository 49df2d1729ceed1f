"""Confusion counts and the four detection metrics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import PreconditionError

METRIC_NAMES = ("tpr", "fpr", "acc", "f1")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        vals = (self.tp, self.fp, self.tn, self.fn)
        if any(int(v) != v or v < 0 for v in vals):
            raise PreconditionError("confusion counts must be non-negative integers")
        if sum(vals) < 1:
            raise PreconditionError("confusion counts are all zero")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MetricSet:
    """Detection metrics; NaN marks a metric whose denominator is zero."""

    tpr: float
    fpr: float
    acc: float
    f1: float

    def as_array(self) -> np.ndarray:
        return np.array([self.tpr, self.fpr, self.acc, self.f1])


def _ratio(num, den) -> float:
    return num / den if den > 0 else float("nan")


def metrics(c: ConfusionCounts) -> MetricSet:
    return MetricSet(
        tpr=_ratio(c.tp, c.tp + c.fn),
        fpr=_ratio(c.fp, c.fp + c.tn),
        acc=(c.tp + c.tn) / c.total,
        f1=_ratio(2 * c.tp, 2 * c.tp + c.fn + c.fp),
    )


def confusion(y_true, y_pred) -> ConfusionCounts:
    t = np.asarray(y_true).astype(bool)
    p = np.asarray(y_pred).astype(bool)
    if t.shape != p.shape:
        raise PreconditionError("label arrays differ in shape")
    return ConfusionCounts(int(np.sum(t & p)), int(np.sum(~t & p)),
                           int(np.sum(~t & ~p)), int(np.sum(t & ~p)))
