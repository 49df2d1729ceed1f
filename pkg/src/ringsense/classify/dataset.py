"""Labelled feature sets.  Label 1 is a concealed object, 0 is clear."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import PreconditionError, ShapeError
from ..features import FEATURE_NAMES

POSITIVE = 1
NEGATIVE = 0


@dataclass(frozen=True)
class LabeledDataset:
    features: np.ndarray  # (n, 11) raw, un-normalised
    labels: np.ndarray
    source_id: tuple = ()

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.features, dtype=float))
        y = np.asarray(self.labels).astype(int).ravel()
        if x.shape[1] != len(FEATURE_NAMES):
            raise ShapeError(f"expected {len(FEATURE_NAMES)} feature columns, got {x.shape[1]}")
        if len(x) != len(y):
            raise ShapeError("features and labels differ in length")
        if not np.isin(y, (NEGATIVE, POSITIVE)).all():
            raise PreconditionError("labels must be 0 or 1")
        src = tuple(str(s) for s in self.source_id) or tuple(f"row{i}" for i in range(len(y)))
        if len(src) != len(y):
            raise ShapeError("source_id length does not match the rows")
        object.__setattr__(self, "features", x)
        object.__setattr__(self, "labels", y)
        object.__setattr__(self, "source_id", src)

    def __len__(self):
        return len(self.labels)

    def subset(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx)
        return LabeledDataset(self.features[idx], self.labels[idx],
                              tuple(self.source_id[i] for i in np.arange(len(self))[idx]))

    def class_counts(self) -> tuple:
        pos = int(self.labels.sum())
        return len(self) - pos, pos


def require_both_classes(labels):
    labels = np.asarray(labels)
    if not (np.any(labels == POSITIVE) and np.any(labels == NEGATIVE)):
        raise PreconditionError("training data must contain both classes")
