"""Brute-force K-nearest neighbours in the normalised 11-feature space."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, PreconditionError

K_CHOICES = (7, 9, 11, 13, 15)


@dataclass(frozen=True)
class KnnModel:
    points: np.ndarray
    labels: np.ndarray
    k: int = 11

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        lab = np.asarray(self.labels).astype(int).ravel()
        if len(pts) != len(lab):
            raise PreconditionError("points and labels differ in length")
        if self.k < 1:
            raise ConfigError("k must be at least 1")
        if self.k > len(pts):
            raise ConfigError(f"k={self.k} exceeds the {len(pts)} training points")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "labels", lab)


def train_knn(points, labels, k: int = 11) -> KnnModel:
    return KnnModel(points, labels, k)


def neighbours(model: KnnModel, queries) -> np.ndarray:
    """Indices of the k nearest training points per query; equal distances keep index order."""
    q = np.atleast_2d(np.asarray(queries, dtype=float))
    d2 = ((q[:, None, :] - model.points[None, :, :]) ** 2).sum(axis=2)
    return np.argsort(d2, axis=1, kind="stable")[:, :model.k]


def knn_scores(model: KnnModel, queries) -> np.ndarray:
    """Fraction of positive neighbours, used as the decision value."""
    return model.labels[neighbours(model, queries)].mean(axis=1)


def predict_knn(model: KnnModel, queries) -> np.ndarray:
    # an even-k tie falls to the positive class
    return (knn_scores(model, queries) >= 0.5).astype(int)


def classify_knn(model: KnnModel, query) -> int:
    return int(predict_knn(model, np.asarray(query, dtype=float)[None, :])[0])
