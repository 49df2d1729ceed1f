"""Single-threshold rule on the feature magnitude, with N-response voting."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import PreconditionError
from .dataset import require_both_classes

MAX_VOTES = 7


@dataclass(frozen=True)
class ThresholdModel:
    threshold: float
    polarity: int = 1  # +1: above is positive, -1: below is positive
    train_balanced_accuracy: float = float("nan")

    def __post_init__(self):
        if not np.isfinite(self.threshold):
            raise PreconditionError("threshold must be finite")
        if self.polarity not in (1, -1):
            raise PreconditionError("polarity must be +1 or -1")


def train_threshold(magnitudes, labels) -> ThresholdModel:
    """Scan midpoints between sorted distinct magnitudes for the best balanced accuracy.

    Both polarities are tried at every midpoint; ties keep the smaller
    threshold, then positive polarity.
    """
    x = np.asarray(magnitudes, dtype=float).ravel()
    y = np.asarray(labels).astype(int).ravel()
    require_both_classes(y)
    vals = np.unique(x)
    if len(vals) == 1:
        return ThresholdModel(float(vals[0]), 1, 0.5)
    cands = (vals[:-1] + vals[1:]) / 2
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    # counts of each class at or below every candidate
    pos_sorted = np.sort(x[y == 1])
    neg_sorted = np.sort(x[y == 0])
    pos_below = np.searchsorted(pos_sorted, cands, side="right")
    neg_below = np.searchsorted(neg_sorted, cands, side="right")
    ba_up = 0.5 * ((n_pos - pos_below) / n_pos + neg_below / n_neg)
    ba_down = 0.5 * (pos_below / n_pos + (n_neg - neg_below) / n_neg)
    best = max(ba_up.max(), ba_down.max())
    # first index reaching the best value is the smallest threshold
    i_up = np.flatnonzero(ba_up == best)
    i_down = np.flatnonzero(ba_down == best)
    if i_up.size and (not i_down.size or i_up[0] <= i_down[0]):
        return ThresholdModel(float(cands[i_up[0]]), 1, float(best))
    return ThresholdModel(float(cands[i_down[0]]), -1, float(best))


def threshold_votes(model: ThresholdModel, magnitudes) -> np.ndarray:
    """Per-response positive votes."""
    x = np.asarray(magnitudes, dtype=float)
    return x > model.threshold if model.polarity == 1 else x < model.threshold


def classify_threshold(model: ThresholdModel, magnitudes) -> int:
    """Majority over up to seven consecutive responses; an exact tie is positive."""
    x = np.atleast_1d(np.asarray(magnitudes, dtype=float))
    if x.size == 0:
        raise PreconditionError("need at least one response")
    if x.size > MAX_VOTES:
        raise PreconditionError(f"at most {MAX_VOTES} consecutive responses")
    pos = int(threshold_votes(model, x).sum())
    return int(2 * pos >= x.size)


def predict_threshold(model: ThresholdModel, magnitudes, n_votes: int = 1) -> np.ndarray:
    """Labels for consecutive groups of ``n_votes`` responses (a trailing partial group votes too)."""
    x = np.asarray(magnitudes, dtype=float).ravel()
    if not 1 <= n_votes <= MAX_VOTES:
        raise PreconditionError(f"n_votes must lie in [1, {MAX_VOTES}]")
    return np.array([classify_threshold(model, x[i:i + n_votes])
                     for i in range(0, len(x), n_votes)], dtype=int)
