"""ROC sweeps and Gaussian sigma ellipses for clouds of operating points."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import PreconditionError


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray  # score >= threshold is called positive; first entry is +inf


def roc_sweep(scores, labels) -> RocCurve:
    """Operating points for every distinct decision value, from strictest to loosest."""
    s = np.asarray(scores, dtype=float).ravel()
    y = np.asarray(labels).astype(int).ravel()
    if s.shape != y.shape or s.size == 0:
        raise PreconditionError("scores and labels must be equal, non-empty vectors")
    n_pos = int(y.sum())
    n_neg = len(y) - n_pos
    thr = np.unique(s)[::-1]
    # positives and negatives with score >= each threshold
    order = np.sort(s[y == 1])
    tp = n_pos - np.searchsorted(order, thr, side="left")
    order = np.sort(s[y == 0])
    fp = n_neg - np.searchsorted(order, thr, side="left")
    tpr = np.concatenate([[0.0], tp / n_pos if n_pos else np.full(len(thr), np.nan)])
    fpr = np.concatenate([[0.0], fp / n_neg if n_neg else np.full(len(thr), np.nan)])
    return RocCurve(fpr, tpr, np.concatenate([[np.inf], thr]))


def auc(curve: RocCurve) -> float:
    return float(np.trapezoid(curve.tpr, curve.fpr))


@dataclass(frozen=True)
class SigmaContours:
    mean: np.ndarray
    cov: np.ndarray
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # columns
    degenerate: bool

    def axes(self, n: int) -> np.ndarray:
        """Semi-axis vectors (columns) of the n-sigma ellipse."""
        return self.eigenvectors * (n * np.sqrt(self.eigenvalues))

    def ellipse(self, n: int, points: int = 64) -> np.ndarray:
        t = np.linspace(0, 2 * np.pi, points, endpoint=False)
        circle = np.vstack([np.cos(t), np.sin(t)])
        return (self.mean[:, None] + self.axes(n) @ circle).T


def sigma_contours(points) -> SigmaContours:
    """Mean and population covariance of (FPR, TPR) pairs.

    A singular covariance (all points on a line or identical) is flagged as
    degenerate; its ellipses collapse to a segment or a point.
    """
    p = np.asarray(points, dtype=float)
    if p.ndim != 2 or p.shape[1] != 2 or len(p) < 2:
        raise PreconditionError("need at least two (fpr, tpr) points")
    mean = p.mean(axis=0)
    d = p - mean
    cov = d.T @ d / len(p)
    w, v = np.linalg.eigh(cov)
    w = np.clip(w, 0.0, None)
    scale = max(w.max(), np.finfo(float).tiny)
    return SigmaContours(mean, cov, w, v, bool(w.min() <= 1e-12 * scale))
