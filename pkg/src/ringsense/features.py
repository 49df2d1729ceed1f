"""Arithmetic ring features and min-max normalisation.

Eleven statistics are taken over the sample magnitudes ``|S_k|`` of a ring
measurement.  The minimum enters four of the differences but is not itself a
feature.  After min-max scaling against a training set, the L2 norm of the
eleven scaled values gives the scalar ``magnitude`` feature.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError

log = logging.getLogger(__name__)

FEATURE_NAMES = (
    "mean",
    "median",
    "max",
    "std",
    "var",
    "max_minus_min",
    "max_minus_mean",
    "max_minus_median",
    "mean_minus_min",
    "median_minus_min",
    "median_minus_mean",
)


@dataclass(frozen=True)
class FeatureVector:
    mean: float
    median: float
    max: float
    std: float
    var: float
    max_minus_min: float
    max_minus_mean: float
    max_minus_median: float
    mean_minus_min: float
    median_minus_min: float
    median_minus_mean: float
    magnitude: float | None = None

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURE_NAMES])

    @classmethod
    def from_array(cls, values, magnitude=None) -> "FeatureVector":
        values = np.asarray(values, dtype=float)
        if values.shape != (len(FEATURE_NAMES),):
            raise PreconditionError(f"expected {len(FEATURE_NAMES)} features, got {values.shape}")
        return cls(*map(float, values), magnitude=None if magnitude is None else float(magnitude))


def feature_matrix(magnitudes: np.ndarray) -> np.ndarray:
    """Features for each row of a (n_measurements, n_samples) magnitude array."""
    x = np.asarray(magnitudes, dtype=float)
    if x.ndim != 2 or x.shape[1] < 2:
        raise PreconditionError("need at least 2 samples per measurement")
    median = np.median(x, axis=1)
    mx = x.max(axis=1)
    mn = x.min(axis=1)
    # summation rounding can push the mean of a flat ring just outside [min, max]
    mean = np.clip(x.mean(axis=1), mn, mx)
    var = ((x - mean[:, None]) ** 2).mean(axis=1)
    std = np.sqrt(var)
    return np.column_stack([
        mean, median, mx, std, var,
        mx - mn, mx - mean, mx - median, mean - mn, median - mn, median - mean,
    ])


def extract(samples) -> FeatureVector:
    """Features of one ring measurement (a RingSampleSet or a magnitude array)."""
    mags = samples.magnitudes if hasattr(samples, "magnitudes") else np.abs(np.asarray(samples))
    mags = np.asarray(mags, dtype=float).ravel()
    if mags.size < 2:
        raise PreconditionError(f"need at least 2 samples, got {mags.size}")
    if not np.all(np.isfinite(mags)):
        raise PreconditionError("samples contain non-finite values")
    return FeatureVector.from_array(feature_matrix(mags[None, :])[0])


@dataclass(frozen=True)
class Normalizer:
    mins: np.ndarray
    maxs: np.ndarray

    def __post_init__(self):
        if np.any(self.maxs < self.mins):
            raise PreconditionError("normalizer max below min")

    @property
    def degenerate(self) -> np.ndarray:
        return self.maxs == self.mins

    def transform(self, x: np.ndarray) -> np.ndarray:
        """Scale raw feature rows; degenerate features map to 0."""
        x = np.asarray(x, dtype=float)
        span = self.maxs - self.mins
        safe = np.where(span > 0, span, 1.0)
        out = (x - self.mins) / safe
        return np.where(span > 0, out, 0.0)

    def to_dict(self) -> dict:
        return {"mins": self.mins.tolist(), "maxs": self.maxs.tolist()}

    @classmethod
    def from_dict(cls, d) -> "Normalizer":
        return cls(np.asarray(d["mins"], dtype=float), np.asarray(d["maxs"], dtype=float))


def fit_normalizer(train) -> Normalizer:
    """Per-feature min/max over training vectors (FeatureVectors or a 2-D array)."""
    x = _as_matrix(train)
    if len(x) < 2:
        raise PreconditionError("need at least 2 training vectors")
    norm = Normalizer(x.min(axis=0), x.max(axis=0))
    if norm.degenerate.any():
        names = [n for n, d in zip(FEATURE_NAMES, norm.degenerate) if d]
        log.warning("degenerate features map to 0: %s", ", ".join(names))
    return norm


def apply(norm: Normalizer, fv: FeatureVector) -> FeatureVector:
    scaled = norm.transform(fv.as_array())
    return FeatureVector.from_array(scaled, magnitude=float(np.linalg.norm(scaled)))


def magnitude(scaled: np.ndarray) -> np.ndarray:
    return np.linalg.norm(np.atleast_2d(scaled), axis=1)


def _as_matrix(rows) -> np.ndarray:
    if isinstance(rows, np.ndarray):
        return np.atleast_2d(rows.astype(float))
    return np.array([r.as_array() for r in rows])

