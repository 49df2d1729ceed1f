"""Classifier models as plain dictionaries for JSON storage."""

from __future__ import annotations

import numpy as np

from ..errors import SchemaError
from ..features import Normalizer
from .knn import KnnModel
from .svm import SvmRbfModel
from .threshold import ThresholdModel

MODEL_TAG = "RSMODEL1"


def model_to_dict(model, norm: Normalizer | None = None) -> dict:
    if isinstance(model, ThresholdModel):
        body = {"kind": "thr", "threshold": model.threshold, "polarity": model.polarity,
                "train_balanced_accuracy": model.train_balanced_accuracy}
    elif isinstance(model, KnnModel):
        body = {"kind": "knn", "k": model.k, "points": model.points.tolist(),
                "labels": model.labels.tolist()}
    elif isinstance(model, SvmRbfModel):
        body = {"kind": "svm", "C": model.C, "gamma": model.gamma, "bias": model.bias,
                "support_vectors": model.support_vectors.tolist(),
                "dual_coef": model.dual_coef.tolist(), "iterations": model.iterations}
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    out = {"format": MODEL_TAG, **body}
    if norm is not None:
        out["normalizer"] = norm.to_dict()
    return out


def model_from_dict(d: dict) -> tuple:
    """Return ``(model, normalizer or None)``."""
    if d.get("format") != MODEL_TAG:
        raise SchemaError(f"expected model format {MODEL_TAG!r}", column="format")
    try:
        kind = d["kind"]
        if kind == "thr":
            tba = d.get("train_balanced_accuracy")
            model = ThresholdModel(float(d["threshold"]), int(d["polarity"]),
                                   float("nan") if tba is None else float(tba))
        elif kind == "knn":
            model = KnnModel(np.array(d["points"], dtype=float), np.array(d["labels"]), int(d["k"]))
        elif kind == "svm":
            model = SvmRbfModel(np.array(d["support_vectors"], dtype=float),
                                np.array(d["dual_coef"], dtype=float), float(d["bias"]),
                                float(d["gamma"]), float(d["C"]), int(d.get("iterations", 0)))
        else:
            raise SchemaError(f"unknown model kind {kind!r}", column="kind")
    except KeyError as err:
        raise SchemaError(f"model lacks field {err.args[0]}", column=err.args[0]) from err
    norm = Normalizer.from_dict(d["normalizer"]) if "normalizer" in d else None
    return model, norm
