"""Threshold, nearest-neighbour and RBF-SVM classifiers."""

from .dataset import NEGATIVE, POSITIVE, LabeledDataset
from .knn import KnnModel, classify_knn, knn_scores, predict_knn, train_knn
from .serialize import model_from_dict, model_to_dict
from .svm import (SvmRbfModel, classify_svm, decision_function, grid_search_svm, predict_svm,
                  train_svm_rbf)
from .threshold import ThresholdModel, classify_threshold, predict_threshold, train_threshold

__all__ = [
    "LabeledDataset", "POSITIVE", "NEGATIVE",
    "ThresholdModel", "train_threshold", "classify_threshold", "predict_threshold",
    "KnnModel", "train_knn", "classify_knn", "predict_knn", "knn_scores",
    "SvmRbfModel", "train_svm_rbf", "grid_search_svm", "classify_svm", "predict_svm",
    "decision_function", "model_to_dict", "model_from_dict",
]
