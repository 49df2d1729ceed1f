"""Repeated stratified train/test splits over a labelled feature set."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..classify.dataset import LabeledDataset
from ..classify.knn import predict_knn, train_knn
from ..classify.svm import DEFAULT_C_GRID, DEFAULT_GAMMA_GRID, grid_search_svm, predict_svm
from ..classify.threshold import predict_threshold, train_threshold
from ..errors import ConfigError, PreconditionError, RingsenseError
from ..features import fit_normalizer, magnitude
from .metrics import METRIC_NAMES, confusion, metrics


@dataclass(frozen=True)
class ClassifierSpec:
    """One classifier configuration.

    ``kind`` is ``thr``, ``knn``, ``svm`` or ``constant`` (always predicts
    ``k``).  ``n_votes`` groups consecutive same-class test responses for the
    threshold rule.
    """

    kind: str
    k: int = 11
    n_votes: int = 1
    c_grid: tuple = DEFAULT_C_GRID
    gamma_grid: tuple = DEFAULT_GAMMA_GRID
    folds: int | None = 3

    def __post_init__(self):
        if self.kind not in ("thr", "knn", "svm", "constant"):
            raise ConfigError(f"unknown classifier kind {self.kind!r}")

    @property
    def name(self) -> str:
        if self.kind == "knn":
            return f"knn{self.k}"
        if self.kind == "thr":
            return "thr" if self.n_votes == 1 else f"thr_n{self.n_votes}"
        if self.kind == "constant":
            return f"const{self.k}"
        return "svm"


DEFAULT_SPECS = (ClassifierSpec("thr"),) + tuple(ClassifierSpec("knn", k=k) for k in (7, 9, 11, 13, 15)) \
    + (ClassifierSpec("svm"),)


@dataclass(frozen=True)
class McReport:
    seed: int
    iters: int
    train_frac: float
    names: tuple
    per_iter: dict = field(repr=False)  # name -> (iters, 4) array of tpr, fpr, acc, f1

    def mean(self, name: str) -> dict:
        return dict(zip(METRIC_NAMES, np.nanmean(self.per_iter[name], axis=0)))

    def std(self, name: str) -> dict:
        m = self.per_iter[name]
        sd = np.nanstd(m, axis=0)
        # a constant column would otherwise pick up rounding noise from its mean
        flat = np.nanmax(m, axis=0) == np.nanmin(m, axis=0)
        return dict(zip(METRIC_NAMES, np.where(flat, 0.0, sd)))

    def points(self, name: str) -> np.ndarray:
        """Per-iteration (FPR, TPR) operating points."""
        m = self.per_iter[name]
        return np.column_stack([m[:, 1], m[:, 0]])


def split_indices(labels, train_frac: float, rng: np.random.Generator) -> tuple:
    """Stratified split: the same fraction of each class goes to training."""
    labels = np.asarray(labels)
    train, test = [], []
    for c in (0, 1):
        idx = rng.permutation(np.flatnonzero(labels == c))
        n_tr = int(round(train_frac * len(idx)))
        if n_tr < 1 or n_tr >= len(idx):
            raise PreconditionError(f"class {c} is too small for train_frac={train_frac}")
        train.append(idx[:n_tr])
        test.append(idx[n_tr:])
    return np.concatenate(train), np.concatenate(test)


def iteration_rng(seed: int, it: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(it)]))


def _grouped(labels, n_votes):
    """Per-class index groups of ``n_votes`` consecutive test rows."""
    out = []
    for c in (0, 1):
        idx = np.flatnonzero(labels == c)
        out += [idx[i:i + n_votes] for i in range(0, len(idx), n_votes)]
    return out


def evaluate_split(data: LabeledDataset, train, test, specs) -> dict:
    """Fit the normaliser and every classifier on ``train``; score on ``test``."""
    norm = fit_normalizer(data.features[train])
    ztr = norm.transform(data.features[train])
    zte = norm.transform(data.features[test])
    ytr, yte = data.labels[train], data.labels[test]
    out = {}
    for spec in specs:
        if spec.kind == "thr":
            model = train_threshold(magnitude(ztr), ytr)
            mag = magnitude(zte)
            groups = _grouped(yte, spec.n_votes)
            truth = np.array([yte[g[0]] for g in groups])
            pred = np.concatenate([predict_threshold(model, mag[g], len(g)) for g in groups])
        elif spec.kind == "knn":
            truth, pred = yte, predict_knn(train_knn(ztr, ytr, spec.k), zte)
        elif spec.kind == "svm":
            res = grid_search_svm(ztr, ytr, spec.c_grid, spec.gamma_grid, spec.folds)
            truth, pred = yte, predict_svm(res.model, zte)
        else:
            truth, pred = yte, np.full(len(yte), spec.k)
        out[spec.name] = metrics(confusion(truth, pred)).as_array()
    return out


def monte_carlo(data: LabeledDataset, specs=DEFAULT_SPECS, iters: int = 500,
                train_frac: float = 0.7, seed: int = 0) -> McReport:
    """Average test metrics over ``iters`` seeded stratified splits.

    Iteration ``i`` draws its split from ``SeedSequence([seed, i])`` so any
    subset of iterations can be recomputed on its own.
    """
    if not 0 < train_frac < 1:
        raise PreconditionError("train_frac must lie in (0, 1)")
    if iters < 1:
        raise PreconditionError("iters must be >= 1")
    n_neg, n_pos = data.class_counts()
    if n_neg != n_pos:
        raise PreconditionError(f"dataset is not class-balanced ({n_neg} vs {n_pos})")
    specs = tuple(specs)
    names = tuple(s.name for s in specs)
    if len(set(names)) != len(names):
        raise ConfigError("duplicate classifier names")
    per_iter = {n: np.empty((iters, len(METRIC_NAMES))) for n in names}
    for it in range(iters):
        train, test = split_indices(data.labels, train_frac, iteration_rng(seed, it))
        try:
            res = evaluate_split(data, train, test, specs)
        except RingsenseError as err:
            err.iteration = it
            err.args = (f"Monte Carlo iteration {it}: {err}",) + err.args[1:]
            raise
        for n in names:
            per_iter[n][it] = res[n]
    return McReport(int(seed), int(iters), float(train_frac), names, per_iter)
