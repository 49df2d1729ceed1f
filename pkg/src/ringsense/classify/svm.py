"""Soft-margin SVM with an RBF kernel, solved by SMO.

The dual is ``min 0.5 a'Qa - sum(a)`` subject to ``0 <= a <= C`` and
``y'a = 0`` with ``Q_ij = y_i y_j k(x_i, x_j)``.  Each step updates the
maximal violating pair (the largest gap between ``-y G`` over the "up" and
"low" index sets) analytically and stops once that gap is at most ``tol``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numba
import numpy as np

from ..errors import PreconditionError, TrainingError
from .dataset import require_both_classes

log = logging.getLogger(__name__)

DEFAULT_C_GRID = tuple(10.0 ** np.arange(-2, 4))
DEFAULT_GAMMA_GRID = tuple(10.0 ** np.arange(-3, 3))
MAX_ITER = 100_000
KKT_TOL = 1e-3
_TAU = 1e-12


@dataclass(frozen=True)
class SvmRbfModel:
    support_vectors: np.ndarray
    dual_coef: np.ndarray  # alpha_i * y_i
    bias: float
    gamma: float
    C: float
    iterations: int = 0

    def __post_init__(self):
        sv = np.atleast_2d(np.asarray(self.support_vectors, dtype=float))
        coef = np.asarray(self.dual_coef, dtype=float).ravel()
        if len(sv) != len(coef) or len(sv) == 0:
            raise PreconditionError("model needs at least one support vector with a coefficient")
        if not (self.gamma > 0 and self.C > 0):
            raise PreconditionError("gamma and C must be positive")
        object.__setattr__(self, "support_vectors", sv)
        object.__setattr__(self, "dual_coef", coef)

    @property
    def alphas(self) -> np.ndarray:
        return np.abs(self.dual_coef)

    @property
    def sv_labels(self) -> np.ndarray:
        return (self.dual_coef > 0).astype(int)


def sq_distances(a, b) -> np.ndarray:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    d = (a * a).sum(1)[:, None] + (b * b).sum(1)[None, :] - 2.0 * a @ b.T
    return np.maximum(d, 0.0)


def rbf_kernel(a, b, gamma: float) -> np.ndarray:
    return np.exp(-gamma * sq_distances(a, b))


@numba.njit(cache=True)
def _smo(K, y, C, tol, max_iter):
    n = K.shape[0]
    a = np.zeros(n)
    G = -np.ones(n)
    it = 0
    gap = np.inf
    while it < max_iter:
        # maximal violating pair
        i = -1
        j = -1
        g_max = -np.inf
        g_min = np.inf
        for t in range(n):
            v = -y[t] * G[t]
            up = (y[t] > 0 and a[t] < C) or (y[t] < 0 and a[t] > 0)
            low = (y[t] > 0 and a[t] > 0) or (y[t] < 0 and a[t] < C)
            if up and v > g_max:
                g_max = v
                i = t
            if low and v < g_min:
                g_min = v
                j = t
        gap = g_max - g_min
        if gap <= tol or i < 0 or j < 0:
            break
        it += 1
        qii = K[i, i]
        qjj = K[j, j]
        qij = y[i] * y[j] * K[i, j]
        ai_old = a[i]
        aj_old = a[j]
        if y[i] != y[j]:
            quad = qii + qjj + 2.0 * qij
            if quad <= 0:
                quad = 1e-12
            delta = (-G[i] - G[j]) / quad
            diff = a[i] - a[j]
            a[i] += delta
            a[j] += delta
            if diff > 0:
                if a[j] < 0:
                    a[j] = 0.0
                    a[i] = diff
            else:
                if a[i] < 0:
                    a[i] = 0.0
                    a[j] = -diff
            if diff > 0:
                if a[i] > C:
                    a[i] = C
                    a[j] = C - diff
            else:
                if a[j] > C:
                    a[j] = C
                    a[i] = C + diff
        else:
            quad = qii + qjj - 2.0 * qij
            if quad <= 0:
                quad = 1e-12
            delta = (G[i] - G[j]) / quad
            s = a[i] + a[j]
            a[i] -= delta
            a[j] += delta
            if s > C:
                if a[i] > C:
                    a[i] = C
                    a[j] = s - C
            else:
                if a[j] < 0:
                    a[j] = 0.0
                    a[i] = s
            if s > C:
                if a[j] > C:
                    a[j] = C
                    a[i] = s - C
            else:
                if a[i] < 0:
                    a[i] = 0.0
                    a[j] = s
        dai = a[i] - ai_old
        daj = a[j] - aj_old
        for t in range(n):
            G[t] += y[t] * (y[i] * K[t, i] * dai + y[j] * K[t, j] * daj)
    # bias from free vectors, else the midpoint of the feasible interval
    total = 0.0
    nfree = 0
    ub = np.inf
    lb = -np.inf
    for t in range(n):
        yg = y[t] * G[t]
        if 0 < a[t] < C:
            total += yg
            nfree += 1
        elif (a[t] == 0 and y[t] > 0) or (a[t] == C and y[t] < 0):
            ub = min(ub, yg)
        else:
            lb = max(lb, yg)
    if nfree > 0:
        rho = total / nfree
    else:
        rho = 0.5 * (ub + lb)
    return a, -rho, it, gap


def solve_dual(K, labels, C: float, tol: float = KKT_TOL, max_iter: int = MAX_ITER):
    """Run SMO on a precomputed kernel.  Returns ``(alpha, bias, iterations)``."""
    y = np.where(np.asarray(labels).astype(int) == 1, 1.0, -1.0)
    K = np.ascontiguousarray(K, dtype=float)
    alpha, bias, it, gap = _smo(K, y, float(C), float(tol), int(max_iter))
    if gap > tol:
        raise TrainingError(
            f"SMO did not converge in {it} iterations (gap {gap:.3g})",
            diagnostics={"iterations": int(it), "gap": float(gap), "alpha": alpha, "bias": float(bias)})
    return alpha, float(bias), int(it)


def dual_objective(alpha, K, labels) -> float:
    y = np.where(np.asarray(labels).astype(int) == 1, 1.0, -1.0)
    ay = np.asarray(alpha) * y
    return float(0.5 * ay @ K @ ay - np.sum(alpha))


def _fit_kernel(K, x, labels, C, gamma) -> SvmRbfModel:
    alpha, bias, it = solve_dual(K, labels, C)
    sv = alpha > 0
    if not sv.any():
        raise TrainingError("no support vectors", diagnostics={"iterations": it})
    y = np.where(np.asarray(labels)[sv] == 1, 1.0, -1.0)
    return SvmRbfModel(x[sv], alpha[sv] * y, bias, float(gamma), float(C), it)


def train_svm_rbf(points, labels, C: float = 1.0, gamma: float = 1.0) -> SvmRbfModel:
    x = np.atleast_2d(np.asarray(points, dtype=float))
    labels = np.asarray(labels).astype(int)
    require_both_classes(labels)
    if not (C > 0 and gamma > 0):
        raise PreconditionError("C and gamma must be positive")
    return _fit_kernel(rbf_kernel(x, x, gamma), x, labels, C, gamma)


def decision_function(model: SvmRbfModel, queries) -> np.ndarray:
    k = rbf_kernel(queries, model.support_vectors, model.gamma)
    return k @ model.dual_coef + model.bias


def predict_svm(model: SvmRbfModel, queries) -> np.ndarray:
    return (decision_function(model, queries) >= 0).astype(int)


def classify_svm(model: SvmRbfModel, query) -> tuple:
    """``(label, decision value)`` for one query; zero counts as positive."""
    f = float(decision_function(model, np.asarray(query, dtype=float)[None, :])[0])
    return int(f >= 0), f


def stratified_folds(labels, folds: int) -> np.ndarray:
    """Fold index per row, dealt round-robin within each class in row order."""
    labels = np.asarray(labels).astype(int)
    out = np.empty(len(labels), dtype=int)
    for c in (0, 1):
        idx = np.flatnonzero(labels == c)
        out[idx] = np.arange(len(idx)) % folds
    return out


@dataclass(frozen=True)
class GridResult:
    C: float
    gamma: float
    model: SvmRbfModel
    scores: np.ndarray  # (len(c_grid), len(gamma_grid)), NaN for skipped cells


def grid_search_svm(points, labels, c_grid=DEFAULT_C_GRID, gamma_grid=DEFAULT_GAMMA_GRID,
                    folds: int | None = 3) -> GridResult:
    """Pick (C, gamma) by mean stratified k-fold accuracy, then refit on everything.

    ``folds=None`` scores each cell by training accuracy instead.  Ties go to
    the smaller C, then the smaller gamma.
    """
    x = np.atleast_2d(np.asarray(points, dtype=float))
    labels = np.asarray(labels).astype(int)
    require_both_classes(labels)
    c_grid = np.asarray(c_grid, dtype=float)
    gamma_grid = np.asarray(gamma_grid, dtype=float)
    if c_grid.size == 0 or gamma_grid.size == 0:
        raise PreconditionError("empty hyperparameter grid")
    d2 = sq_distances(x, x)
    if folds is not None:
        fold = stratified_folds(labels, folds)
        splits = [(fold != f, fold == f) for f in range(folds)]
    else:
        splits = [(np.ones(len(x), bool), np.ones(len(x), bool))]
    scores = np.full((len(c_grid), len(gamma_grid)), np.nan)
    for gi, gamma in enumerate(np.sort(gamma_grid)):
        K = np.exp(-gamma * d2)
        for ci, C in enumerate(np.sort(c_grid)):
            accs = []
            try:
                for tr, te in splits:
                    ytr = labels[tr]
                    require_both_classes(ytr)
                    alpha, bias, _ = solve_dual(K[np.ix_(tr, tr)], ytr, C)
                    coef = alpha * np.where(ytr == 1, 1.0, -1.0)
                    f = K[np.ix_(te, tr)] @ coef + bias
                    accs.append(np.mean((f >= 0).astype(int) == labels[te]))
            except (TrainingError, PreconditionError) as err:
                log.warning("skipping grid cell C=%g gamma=%g: %s", C, gamma, err)
                continue
            scores[ci, gi] = np.mean(accs)
    if np.all(np.isnan(scores)):
        raise TrainingError("every grid cell failed", diagnostics={"scores": scores})
    # row-major scan of sorted grids gives the C-then-gamma tie order
    best = int(np.nanargmax(scores))
    ci, gi = np.unravel_index(best, scores.shape)
    C, gamma = float(np.sort(c_grid)[ci]), float(np.sort(gamma_grid)[gi])
    model = _fit_kernel(np.exp(-gamma * d2), x, labels, C, gamma)
    return GridResult(C, gamma, model, scores)
