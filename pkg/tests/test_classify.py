import json
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ringsense.classify import (KnnModel, LabeledDataset, SvmRbfModel, ThresholdModel,
                                classify_knn, classify_svm, classify_threshold, decision_function,
                                grid_search_svm, knn_scores, model_from_dict, model_to_dict,
                                predict_knn, predict_svm, predict_threshold, train_knn,
                                train_svm_rbf, train_threshold)
from ringsense.classify.svm import (DEFAULT_C_GRID, DEFAULT_GAMMA_GRID, dual_objective, rbf_kernel,
                                   solve_dual, stratified_folds)
from ringsense.errors import ConfigError, PreconditionError, ShapeError, TrainingError
from ringsense.features import fit_normalizer
from ringsense.formats import dump_json, load_json

from oracles import knn_label, svm_dual_exact


def kkt_violation(K, labels, alpha, bias, C):
    """Largest breach of the soft-margin optimality conditions."""
    y = np.where(labels == 1, 1.0, -1.0)
    yf = y * (K @ (alpha * y) + bias)
    at_zero = alpha <= 1e-12
    at_c = alpha >= C - 1e-12
    free = ~at_zero & ~at_c
    worst = 0.0
    if at_zero.any():
        worst = max(worst, np.max(1 - yf[at_zero]))
    if at_c.any():
        worst = max(worst, np.max(yf[at_c] - 1))
    if free.any():
        worst = max(worst, np.max(np.abs(yf[free] - 1)))
    return worst


def blobs(seed, n=40, sep=2.0, dim=2):
    rng = np.random.default_rng(seed)
    x = np.vstack([rng.normal(0, 1, (n, dim)), rng.normal(sep, 1, (n, dim))])
    return x, np.repeat([0, 1], n)


# -- threshold ---------------------------------------------------------------

def test_threshold_separable_midpoint():
    m = train_threshold([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1])
    assert (m.threshold, m.polarity, m.train_balanced_accuracy) == (0.5, 1, 1.0)


def test_threshold_interleaved():
    m = train_threshold([0.1, 0.2, 0.3, 0.4], [0, 1, 0, 1])
    assert m.train_balanced_accuracy == 0.75
    assert m.threshold == pytest.approx(0.15)


def test_threshold_identical_distributions():
    m = train_threshold([1.0, 1.0, 1.0, 1.0], [0, 1, 0, 1])
    assert m.train_balanced_accuracy == 0.5
    m = train_threshold([1, 2, 1, 2], [0, 0, 1, 1])
    assert m.train_balanced_accuracy == 0.5


def test_threshold_negative_polarity():
    m = train_threshold([0.9, 0.8, 0.1, 0.2], [0, 0, 1, 1])
    assert m.polarity == -1 and m.threshold == 0.5
    assert predict_threshold(m, [0.0, 1.0]).tolist() == [1, 0]


def test_threshold_needs_both_classes():
    with pytest.raises(PreconditionError):
        train_threshold([1, 2, 3], [1, 1, 1])


def test_votes():
    m = ThresholdModel(0.5)
    assert classify_threshold(m, [0.7]) == 1
    assert classify_threshold(m, [0.6, 0.6, 0.6, 0.6, 0.1, 0.1, 0.1]) == 1
    assert classify_threshold(m, [0.6, 0.6, 0.1, 0.1, 0.1, 0.1, 0.1]) == 0
    assert classify_threshold(m, [0.6, 0.6, 0.1, 0.1]) == 1
    with pytest.raises(PreconditionError):
        classify_threshold(m, [])
    with pytest.raises(PreconditionError):
        classify_threshold(m, [1] * 8)
    assert predict_threshold(m, [0.7, 0.1, 0.1, 0.9, 0.9, 0.1, 0.2], n_votes=3).tolist() == [0, 1, 0]


grid_values = st.integers(-1000, 1000).map(lambda i: i / 100)


@given(st.lists(grid_values, min_size=4, max_size=30, unique=True), st.data(),
       st.sampled_from(["cube", "exp", "affine"]))
def test_threshold_invariant_under_increasing_maps(xs, data, fname):
    x = np.array(xs)
    labels = np.array(data.draw(st.lists(st.integers(0, 1), min_size=len(x), max_size=len(x))))
    assume(0 < labels.sum() < len(labels))
    f = {"cube": lambda v: v ** 3, "exp": np.exp, "affine": lambda v: 3 * v + 1}[fname]
    a, b = train_threshold(x, labels), train_threshold(f(x), labels)
    assert a.train_balanced_accuracy == b.train_balanced_accuracy
    assert a.polarity == b.polarity
    assert np.array_equal(predict_threshold(a, x), predict_threshold(b, f(x)))
    # the midpoint itself does not map onto the midpoint, so only points outside
    # the gap between the two training values around the threshold are comparable
    lo, hi = x[x < a.threshold].max(), x[x > a.threshold].min()
    test = np.array(data.draw(st.lists(grid_values, min_size=1, max_size=10)))
    test = test[(test <= lo) | (test >= hi)]
    assert np.array_equal(predict_threshold(a, test), predict_threshold(b, f(test)))


# -- knn ---------------------------------------------------------------------

def test_knn_examples():
    pts = np.vstack([np.ones((7, 11))])
    assert classify_knn(train_knn(pts, [1] * 7, 7), np.ones(11)) == 1
    q = np.zeros(2)
    near = [(1, 0), (0, 1), (-1, 0)]
    far = [(2, 0), (0, 2), (-2, 0), (0, -2)]
    model = KnnModel(np.array(near + far, dtype=float), [0, 0, 0, 1, 1, 1, 1], 7)
    assert classify_knn(model, q) == 1
    assert knn_scores(model, q[None])[0] == pytest.approx(4 / 7)


def test_knn_k_too_large():
    with pytest.raises(ConfigError):
        KnnModel(np.zeros((5, 2)), [0, 1, 0, 1, 0], 7)


def test_knn_tie_prefers_earlier_index():
    pts = np.array([[1.0, 0], [-1.0, 0], [0, 1.0]])
    m = KnnModel(pts, [1, 0, 0], 1)
    assert classify_knn(m, np.zeros(2)) == 1
    m = KnnModel(pts[[1, 0, 2]], [0, 1, 0], 1)
    assert classify_knn(m, np.zeros(2)) == 0


def test_knn_matches_exhaustive_oracle():
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 1, (112, 11))
    labels = rng.integers(0, 2, 112)
    queries = rng.uniform(-0.2, 1.2, (1000, 11))
    for k in (7, 9, 11, 13, 15):
        got = predict_knn(KnnModel(pts, labels, k), queries)
        want = [knn_label(pts.tolist(), labels.tolist(), q.tolist(), k) for q in queries[:200]]
        assert got[:200].tolist() == want
    got = predict_knn(KnnModel(pts, labels, 11), queries)
    assert got.tolist() == [knn_label(pts.tolist(), labels.tolist(), q.tolist(), 11) for q in queries]


@given(st.integers(0, 10_000))
def test_knn_permutation_invariance(seed):
    rng = np.random.default_rng(seed)
    pts = rng.normal(size=(30, 3))
    labels = rng.integers(0, 2, 30)
    q = rng.normal(size=(20, 3))
    perm = rng.permutation(30)
    a = predict_knn(KnnModel(pts, labels, 7), q)
    b = predict_knn(KnnModel(pts[perm], labels[perm], 7), q)
    assert np.array_equal(a, b)


# -- svm ---------------------------------------------------------------------

def test_two_point_svm_is_analytic():
    x = np.array([[0.0, 0.0], [1.0, 0.5]])
    gamma = 0.8
    k = math.exp(-gamma * 1.25)
    m = train_svm_rbf(x, [1, 0], C=100.0, gamma=gamma)
    assert len(m.support_vectors) == 2
    assert np.allclose(m.alphas, 1 / (1 - k), rtol=1e-9)
    f = decision_function(m, x)
    assert f[0] == pytest.approx(1.0, abs=1e-6) and f[1] == pytest.approx(-1.0, abs=1e-6)
    assert classify_svm(m, x[0]) == (1, pytest.approx(1.0, abs=1e-6))
    assert decision_function(m, x.mean(axis=0)[None])[0] == pytest.approx(0.0, abs=1e-6)


def test_xor_is_learned():
    x = np.array([[0.0, 0], [1, 1], [0, 1], [1, 0]])
    y = np.array([0, 0, 1, 1])
    m = train_svm_rbf(x, y, C=10.0, gamma=1.0)
    assert np.array_equal(predict_svm(m, x), y)
    obj, _ = svm_dual_exact(rbf_kernel(x, x, 1.0), np.where(y == 1, 1, -1), 10.0)
    alpha, _, _ = solve_dual(rbf_kernel(x, x, 1.0), y, 10.0)
    assert dual_objective(alpha, rbf_kernel(x, x, 1.0), y) == pytest.approx(obj, abs=1e-4)


def test_conflicting_duplicates_do_not_crash():
    x = np.array([[0.0, 0], [0, 0], [1, 1], [2, 2]])
    y = np.array([0, 1, 0, 1])
    m = train_svm_rbf(x, y, C=1.0, gamma=1.0)
    assert np.mean(predict_svm(m, x) == y) < 1.0


@given(st.integers(0, 10_000), st.integers(2, 4), st.sampled_from([0.1, 1.0, 10.0]),
       st.sampled_from([0.3, 1.0, 3.0]))
def test_smo_matches_exact_dual(seed, n, C, gamma):
    rng = np.random.default_rng(seed)
    x = rng.normal(size=(n, 2))
    y = np.array([0, 1] + list(rng.integers(0, 2, n - 2)))
    K = rbf_kernel(x, x, gamma)
    alpha, _, _ = solve_dual(K, y, C)
    obj, _ = svm_dual_exact(K, np.where(y == 1, 1, -1), C)
    assert dual_objective(alpha, K, y) == pytest.approx(obj, abs=1e-4)


@given(st.integers(0, 10_000), st.sampled_from([0.1, 1.0, 100.0]), st.sampled_from([0.1, 1.0, 10.0]))
def test_trained_model_invariants(seed, C, gamma):
    x, y = blobs(seed, n=25, sep=1.5)
    K = rbf_kernel(x, x, gamma)
    alpha, bias, _ = solve_dual(K, y, C)
    assert np.all(alpha >= 0) and np.all(alpha <= C)
    assert abs(np.sum(alpha * np.where(y == 1, 1, -1))) <= 1e-6 * max(1.0, C)
    assert kkt_violation(K, y, alpha, bias, C) <= 1e-2
    m = train_svm_rbf(x, y, C, gamma)
    assert np.allclose(np.sort(m.alphas), np.sort(alpha[alpha > 0]))


def test_non_convergence_reports_diagnostics():
    x, y = blobs(1, n=30, sep=0.5)
    with pytest.raises(TrainingError) as err:
        solve_dual(rbf_kernel(x, x, 1.0), y, 10.0, max_iter=1)
    d = err.value.diagnostics
    assert d["iterations"] == 1 and d["gap"] > 1e-3 and len(d["alpha"]) == 60


def test_support_vector_order_is_irrelevant():
    x, y = blobs(2)
    m = train_svm_rbf(x, y, 1.0, 0.5)
    perm = np.random.default_rng(0).permutation(len(m.dual_coef))
    p = SvmRbfModel(m.support_vectors[perm], m.dual_coef[perm], m.bias, m.gamma, m.C)
    q = np.random.default_rng(1).normal(1, 2, (200, 2))
    assert np.array_equal(predict_svm(m, q), predict_svm(p, q))
    assert np.allclose(decision_function(m, q), decision_function(p, q), atol=1e-12)


def test_training_is_deterministic():
    x, y = blobs(3)
    a, b = train_svm_rbf(x, y, 3.0, 0.2), train_svm_rbf(x, y, 3.0, 0.2)
    assert np.array_equal(a.dual_coef, b.dual_coef) and a.bias == b.bias


# -- grid search -------------------------------------------------------------

def rings(n=30, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.uniform(0, 2 * np.pi, 2 * n)
    r = np.concatenate([rng.uniform(0, 1, n), rng.uniform(2, 3, n)])
    return np.column_stack([r * np.cos(a), r * np.sin(a)]), np.repeat([1, 0], n)


def test_single_cell_grid():
    x, y = blobs(4)
    res = grid_search_svm(x, y, [2.0], [0.5])
    assert (res.C, res.gamma) == (2.0, 0.5)


def test_separating_cell_beats_underfitting_cell():
    x, y = rings()
    res = grid_search_svm(x, y, [1.0], [1e-6, 1.0])
    assert res.scores[0, 1] == 1.0
    assert res.scores[0, 0] < 0.75
    assert res.gamma == 1.0
    assert np.array_equal(predict_svm(res.model, x), y)


def test_default_grid_has_36_cells():
    x, y = blobs(5, n=20)
    res = grid_search_svm(x, y)
    assert res.scores.shape == (6, 6) and not np.isnan(res.scores).any()
    assert len(DEFAULT_C_GRID) == len(DEFAULT_GAMMA_GRID) == 6


def test_grid_ties_prefer_small_values():
    x, y = blobs(6, sep=8.0, n=15)
    res = grid_search_svm(x, y, [1.0, 10.0], [0.1, 1.0])
    assert (res.C, res.gamma) == (1.0, 0.1)


def test_training_accuracy_mode():
    x, y = rings()
    res = grid_search_svm(x, y, [1.0], [1.0], folds=None)
    assert res.scores[0, 0] == 1.0


def test_stratified_folds_balance():
    labels = np.repeat([0, 1], [56, 56])
    fold = stratified_folds(labels, 3)
    for f in range(3):
        counts = np.bincount(labels[fold == f], minlength=2)
        assert abs(counts[0] - counts[1]) <= 1


# -- dataset and serialisation -----------------------------------------------

def test_labeled_dataset_checks():
    with pytest.raises(ShapeError):
        LabeledDataset(np.zeros((3, 4)), [0, 1, 0])
    with pytest.raises(PreconditionError):
        LabeledDataset(np.zeros((2, 11)), [0, 2])
    d = LabeledDataset(np.zeros((3, 11)), [0, 1, 1])
    assert d.class_counts() == (1, 2)
    assert d.subset([2]).source_id == ("row2",)


@pytest.mark.parametrize("kind", ["thr", "knn", "svm"])
def test_model_json_round_trip(kind, tmp_path):
    x, y = blobs(7, dim=11)
    norm = fit_normalizer(x)
    xs = norm.transform(x)
    if kind == "thr":
        mags = np.linalg.norm(xs, axis=1)
        model = train_threshold(mags, y)
        predict = lambda m, q: predict_threshold(m, np.linalg.norm(q, axis=1))
    elif kind == "knn":
        model, predict = train_knn(xs, y, 9), predict_knn
    else:
        model, predict = train_svm_rbf(xs, y, 1.0, 0.3), predict_svm
    path = tmp_path / "model.json"
    dump_json(path, model_to_dict(model, norm))
    back, norm2 = model_from_dict(load_json(path))
    assert np.array_equal(norm2.mins, norm.mins) and np.array_equal(norm2.maxs, norm.maxs)
    q = norm.transform(np.random.default_rng(0).normal(1, 2, (50, 11)))
    assert np.array_equal(predict(model, q), predict(back, q))
    if kind == "svm":
        assert np.array_equal(decision_function(model, q), decision_function(back, q))
    json.loads(path.read_text())
