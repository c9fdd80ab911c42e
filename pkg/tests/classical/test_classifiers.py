from collections import Counter
from typing import Callable, List, Tuple

import numpy as np
import pytest

from wav2emo.classical import (
    CLASSICAL_METHODS,
    DecisionTree,
    GaussianNaiveBayes,
    KNearestNeighbors,
    LinearSVM,
    MajorityVoting,
    RandomForest,
    Stacking,
    build_classifier,
    committee,
    majority_vote,
)
from wav2emo.errors import ConfigError, FitError, ShapeError

Blobs = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


@pytest.mark.parametrize("method", CLASSICAL_METHODS + ["lr"])
def test_separates_blobs(method: str, blobs: Blobs) -> None:
    X_train, y_train, X_test, y_test = blobs
    clf = build_classifier(method, seed=0).fit(X_train, y_train)
    assert clf.classes_.tolist() == [3, 7, 9]
    proba = clf.predict_proba(X_test)
    assert proba.shape == (30, 3)
    assert np.allclose(proba.sum(axis=1), 1.0)
    assert np.mean(clf.predict(X_test) == y_test) >= 0.9


def test_unknown_method() -> None:
    with pytest.raises(ConfigError, match="unknown classical method"):
        build_classifier("xgboost")


def test_input_checks(blobs: Blobs) -> None:
    X_train, y_train, X_test, _ = blobs
    with pytest.raises(FitError, match="not fitted"):
        GaussianNaiveBayes().predict(X_test)
    clf = GaussianNaiveBayes().fit(X_train, y_train)
    with pytest.raises(ShapeError):
        clf.predict(X_test[:, :2])
    bad = X_train.copy()
    bad[0, 0] = np.nan
    with pytest.raises(FitError):
        GaussianNaiveBayes().fit(bad, y_train)
    with pytest.raises(ShapeError):
        GaussianNaiveBayes().fit(X_train, y_train[:-1])
    with pytest.raises(FitError, match="2 samples"):
        GaussianNaiveBayes().fit(X_train[:31], y_train[:31])


def test_knn_matches_brute_force(blobs: Blobs) -> None:
    X_train, y_train, _, _ = blobs
    clf = KNearestNeighbors(k=5).fit(X_train, y_train)
    queries = np.random.default_rng(2).uniform(-2.0, 6.0, size=(100, 3))
    for query, predicted in zip(queries, clf.predict(queries)):
        distances = [float(np.sum((row - query) ** 2)) for row in X_train]
        nearest = sorted(range(len(distances)), key=lambda i: (distances[i], i))[:5]
        counts = Counter(int(y_train[i]) for i in nearest)
        top = max(counts.values())
        assert predicted == min(label for label, n in counts.items() if n == top)


def test_knn_k_bounds(blobs: Blobs) -> None:
    X_train, y_train, _, _ = blobs
    with pytest.raises(FitError):
        KNearestNeighbors(k=0).fit(X_train, y_train)
    with pytest.raises(FitError):
        KNearestNeighbors(k=91).fit(X_train, y_train)
    clf = KNearestNeighbors(k=1).fit(X_train, y_train)
    assert np.array_equal(clf.predict(X_train), y_train)


def test_majority_vote_matches_modal_count() -> None:
    rng = np.random.default_rng(3)
    for _ in range(1000):
        votes = rng.integers(0, 5, size=int(rng.integers(1, 9))).tolist()
        counts = Counter(votes)
        top = max(counts.values())
        assert majority_vote(votes) == min(v for v, n in counts.items() if n == top)
    assert majority_vote([2, 1, 1, 2]) == 1
    with pytest.raises(ValueError):
        majority_vote([])


def test_voting_follows_members(blobs: Blobs) -> None:
    X_train, y_train, X_test, _ = blobs
    clf = MajorityVoting(committee(seed=0)).fit(X_train, y_train)
    members = clf.member_predictions(X_test)
    assert members.shape == (4, 30)
    expected = [clf.classes_[majority_vote(column)] for column in members.T]
    assert clf.predict(X_test).tolist() == [int(v) for v in expected]
    with pytest.raises(FitError):
        MajorityVoting([("nb", GaussianNaiveBayes())]).fit(X_train, y_train)


def test_stacking(blobs: Blobs) -> None:
    X_train, y_train, X_test, _ = blobs
    members = [("nb", GaussianNaiveBayes()), ("dt", DecisionTree())]
    clf = Stacking(members, folds=3, seed=0).fit(X_train, y_train)
    assert clf.meta_features(X_test).shape == (30, 2 * 3)
    meta = clf.out_of_fold_probabilities(X_train, np.searchsorted([3, 7, 9], y_train))
    assert meta.shape == (90, 6)
    assert np.allclose(meta[:, :3].sum(axis=1), 1.0)
    with pytest.raises(FitError):
        Stacking(members, folds=1).fit(X_train, y_train)


def test_stacking_needs_every_class_in_each_fold(blobs: Blobs) -> None:
    X_train, y_train, _, _ = blobs
    X = np.vstack([X_train, [[9.0, 9.0, 9.0]]])
    y = np.append(y_train, 11)
    with pytest.raises(FitError):
        Stacking([("dt", DecisionTree())], folds=3).fit(X, y)


def test_seeded_models_are_deterministic(blobs: Blobs) -> None:
    X_train, y_train, X_test, _ = blobs
    for make in (lambda: LinearSVM(seed=4), lambda: RandomForest(n_trees=10, seed=4)):
        first = make().fit(X_train, y_train).predict_proba(X_test)
        second = make().fit(X_train, y_train).predict_proba(X_test)
        assert np.array_equal(first, second)


def test_more_trees_score_at_least_as_well(
    blob_factory: Callable[..., Tuple[np.ndarray, np.ndarray]],
) -> None:
    single: List[float] = []
    many: List[float] = []
    for seed in range(20):
        spread = 1.5 + 0.5 * (seed % 4)
        X_train, y_train = blob_factory(40, seed=seed, spread=spread)
        X_test, y_test = blob_factory(40, seed=100 + seed, spread=spread)
        for n_trees, scores in ((1, single), (25, many)):
            forest = RandomForest(n_trees=n_trees, seed=seed).fit(X_train, y_train)
            scores.append(float(np.mean(forest.predict(X_test) == y_test)))
    assert np.mean(many) >= np.mean(single)


def test_forest_threads_match_sequential(blobs: Blobs) -> None:
    X_train, y_train, X_test, _ = blobs
    one = RandomForest(n_trees=12, seed=1).fit(X_train, y_train)
    many = RandomForest(n_trees=12, seed=1, n_jobs=3).fit(X_train, y_train)
    assert np.array_equal(one.tree_votes(X_test), many.tree_votes(X_test))
