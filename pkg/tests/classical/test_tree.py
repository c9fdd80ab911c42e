from typing import Optional, Tuple

import numpy as np

from wav2emo.classical import DecisionTree, Leaf, Split, best_split, fit_tree
from wav2emo.classical.tree import flatten_tree, gini, tree_depth


def _exhaustive(X: np.ndarray, y: np.ndarray, n_classes: int) -> Optional[float]:
    best: Optional[float] = None
    n = y.size
    for feature in range(X.shape[1]):
        values = np.unique(X[:, feature])
        for low, high in zip(values[:-1], values[1:]):
            goes_left = X[:, feature] <= 0.5 * (low + high)
            left = np.bincount(y[goes_left], minlength=n_classes)
            right = np.bincount(y[~goes_left], minlength=n_classes)
            n_left = goes_left.sum()
            score = (n_left * gini(left) + (n - n_left) * gini(right)) / n
            if best is None or score < best:
                best = float(score)
    return best


def _split_score(
    X: np.ndarray, y: np.ndarray, n_classes: int, found: Tuple[int, float, float]
) -> float:
    feature, threshold, _ = found
    goes_left = X[:, feature] <= threshold
    left = np.bincount(y[goes_left], minlength=n_classes)
    right = np.bincount(y[~goes_left], minlength=n_classes)
    return float(
        (goes_left.sum() * gini(left) + (~goes_left).sum() * gini(right)) / y.size
    )


def test_gini() -> None:
    assert gini(np.array([5, 0])) == 0.0
    assert gini(np.array([2, 2])) == 0.5
    assert gini(np.array([0, 0])) == 1.0


def test_root_split_matches_exhaustive_search() -> None:
    rng = np.random.default_rng(0)
    for _ in range(50):
        n = int(rng.integers(5, 40))
        # rounded values produce duplicate feature values
        X = np.round(rng.normal(size=(n, 3)), 1)
        y = rng.integers(0, 3, size=n)
        found = best_split(X, y, 3, range(3))
        expected = _exhaustive(X, y, 3)
        if expected is None:
            assert found is None
            continue
        assert found is not None
        assert abs(found[2] - expected) < 1e-12
        assert abs(_split_score(X, y, 3, found) - expected) < 1e-12


def test_split_prefers_lowest_feature_on_ties() -> None:
    X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
    y = np.array([0, 0, 1, 1])
    assert best_split(X, y, 2, [1, 0]) == (0, 0.5, 0.0)


def test_no_valid_split() -> None:
    X = np.ones((4, 2))
    y = np.array([0, 1, 0, 1])
    assert best_split(X, y, 2, range(2)) is None
    root = fit_tree(X, y, 2)
    assert isinstance(root, Leaf)
    assert root.histogram.tolist() == [2.0, 2.0]


def test_tree_fits_training_set() -> None:
    rng = np.random.default_rng(1)
    X = rng.normal(size=(60, 4))
    y = rng.integers(0, 3, size=60)
    clf = DecisionTree().fit(X, y)
    assert np.array_equal(clf.predict(X), y)
    shallow = DecisionTree(max_depth=2).fit(X, y)
    assert tree_depth(shallow.tree_) <= 2


def test_min_leaf() -> None:
    X = np.arange(10.0)[:, None]
    y = np.array([0] + [1] * 9)
    root = fit_tree(X, y, 2, min_leaf=3)
    assert isinstance(root, Split)
    assert root.threshold >= 2.5
    arrays = flatten_tree(root, 2)
    assert arrays.feature[0] == 0
    assert arrays.histogram[arrays.feature == -1].sum() == 10
