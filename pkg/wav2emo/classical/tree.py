import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from wav2emo.classical.base import Classifier, Tensors

logger = logging.getLogger(__name__)

# scores closer than this count as equal, keeping the earlier candidate
TIE_TOLERANCE = 1e-12


@dataclass
class Leaf:
    histogram: np.ndarray  # training samples per encoded class


@dataclass
class Split:
    feature: int
    threshold: float
    left: "TreeNode"
    right: "TreeNode"


TreeNode = Union[Leaf, Split]


def gini(counts: np.ndarray) -> np.ndarray:
    """Gini impurity of each row of class counts."""
    totals = counts.sum(axis=-1, keepdims=True)
    shares = counts / np.maximum(totals, 1)
    return 1.0 - np.sum(shares * shares, axis=-1)


def best_split(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    features: Sequence[int],
    min_leaf: int = 1,
) -> Optional[Tuple[int, float, float]]:
    """
    Exhaustive CART search over midpoints of sorted unique values.

    Returns (feature, threshold, weighted child impurity) of the best split,
    preferring the lowest feature index and then the lowest threshold among
    equal scores, or None when no split leaves min_leaf samples on both sides.
    """
    n = y.size
    onehot = np.eye(n_classes)[y]
    total = onehot.sum(axis=0)
    n_left = np.arange(1, n)
    n_right = n - n_left
    best: Optional[Tuple[int, float, float]] = None
    for feature in sorted(features):
        order = np.argsort(X[:, feature], kind="stable")
        values = X[order, feature]
        left_counts = np.cumsum(onehot[order], axis=0)[:-1]
        right_counts = total - left_counts
        score = (n_left * gini(left_counts) + n_right * gini(right_counts)) / n
        distinct = values[1:] > values[:-1]
        valid = distinct & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not valid.any():
            continue
        score = np.where(valid, score, np.inf)
        position = int(np.argmin(score))
        if best is None or score[position] < best[2] - TIE_TOLERANCE:
            threshold = 0.5 * (values[position] + values[position + 1])
            best = (feature, float(threshold), float(score[position]))
    return best


def fit_tree(
    X: np.ndarray,
    y: np.ndarray,
    n_classes: int,
    max_depth: Optional[int] = None,
    min_leaf: int = 1,
    max_features: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> TreeNode:
    """
    Grow a CART classification tree with Gini impurity.

    Args:
        X: (samples, features) matrix.
        y: Encoded labels in [0, n_classes).
        n_classes: Width of every leaf histogram.
        max_depth: Depth limit; unlimited when None.
        min_leaf: Minimum samples on each side of a split.
        max_features: Size of the random feature subset drawn at each split;
            every feature when None.
        rng: Draws the feature subsets.

    Returns:
        The root node. Growth stops at purity, at max_depth, or when no split
        satisfies min_leaf.
    """
    n_features = X.shape[1]
    rng = rng or np.random.default_rng(0)

    def candidates() -> Sequence[int]:
        if max_features is None or max_features >= n_features:
            return range(n_features)
        return rng.choice(n_features, size=max_features, replace=False).tolist()

    def grow(indices: np.ndarray, depth: int) -> TreeNode:
        histogram = np.bincount(y[indices], minlength=n_classes).astype(np.float64)
        if np.count_nonzero(histogram) <= 1 or (
            max_depth is not None and depth >= max_depth
        ):
            return Leaf(histogram)
        found = best_split(X[indices], y[indices], n_classes, candidates(), min_leaf)
        if found is None:
            return Leaf(histogram)
        feature, threshold, _ = found
        goes_left = X[indices, feature] <= threshold
        return Split(
            feature=feature,
            threshold=threshold,
            left=grow(indices[goes_left], depth + 1),
            right=grow(indices[~goes_left], depth + 1),
        )

    return grow(np.arange(y.size), 0)


class TreeArrays(NamedTuple):
    """Array form of a tree; leaves have feature -1."""

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    histogram: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.size)


def flatten_tree(root: TreeNode, n_classes: int) -> TreeArrays:
    features: List[int] = []
    thresholds: List[float] = []
    lefts: List[int] = []
    rights: List[int] = []
    histograms: List[np.ndarray] = []

    stack: List[Tuple[TreeNode, int, str]] = [(root, -1, "")]
    while stack:
        node, parent, side = stack.pop()
        index = len(features)
        if parent >= 0:
            (lefts if side == "left" else rights)[parent] = index
        lefts.append(-1)
        rights.append(-1)
        if isinstance(node, Leaf):
            features.append(-1)
            thresholds.append(0.0)
            histograms.append(node.histogram)
        else:
            features.append(node.feature)
            thresholds.append(node.threshold)
            histograms.append(np.zeros(n_classes))
            stack.append((node.right, index, "right"))
            stack.append((node.left, index, "left"))

    return TreeArrays(
        feature=np.asarray(features, dtype=np.int64),
        threshold=np.asarray(thresholds, dtype=np.float64),
        left=np.asarray(lefts, dtype=np.int64),
        right=np.asarray(rights, dtype=np.int64),
        histogram=np.vstack(histograms),
    )


def tree_depth(tree: TreeArrays) -> int:
    depth = np.zeros(tree.n_nodes, dtype=np.int64)
    for index in range(tree.n_nodes):
        if tree.feature[index] >= 0:
            depth[tree.left[index]] = depth[index] + 1
            depth[tree.right[index]] = depth[index] + 1
    return int(depth.max())


def apply_tree(tree: TreeArrays, X: np.ndarray) -> np.ndarray:
    """Leaf index reached by every row of X."""
    node = np.zeros(X.shape[0], dtype=np.int64)
    rows = np.arange(X.shape[0])
    while True:
        inner = tree.feature[node] >= 0
        if not inner.any():
            return node
        feature = np.where(inner, tree.feature[node], 0)
        goes_left = X[rows, feature] <= tree.threshold[node]
        step = np.where(goes_left, tree.left[node], tree.right[node])
        node = np.where(inner, step, node)


def tree_proba(tree: TreeArrays, X: np.ndarray) -> np.ndarray:
    histogram = tree.histogram[apply_tree(tree, X)]
    return histogram / histogram.sum(axis=1, keepdims=True)


def export_tree(tree: TreeArrays, prefix: str = "tree") -> Tensors:
    return {
        f"{prefix}/{name}": np.asarray(value) for name, value in tree._asdict().items()
    }


def import_tree(tensors: Tensors, prefix: str = "tree") -> TreeArrays:
    return TreeArrays(
        feature=tensors[f"{prefix}/feature"].astype(np.int64),
        threshold=tensors[f"{prefix}/threshold"].astype(np.float64),
        left=tensors[f"{prefix}/left"].astype(np.int64),
        right=tensors[f"{prefix}/right"].astype(np.int64),
        histogram=tensors[f"{prefix}/histogram"].astype(np.float64),
    )


class DecisionTree(Classifier):
    def __init__(
        self,
        max_depth: Optional[int] = None,
        min_leaf: int = 1,
        max_features: Optional[int] = None,
        seed: int = 0,
    ):
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.seed = seed

    def _fit(self, X: np.ndarray, y: np.ndarray) -> None:
        root = fit_tree(
            X,
            y,
            self.n_classes,
            max_depth=self.max_depth,
            min_leaf=self.min_leaf,
            max_features=self.max_features,
            rng=np.random.default_rng(self.seed),
        )
        self.tree_ = flatten_tree(root, self.n_classes)
        logger.debug(
            f"Grew a tree with {self.tree_.n_nodes} nodes,"
            f" depth {tree_depth(self.tree_)}"
        )

    def _proba(self, X: np.ndarray) -> np.ndarray:
        return tree_proba(self.tree_, X)

    def _export(self) -> Tensors:
        return export_tree(self.tree_)

    def _import(self, tensors: Tensors) -> None:
        self.tree_ = import_tree(tensors)
