import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Union

import numpy as np

from wav2emo.classical.base import Classifier, Tensors
from wav2emo.classical.tree import (
    TreeArrays,
    apply_tree,
    export_tree,
    fit_tree,
    flatten_tree,
    import_tree,
)

logger = logging.getLogger(__name__)


def resolve_max_features(max_features: Union[str, int, None], n_features: int) -> int:
    if max_features is None:
        return n_features
    if max_features == "sqrt":
        return max(1, int(np.sqrt(n_features)))
    return max(1, min(int(max_features), n_features))


class RandomForest(Classifier):
    """
    Bagged CART trees with a random feature subset at every split.

    Each tree draws its bootstrap sample and feature subsets from its own
    child of `SeedSequence(seed)`, so the forest is identical whether the trees
    are grown in sequence or on `n_jobs` threads. Trees vote with their leaf
    majority; `predict_proba` is the vote share.
    """

    def __init__(
        self,
        n_trees: int = 100,
        max_depth: Optional[int] = None,
        min_leaf: int = 1,
        max_features: Union[str, int, None] = "sqrt",
        bootstrap: bool = True,
        seed: int = 0,
        n_jobs: int = 1,
    ):
        self.n_trees = n_trees
        self.max_depth = max_depth
        self.min_leaf = min_leaf
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.seed = seed
        self.n_jobs = n_jobs

    def _grow(
        self, X: np.ndarray, y: np.ndarray, seed: np.random.SeedSequence
    ) -> TreeArrays:
        rng = np.random.default_rng(seed)
        if self.bootstrap:
            rows = rng.integers(0, y.size, size=y.size)
            X, y = X[rows], y[rows]
        root = fit_tree(
            X,
            y,
            self.n_classes,
            max_depth=self.max_depth,
            min_leaf=self.min_leaf,
            max_features=resolve_max_features(self.max_features, X.shape[1]),
            rng=rng,
        )
        return flatten_tree(root, self.n_classes)

    def _fit(self, X: np.ndarray, y: np.ndarray) -> None:
        seeds = np.random.SeedSequence(self.seed).spawn(self.n_trees)
        if self.n_jobs > 1:
            with ThreadPoolExecutor(max_workers=self.n_jobs) as pool:
                self.trees_: List[TreeArrays] = list(
                    pool.map(lambda s: self._grow(X, y, s), seeds)
                )
        else:
            self.trees_ = [self._grow(X, y, s) for s in seeds]
        logger.debug(f"Grew {len(self.trees_)} trees")

    def tree_votes(self, X: np.ndarray) -> np.ndarray:
        """Encoded class chosen by every tree, (trees, samples)."""
        return np.vstack(
            [tree.histogram[apply_tree(tree, X)].argmax(axis=1) for tree in self.trees_]
        )

    def _proba(self, X: np.ndarray) -> np.ndarray:
        votes = self.tree_votes(X)
        counts = np.stack(
            [np.bincount(column, minlength=self.n_classes) for column in votes.T]
        )
        return counts / len(self.trees_)

    def _export(self) -> Tensors:
        tensors: Tensors = {}
        for index, tree in enumerate(self.trees_):
            tensors.update(export_tree(tree, prefix=f"tree{index:03d}"))
        return tensors

    def _import(self, tensors: Tensors) -> None:
        self.trees_ = [
            import_tree(tensors, prefix=f"tree{index:03d}")
            for index in range(self.n_trees)
        ]
