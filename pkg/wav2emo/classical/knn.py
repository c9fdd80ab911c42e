import numpy as np

from wav2emo.classical.base import Classifier, Tensors
from wav2emo.errors import FitError


class KNearestNeighbors(Classifier):
    """
    Majority vote among the k nearest training points by Euclidean distance.
    Equal distances keep training order; equal votes go to the lowest class.
    """

    def __init__(self, k: int = 5):
        self.k = k

    def _fit(self, X: np.ndarray, y: np.ndarray) -> None:
        if not 1 <= self.k <= y.size:
            raise FitError(f"k={self.k} must lie in [1, {y.size}]")
        self.points_ = X
        self.labels_ = y

    def neighbors(self, X: np.ndarray) -> np.ndarray:
        """Training indices of the k nearest points, (samples, k)."""
        rows = []
        for row in X:
            distances = np.sum((self.points_ - row) ** 2, axis=1)
            rows.append(np.argsort(distances, kind="stable")[: self.k])
        return np.vstack(rows)

    def _proba(self, X: np.ndarray) -> np.ndarray:
        votes = self.labels_[self.neighbors(X)]
        counts = np.stack([np.bincount(row, minlength=self.n_classes) for row in votes])
        return counts / self.k

    def _export(self) -> Tensors:
        return {"points": self.points_, "labels": self.labels_.astype(np.float64)}

    def _import(self, tensors: Tensors) -> None:
        self.points_ = tensors["points"].astype(np.float64)
        self.labels_ = tensors["labels"].astype(np.int64)
