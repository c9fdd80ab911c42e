import logging

import numpy as np

from wav2emo.classical.base import Classifier, Tensors, softmax_rows
from wav2emo.classical.svm import standardize

logger = logging.getLogger(__name__)


class LogisticRegression(Classifier):
    """Multinomial logistic regression fitted by full-batch gradient descent."""

    def __init__(
        self, learning_rate: float = 0.5, max_iter: int = 500, l2: float = 1e-4
    ):
        self.learning_rate = learning_rate
        self.max_iter = max_iter
        self.l2 = l2

    def _design(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean_) / self.scale_

    def _fit(self, X: np.ndarray, y: np.ndarray) -> None:
        self.mean_, self.scale_ = standardize(X)
        Z = self._design(X)
        onehot = np.eye(self.n_classes)[y]
        self.coef_ = np.zeros((Z.shape[1], self.n_classes))
        self.intercept_ = np.zeros(self.n_classes)
        for _ in range(self.max_iter):
            error = (softmax_rows(Z @ self.coef_ + self.intercept_) - onehot) / y.size
            self.coef_ -= self.learning_rate * (Z.T @ error + self.l2 * self.coef_)
            self.intercept_ -= self.learning_rate * error.sum(axis=0)

    def _proba(self, X: np.ndarray) -> np.ndarray:
        return softmax_rows(self._design(X) @ self.coef_ + self.intercept_)

    def _export(self) -> Tensors:
        return {
            "coef": self.coef_,
            "intercept": self.intercept_,
            "mean": self.mean_,
            "scale": self.scale_,
        }

    def _import(self, tensors: Tensors) -> None:
        self.coef_ = tensors["coef"].astype(np.float64)
        self.intercept_ = tensors["intercept"].astype(np.float64)
        self.mean_ = tensors["mean"].astype(np.float64)
        self.scale_ = tensors["scale"].astype(np.float64)
