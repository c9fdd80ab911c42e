import logging
from typing import Tuple

import numpy as np

from wav2emo.classical.base import Classifier, Tensors, softmax_rows
from wav2emo.errors import FitError

logger = logging.getLogger(__name__)


def standardize(X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Column means and scales; constant columns get scale 1."""
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    return mean, np.where(scale > 0, scale, 1.0)


class LinearSVM(Classifier):
    """
    One-vs-rest linear SVM trained with the Pegasos subgradient schedule.

    Each epoch visits the samples in a seeded random order; at step t the
    learning rate is 1 / (lam * t). Features are standardized with training
    statistics and a constant column carries the bias. The weights returned
    are the average of the iterates over the last half of training.
    """

    def __init__(self, lam: float = 1e-3, epochs: int = 50, seed: int = 0):
        self.lam = lam
        self.epochs = epochs
        self.seed = seed

    def _augment(self, X: np.ndarray) -> np.ndarray:
        scaled = (X - self.mean_) / self.scale_
        return np.hstack([scaled, np.ones((X.shape[0], 1))])

    def _fit(self, X: np.ndarray, y: np.ndarray) -> None:
        if self.n_classes < 2:
            raise FitError("linear SVM needs at least 2 classes")
        self.mean_, self.scale_ = standardize(X)
        Z = self._augment(X)
        targets = np.where(y[:, None] == np.arange(self.n_classes)[None], 1.0, -1.0)

        rng = np.random.default_rng(self.seed)
        weights = np.zeros((self.n_classes, Z.shape[1]))
        average = np.zeros_like(weights)
        total_steps = self.epochs * y.size
        averaged_from = total_steps // 2
        step = 0
        for _ in range(self.epochs):
            for i in rng.permutation(y.size):
                step += 1
                eta = 1.0 / (self.lam * step)
                violated = targets[i] * (weights @ Z[i]) < 1.0
                weights *= 1.0 - eta * self.lam
                weights[violated] += eta * targets[i, violated, None] * Z[i][None]
                if step > averaged_from:
                    average += weights
        self.coef_ = average / (total_steps - averaged_from)

    def decision_function(self, X: np.ndarray) -> np.ndarray:
        self._check_fitted()
        return self._augment(X) @ self.coef_.T

    def _proba(self, X: np.ndarray) -> np.ndarray:
        # margins squashed to sum to one; not calibrated
        return softmax_rows(self.decision_function(X))

    def _export(self) -> Tensors:
        return {"coef": self.coef_, "mean": self.mean_, "scale": self.scale_}

    def _import(self, tensors: Tensors) -> None:
        self.coef_ = tensors["coef"].astype(np.float64)
        self.mean_ = tensors["mean"].astype(np.float64)
        self.scale_ = tensors["scale"].astype(np.float64)
