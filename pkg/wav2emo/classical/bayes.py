import logging

import numpy as np

from wav2emo.classical.base import Classifier, Tensors, softmax_rows
from wav2emo.errors import FitError

logger = logging.getLogger(__name__)


class GaussianNaiveBayes(Classifier):
    """
    Independent Gaussian likelihood per feature and class.

    The predicted class maximizes log prior plus the summed per-feature log
    likelihoods; variances are floored at `var_floor`.
    """

    def __init__(self, var_floor: float = 1e-9):
        self.var_floor = var_floor

    def _fit(self, X: np.ndarray, y: np.ndarray) -> None:
        counts = np.bincount(y, minlength=self.n_classes)
        if counts.min() < 2:
            sparse = self.classes_[counts < 2].tolist()
            raise FitError(f"naive Bayes needs 2 samples per class, classes {sparse}")
        self.class_prior_ = counts / counts.sum()
        self.theta_ = np.vstack([X[y == k].mean(axis=0) for k in range(self.n_classes)])
        variances = np.vstack([X[y == k].var(axis=0) for k in range(self.n_classes)])
        self.var_ = np.maximum(variances, self.var_floor)

    def joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        # (samples, classes, features)
        diff = X[:, None, :] - self.theta_[None]
        log_likelihood = -0.5 * np.sum(
            np.log(2.0 * np.pi * self.var_)[None] + diff * diff / self.var_[None],
            axis=2,
        )
        return np.log(self.class_prior_)[None] + log_likelihood

    def _proba(self, X: np.ndarray) -> np.ndarray:
        return softmax_rows(self.joint_log_likelihood(X))

    def _export(self) -> Tensors:
        return {"prior": self.class_prior_, "theta": self.theta_, "var": self.var_}

    def _import(self, tensors: Tensors) -> None:
        self.class_prior_ = tensors["prior"].astype(np.float64)
        self.theta_ = tensors["theta"].astype(np.float64)
        self.var_ = tensors["var"].astype(np.float64)
