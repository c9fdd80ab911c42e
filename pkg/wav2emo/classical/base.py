import logging
from typing import Dict, Tuple

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from wav2emo.errors import FitError, ShapeError

logger = logging.getLogger(__name__)

Tensors = Dict[str, np.ndarray]


def check_features(X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ShapeError(
            f"expected a non-empty (samples, features) matrix, got {X.shape}"
        )
    if not np.all(np.isfinite(X)):
        raise FitError("feature matrix contains NaN or infinite values")
    return X


def check_training_set(X: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    X = check_features(X)
    y = np.asarray(y)
    if y.shape != (X.shape[0],):
        raise ShapeError(f"{X.shape[0]} samples but labels have shape {y.shape}")
    return X, y


class Classifier(ClassifierMixin, BaseEstimator):
    """
    Shared plumbing for the in-house classifiers.

    Labels are encoded against the sorted `classes_`, so taking the first
    maximum of `predict_proba` breaks ties toward the lowest class id.
    Subclasses implement `_fit` on encoded labels, `_proba`, and the pair
    `_export` / `_import` that moves fitted state in and out of named tensors.
    """

    def fit(self, X: np.ndarray, y: np.ndarray) -> "Classifier":
        X, y = check_training_set(X, y)
        self.classes_, encoded = np.unique(y, return_inverse=True)
        self.n_features_in_ = X.shape[1]
        self._fit(X, encoded)
        return self

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        self._check_fitted()
        X = check_features(X)
        if X.shape[1] != self.n_features_in_:
            raise ShapeError(
                f"{type(self).__name__} was fitted on {self.n_features_in_} features,"
                f" got {X.shape[1]}"
            )
        return self._proba(X)

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    @property
    def n_classes(self) -> int:
        return int(self.classes_.size)

    def _check_fitted(self) -> None:
        if not hasattr(self, "classes_"):
            raise FitError(f"{type(self).__name__} is not fitted")

    def export_tensors(self) -> Tensors:
        self._check_fitted()
        tensors = {
            "classes": self.classes_.astype(np.float64),
            "n_features": np.array([self.n_features_in_], dtype=np.float64),
        }
        tensors.update(self._export())
        return tensors

    def import_tensors(self, tensors: Tensors) -> "Classifier":
        self.classes_ = tensors["classes"].astype(np.int64)
        self.n_features_in_ = int(tensors["n_features"][0])
        self._import(tensors)
        return self

    def _fit(self, X: np.ndarray, y: np.ndarray) -> None:
        raise NotImplementedError

    def _proba(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _export(self) -> Tensors:
        raise NotImplementedError

    def _import(self, tensors: Tensors) -> None:
        raise NotImplementedError


def softmax_rows(scores: np.ndarray) -> np.ndarray:
    shifted = scores - scores.max(axis=1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=1, keepdims=True)


def nested(prefix: str, tensors: Tensors) -> Tensors:
    return {f"{prefix}/{name}": value for name, value in tensors.items()}


def unnested(prefix: str, tensors: Tensors) -> Tensors:
    head = f"{prefix}/"
    return {
        name.removeprefix(head): value
        for name, value in tensors.items()
        if name.startswith(head)
    }
