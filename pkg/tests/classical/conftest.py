from typing import Callable, Tuple

import numpy as np
import pytest

Blobs = Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


def make_blobs(
    n_per_class: int = 30, seed: int = 0, spread: float = 1.0
) -> Tuple[np.ndarray, np.ndarray]:
    # three classes with non-contiguous labels, well separated at spread 1
    rng = np.random.default_rng(seed)
    centers = np.array([[0.0, 0.0, 0.0], [4.0, 4.0, 0.0], [0.0, 4.0, 4.0]])
    X = np.vstack([c + spread * rng.normal(size=(n_per_class, 3)) for c in centers])
    y = np.repeat(np.array([3, 7, 9]), n_per_class)
    return X, y


@pytest.fixture
def blob_factory() -> Callable[..., Tuple[np.ndarray, np.ndarray]]:
    return make_blobs


@pytest.fixture
def blobs() -> Blobs:
    X_train, y_train = make_blobs(30, seed=0)
    X_test, y_test = make_blobs(10, seed=1)
    return X_train, y_train, X_test, y_test
