import numpy as np
import pytest
from pydantic import ValidationError

from wav2emo.errors import EvalError
from wav2emo.evaluation import (
    ConfusionMatrix,
    accuracy_overall,
    accuracy_per_class,
    confusion,
    per_class_accuracies,
    undefined_support,
)


def test_two_class_matrix() -> None:
    cm = ConfusionMatrix(counts=[[3, 1], [1, 5]])
    assert accuracy_overall(cm) == 80.0
    assert per_class_accuracies(cm) == [80.0, 80.0]
    assert cm.support == [4, 6]
    assert cm.total == 10


def test_per_class_counts_true_negatives() -> None:
    cm = ConfusionMatrix(
        counts=[[2, 0, 0], [1, 1, 0], [0, 0, 0]], labels=["a", "b", "c"]
    )
    # class 0: TP 2, FP 1, FN 0, TN 1
    assert accuracy_per_class(cm, 0) == 75.0
    assert accuracy_per_class(cm, 2) == 100.0
    assert undefined_support(cm) == ["c"]
    assert undefined_support(ConfusionMatrix(counts=[[1, 0], [0, 0]])) == ["1"]


def test_confusion_from_predictions() -> None:
    cm = confusion([0, 1, 1, 2], [0, 1, 2, 2], labels=["x", "y", "z"])
    assert cm.counts == [[1, 0, 0], [0, 1, 0], [0, 1, 1]]
    assert cm.labels == ["x", "y", "z"]
    assert confusion([1], [1]).counts == [[0, 0], [0, 1]]
    assert confusion([0], [0], n_classes=3).n_classes == 3


def test_overall_accuracy_matches_mean() -> None:
    rng = np.random.default_rng(0)
    for _ in range(1000):
        n = int(rng.integers(1, 50))
        truths = rng.integers(0, 4, size=n)
        preds = rng.integers(0, 4, size=n)
        cm = confusion(preds, truths, n_classes=4)
        assert abs(accuracy_overall(cm) - 100.0 * np.mean(preds == truths)) < 1e-9


def test_errors() -> None:
    with pytest.raises(EvalError):
        accuracy_overall(ConfusionMatrix(counts=[[0, 0], [0, 0]]))
    with pytest.raises(EvalError):
        accuracy_per_class(ConfusionMatrix(counts=[[0]]), 0)
    with pytest.raises(EvalError):
        confusion([0, 1], [0])
    with pytest.raises(EvalError, match="prediction"):
        confusion([2], [0], n_classes=2)
    with pytest.raises(ValidationError):
        ConfusionMatrix(counts=[[1, 2]])
    with pytest.raises(ValidationError):
        ConfusionMatrix(counts=[[-1]])
    with pytest.raises(ValidationError):
        ConfusionMatrix(counts=[[1, 0], [0, 1]], labels=["only"])
