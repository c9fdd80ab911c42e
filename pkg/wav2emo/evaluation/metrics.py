import logging
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, model_validator

from wav2emo.errors import EvalError

logger = logging.getLogger(__name__)


class ConfusionMatrix(BaseModel):
    """Rows are true classes, columns predicted classes."""

    counts: List[List[int]] = Field(description="K x K non-negative counts")
    labels: List[str] = Field(default_factory=list, description="Class names by id")

    @model_validator(mode="after")
    def ensure_square(self) -> "ConfusionMatrix":
        k = len(self.counts)
        if any(len(row) != k for row in self.counts):
            raise ValueError("confusion matrix must be square")
        if any(value < 0 for row in self.counts for value in row):
            raise ValueError("confusion counts must be non-negative")
        if self.labels and len(self.labels) != k:
            raise ValueError(f"{len(self.labels)} labels for a {k}x{k} matrix")
        return self

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=np.int64).reshape(
            len(self.counts), len(self.counts)
        )

    @property
    def n_classes(self) -> int:
        return len(self.counts)

    @property
    def total(self) -> int:
        return int(self.array.sum())

    @property
    def support(self) -> List[int]:
        """Test samples per true class (row sums)."""
        return self.array.sum(axis=1).tolist()


def confusion(
    preds: Sequence[int],
    truths: Sequence[int],
    n_classes: Optional[int] = None,
    labels: Optional[List[str]] = None,
) -> ConfusionMatrix:
    preds_array = np.asarray(preds, dtype=np.int64)
    truths_array = np.asarray(truths, dtype=np.int64)
    if preds_array.shape != truths_array.shape or preds_array.ndim != 1:
        raise EvalError(
            f"{preds_array.size} predictions for {truths_array.size} true labels"
        )
    if n_classes is None:
        n_classes = len(labels) if labels else int(
            max(preds_array.max(initial=-1), truths_array.max(initial=-1)) + 1
        )
    for name, values in (("prediction", preds_array), ("label", truths_array)):
        if values.size and (values.min() < 0 or values.max() >= n_classes):
            raise EvalError(f"{name} ids must lie in [0, {n_classes})")
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(counts, (truths_array, preds_array), 1)
    return ConfusionMatrix(counts=counts.tolist(), labels=labels or [])


def accuracy_overall(cm: ConfusionMatrix) -> float:
    """Percent of samples on the diagonal."""
    if cm.total == 0:
        raise EvalError("cannot score an empty confusion matrix")
    return 100.0 * float(np.trace(cm.array)) / cm.total


def accuracy_per_class(cm: ConfusionMatrix, c: int) -> float:
    """
    One-vs-rest accuracy of class c: (TP + TN) / (TP + TN + FP + FN) x 100.

    A class with no test samples still scores, dominated by true negatives;
    `undefined_support` names such classes.
    """
    counts = cm.array
    total = counts.sum()
    if total == 0:
        raise EvalError("cannot score an empty confusion matrix")
    tp = counts[c, c]
    fn = counts[c].sum() - tp
    fp = counts[:, c].sum() - tp
    tn = total - tp - fn - fp
    return 100.0 * float(tp + tn) / float(total)


def per_class_accuracies(cm: ConfusionMatrix) -> List[float]:
    return [accuracy_per_class(cm, c) for c in range(cm.n_classes)]


def undefined_support(cm: ConfusionMatrix) -> List[str]:
    """Names (or ids) of classes with an empty row."""
    return [
        cm.labels[c] if cm.labels else str(c)
        for c, support in enumerate(cm.support)
        if support == 0
    ]
