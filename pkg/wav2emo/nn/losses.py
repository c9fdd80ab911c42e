from typing import Tuple

import numpy as np

from wav2emo.errors import LabelError

PROBABILITY_FLOOR = 1e-12


def cross_entropy_loss(
    probs: np.ndarray, labels: np.ndarray
) -> Tuple[float, np.ndarray]:
    """
    Mean categorical cross-entropy of softmax outputs.

    Returns:
        The loss and its gradient with respect to the softmax input,
        (probs - onehot) / B.
    """
    labels = np.asarray(labels, dtype=np.int64)
    batch, n_classes = probs.shape
    if labels.shape != (batch,):
        raise LabelError(f"expected {batch} labels, got shape {labels.shape}")
    if labels.min(initial=0) < 0 or labels.max(initial=0) >= n_classes:
        raise LabelError(f"labels must lie in [0, {n_classes}), got {labels.tolist()}")
    picked = probs[np.arange(batch), labels]
    loss = float(-np.mean(np.log(np.maximum(picked, PROBABILITY_FLOOR))))
    grad = probs.copy()
    grad[np.arange(batch), labels] -= 1.0
    return loss, grad / batch
