import logging
import time
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field

from wav2emo.errors import ConfigError, ShapeError
from wav2emo.nn.losses import cross_entropy_loss
from wav2emo.nn.network import Checkpoint, backward, forward, init_parameters
from wav2emo.nn.optim import adam_step
from wav2emo.nn.specs import ArchConfig, TrainConfig

logger = logging.getLogger(__name__)

EVAL_BATCH_SIZE = 32


class ArrayDataset(NamedTuple):
    inputs: np.ndarray  # [N, channels, length]
    labels: np.ndarray  # [N] class ids

    def __len__(self) -> int:
        return int(self.labels.shape[0])


class EpochRecord(BaseModel):
    epoch: int = Field(description="1-based epoch number")
    train_loss: float = Field(description="Sample-weighted mean loss over the epoch")
    valid_accuracy: Optional[float] = Field(
        default=None, description="Percent correct on the validation set"
    )
    seconds: float = Field(description="Wall time of the epoch")


class History(BaseModel):
    arch: str = Field(description="Architecture name")
    epochs: List[EpochRecord] = Field(default_factory=list)

    def __len__(self) -> int:
        return len(self.epochs)

    @property
    def losses(self) -> List[float]:
        return [record.train_loss for record in self.epochs]


def predict_batch(
    ckpt: Checkpoint, inputs: np.ndarray, batch_size: int = EVAL_BATCH_SIZE
) -> Tuple[np.ndarray, np.ndarray]:
    """Evaluation-mode labels and probabilities for [N, channels, length] inputs."""
    probs = [
        forward(ckpt, inputs[start : start + batch_size], training=False)[0]
        for start in range(0, inputs.shape[0], batch_size)
    ]
    stacked = np.concatenate(probs, axis=0)
    # argmax keeps the first maximum, so ties go to the lowest class id
    return stacked.argmax(axis=1), stacked


def predict(ckpt: Checkpoint, sample: np.ndarray) -> Tuple[int, np.ndarray]:
    """Label and probabilities of one [channels, length] sample."""
    if sample.ndim != 2:
        raise ShapeError(f"expected one (channels, length) sample, got {sample.shape}")
    labels, probs = predict_batch(ckpt, sample[None])
    return int(labels[0]), probs[0]


def accuracy(ckpt: Checkpoint, data: ArrayDataset) -> float:
    predicted, _ = predict_batch(ckpt, data.inputs)
    return float(100.0 * np.mean(predicted == data.labels))


def train(
    arch: ArchConfig,
    cfg: TrainConfig,
    train_set: ArrayDataset,
    valid_set: Optional[ArrayDataset] = None,
    dtype: type = np.float32,
) -> Tuple[Checkpoint, History]:
    """
    Fixed-epoch mini-batch Adam training.

    Args:
        arch: Network topology; its input shape must match the samples.
        cfg: Learning rate, epochs, batch size and seed.
        train_set: Preprocessed inputs and class ids.
        valid_set: Optional held-out data scored after every epoch; an empty set
            is skipped.
        dtype: Parameter precision.

    Returns:
        The final checkpoint and one history record per epoch.
    """
    if len(train_set) == 0:
        raise ConfigError("training set is empty")
    if train_set.inputs.shape[1:] != tuple(arch.resolved_input_shape):
        raise ShapeError(
            f"samples have shape {train_set.inputs.shape[1:]}, {arch.name} expects "
            f"{tuple(arch.resolved_input_shape)}"
        )

    rng = np.random.default_rng(cfg.seed)
    ckpt = init_parameters(arch, cfg.seed, dtype=dtype)
    inputs = train_set.inputs.astype(dtype, copy=False)
    labels = np.asarray(train_set.labels, dtype=np.int64)
    history = History(arch=arch.name)

    for epoch in range(1, cfg.epochs + 1):
        started = time.perf_counter()
        order = rng.permutation(len(train_set))
        total_loss = 0.0
        for start in range(0, order.size, cfg.batch_size):
            idx = order[start : start + cfg.batch_size]
            probs, cache = forward(ckpt, inputs[idx], training=True, rng=rng)
            loss, grad = cross_entropy_loss(probs, labels[idx])
            grads = backward(cache, grad)
            ckpt = adam_step(ckpt, grads, cfg)
            if cache.buffer_updates:
                ckpt = ckpt.model_copy(
                    update={"buffers": {**ckpt.buffers, **cache.buffer_updates}}
                )
            total_loss += loss * idx.size

        record = EpochRecord(
            epoch=epoch,
            train_loss=total_loss / order.size,
            valid_accuracy=(
                accuracy(ckpt, valid_set)
                if valid_set is not None and len(valid_set) > 0
                else None
            ),
            seconds=time.perf_counter() - started,
        )
        history.epochs.append(record)
        logger.info(
            f"{arch.name} epoch {epoch}/{cfg.epochs}: loss {record.train_loss:.4f}"
            + (
                f", valid accuracy {record.valid_accuracy:.2f}%"
                if record.valid_accuracy is not None
                else ""
            )
        )

    ckpt = ckpt.model_copy(update={"rng_state": rng.bit_generator.state})
    return ckpt, history
