import logging
from typing import Dict, List, Literal, Tuple

import numpy as np

from wav2emo.nn.layers import ReLU
from wav2emo.nn.losses import PROBABILITY_FLOOR, cross_entropy_loss
from wav2emo.nn.network import (
    Checkpoint,
    ForwardCache,
    backward,
    forward,
    init_parameters,
)
from wav2emo.nn.specs import ArchConfig
from wav2emo.nn.training import ArrayDataset

logger = logging.getLogger(__name__)

STEP = 1e-5
DENOMINATOR_FLOOR = 1e-8


def _relu_masks(cache: ForwardCache) -> List[np.ndarray]:
    return [
        layer_cache["mask"]
        for layer, layer_cache in zip(cache.layers, cache.caches)
        if isinstance(layer, ReLU)
    ]


def _loss(
    ckpt: Checkpoint, sample: ArrayDataset, seed: int
) -> Tuple[float, List[np.ndarray]]:
    # a fresh generator per pass keeps every dropout mask identical
    probs, cache = forward(
        ckpt, sample.inputs, training=True, rng=np.random.default_rng(seed)
    )
    return cross_entropy_loss(probs, sample.labels)[0], _relu_masks(cache)


def _same_masks(a: List[np.ndarray], b: List[np.ndarray]) -> bool:
    return all(np.array_equal(x, y) for x, y in zip(a, b))


def _analytic(
    ckpt: Checkpoint,
    sample: ArrayDataset,
    seed: int,
    wrt: Literal["logits", "probs"],
) -> Dict[str, np.ndarray]:
    probs, cache = forward(
        ckpt, sample.inputs, training=True, rng=np.random.default_rng(seed)
    )
    _, grad = cross_entropy_loss(probs, sample.labels)
    if wrt == "probs":
        batch = probs.shape[0]
        rows = np.arange(batch)
        grad = np.zeros_like(probs)
        picked = probs[rows, sample.labels]
        grad[rows, sample.labels] = np.where(
            picked > PROBABILITY_FLOOR, -1.0 / (batch * picked), 0.0
        )
    return backward(cache, grad, wrt=wrt)


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(
        DENOMINATOR_FLOOR, abs(analytic) + abs(numeric)
    )


def gradient_check(
    arch: ArchConfig,
    sample: ArrayDataset,
    tolerance: float = 1e-5,
    seed: int = 0,
    n_checks: int = 100,
    wrt: Literal["logits", "probs"] = "logits",
) -> float:
    """
    Compare backpropagated gradients with central differences.

    Parameters are initialized in double precision from `seed`. For every
    parameter tensor, up to `n_checks` randomly chosen entries are perturbed by
    ±1e-5 and the loss difference is compared with the analytic gradient.
    Perturbations that flip any ReLU between the two passes are skipped.

    Args:
        arch: A small network, a few thousand parameters at most.
        sample: Inputs [B, channels, length] and their class ids.
        tolerance: Errors above it are logged as warnings.
        seed: Parameter initialization, entry selection and dropout masks.
        n_checks: Entries perturbed per parameter tensor.
        wrt: "logits" checks the fused softmax and cross-entropy gradient,
            "probs" backpropagates through the softmax layer as well.

    Returns:
        The largest relative error |a - n| / max(1e-8, |a| + |n|).
    """
    ckpt = init_parameters(arch, seed, dtype=np.float64)
    sample = ArrayDataset(
        inputs=np.asarray(sample.inputs, dtype=np.float64),
        labels=np.asarray(sample.labels, dtype=np.int64),
    )
    grads = _analytic(ckpt, sample, seed, wrt)
    picker = np.random.default_rng(seed + 1)

    worst = 0.0
    skipped = 0
    for name, param in ckpt.parameters.items():
        flat_size = param.size
        chosen = picker.choice(flat_size, size=min(n_checks, flat_size), replace=False)
        tensor_worst = 0.0
        for flat_index in chosen:
            index = np.unravel_index(flat_index, param.shape)
            original = param[index]
            shifted = dict(ckpt.parameters)
            nudged = param.copy()
            shifted[name] = nudged

            nudged[index] = original + STEP
            plus, plus_masks = _loss(
                ckpt.model_copy(update={"parameters": shifted}), sample, seed
            )
            nudged[index] = original - STEP
            minus, minus_masks = _loss(
                ckpt.model_copy(update={"parameters": shifted}), sample, seed
            )
            if not _same_masks(plus_masks, minus_masks):
                # perturbation straddles a ReLU kink
                skipped += 1
                continue

            numeric = (plus - minus) / (2.0 * STEP)
            error = relative_error(float(grads[name][index]), numeric)
            tensor_worst = max(tensor_worst, error)
        logger.debug(f"{arch.name} {name}: max relative error {tensor_worst:.3e}")
        if tensor_worst > tolerance:
            logger.warning(
                f"Warning: {arch.name} {name} gradient error {tensor_worst:.3e} "
                f"exceeds {tolerance:.1e}"
            )
        worst = max(worst, tensor_worst)
    if skipped:
        logger.debug(f"{arch.name}: skipped {skipped} entries across a ReLU kink")
    return worst
