import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from wav2emo.errors import ShapeError
from wav2emo.nn.layers import Cache, Layer, Params, Shape, Softmax, build_layer
from wav2emo.nn.specs import ArchConfig

logger = logging.getLogger(__name__)


def build_layers(arch: ArchConfig) -> List[Layer]:
    """Instantiate every layer with its statically inferred input shape."""
    shape: Shape = tuple(arch.resolved_input_shape)
    layers = []
    for index, spec in enumerate(arch.layers):
        layer = build_layer(spec, index, shape)
        layers.append(layer)
        shape = layer.out_shape
    return layers


def parameter_shapes(arch: ArchConfig) -> Dict[str, Shape]:
    """Shape of every trainable tensor, by name, without allocating any."""
    return {
        f"{layer.name}.{name}": shape
        for layer in build_layers(arch)
        for name, shape in layer.param_shapes().items()
    }


def parameter_count(arch: ArchConfig) -> int:
    return sum(int(np.prod(shape)) for shape in parameter_shapes(arch).values())


class AdamState(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    step: int = Field(default=0, ge=0, description="Updates applied so far")
    first_moment: Dict[str, np.ndarray] = Field(default_factory=dict)
    second_moment: Dict[str, np.ndarray] = Field(default_factory=dict)


class Checkpoint(BaseModel):
    """Immutable snapshot of a network; every update returns a new one."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    arch: ArchConfig = Field(description="Topology the tensors belong to")
    parameters: Dict[str, np.ndarray] = Field(description="Trainable tensors")
    buffers: Dict[str, np.ndarray] = Field(
        default_factory=dict, description="Running statistics of batch norm layers"
    )
    optimizer_state: AdamState = Field(default_factory=AdamState)
    rng_state: Dict[str, Any] = Field(
        default_factory=dict, description="Bit generator state after the last epoch"
    )
    metadata: Dict[str, Any] = Field(
        default_factory=dict, description="Labels, frontend and split provenance"
    )

    @model_validator(mode="after")
    def ensure_shapes_match_arch(self) -> "Checkpoint":
        expected = parameter_shapes(self.arch)
        if set(expected) != set(self.parameters):
            missing = sorted(set(expected) ^ set(self.parameters))
            raise ValueError(f"parameter names differ from architecture: {missing}")
        for name, shape in expected.items():
            if self.parameters[name].shape != shape:
                raise ValueError(
                    f"{name} has shape {self.parameters[name].shape}, expected {shape}"
                )
        return self

    @property
    def dtype(self) -> np.dtype:
        return next(iter(self.parameters.values())).dtype

    @property
    def labels(self) -> List[str]:
        return list(self.metadata.get("labels", []))


def init_parameters(
    arch: ArchConfig, seed: int, dtype: type = np.float32
) -> Checkpoint:
    """
    Fresh parameters: He-uniform conv/dense weights, Glorot-uniform LSTM
    weights with forget bias 1, unit batch-norm scale and zero shift.
    """
    rng = np.random.default_rng(seed)
    parameters: Params = {}
    buffers: Params = {}
    for layer in build_layers(arch):
        for name, value in layer.init_params(rng).items():
            parameters[f"{layer.name}.{name}"] = value.astype(dtype)
        for name, value in layer.init_buffers().items():
            buffers[f"{layer.name}.{name}"] = value.astype(dtype)
    logger.debug(f"Initialized {arch.name} with {parameter_count(arch)} parameters")
    return Checkpoint(arch=arch, parameters=parameters, buffers=buffers)


@dataclass
class ForwardCache:
    layers: List[Layer]
    parameters: Dict[str, np.ndarray]
    caches: List[Cache] = field(default_factory=list)
    buffer_updates: Dict[str, np.ndarray] = field(default_factory=dict)
    probs: Optional[np.ndarray] = None


def _layer_params(source: Dict[str, np.ndarray], layer: Layer) -> Params:
    prefix = f"{layer.name}."
    return {
        name.removeprefix(prefix): value
        for name, value in source.items()
        if name.startswith(prefix)
    }


def forward(
    ckpt: Checkpoint,
    batch: np.ndarray,
    training: bool,
    rng: Optional[np.random.Generator] = None,
) -> Tuple[np.ndarray, ForwardCache]:
    """
    Run a batch through the network.

    Args:
        ckpt: Parameters and running statistics.
        batch: [B, channels, length] input.
        training: Enables dropout and batch statistics.
        rng: Source of dropout masks; a fixed-seed generator when omitted.

    Returns:
        Class probabilities [B, n_classes] and the cache backward needs. The
        cache also carries the running statistics a training step produced.
    """
    layers = build_layers(ckpt.arch)
    expected = tuple(ckpt.arch.resolved_input_shape)
    if batch.ndim != 3 or batch.shape[1:] != expected:
        raise ShapeError(
            f"layer {layers[0].name}: expects input (B, {expected[0]}, {expected[1]}),"
            f" got {batch.shape}"
        )
    if rng is None:
        rng = np.random.default_rng(0)

    cache = ForwardCache(layers=layers, parameters=ckpt.parameters)
    x = batch.astype(ckpt.dtype, copy=False)
    for layer in layers:
        x, layer_cache, updates = layer.forward(
            _layer_params(ckpt.parameters, layer),
            _layer_params(ckpt.buffers, layer),
            x,
            training,
            rng,
        )
        cache.caches.append(layer_cache)
        for name, value in updates.items():
            cache.buffer_updates[f"{layer.name}.{name}"] = value.astype(ckpt.dtype)
    cache.probs = x
    return x, cache


def backward(
    cache: ForwardCache,
    grad_loss: np.ndarray,
    wrt: Literal["logits", "probs"] = "logits",
) -> Dict[str, np.ndarray]:
    """
    Backpropagate through every layer.

    Args:
        cache: From a training-mode forward.
        grad_loss: Loss gradient with respect to the softmax input (the fused
            cross-entropy gradient) or, with wrt="probs", to its output.
        wrt: Which side of the final softmax grad_loss refers to.

    Returns:
        One gradient per parameter, named and shaped like the parameters.
    """
    grads: Dict[str, np.ndarray] = {}
    dy = grad_loss
    for layer, layer_cache in zip(reversed(cache.layers), reversed(cache.caches)):
        if isinstance(layer, Softmax) and wrt == "logits" and layer is cache.layers[-1]:
            continue
        dy, layer_grads = layer.backward(
            _layer_params(cache.parameters, layer), layer_cache, dy
        )
        for name, value in layer_grads.items():
            grads[f"{layer.name}.{name}"] = value
    return grads
