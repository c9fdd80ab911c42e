"""
Layers with hand-derived gradients.

Per-sample shapes exclude the batch axis. Sequences are channels-first:
(channels, steps). Every layer is stateless; parameters and running statistics
are passed in and new statistics are handed back to the caller.
"""

import logging
from abc import ABC, abstractmethod
from typing import Any, Dict, Tuple

import numpy as np

from wav2emo.errors import ShapeError
from wav2emo.nn.specs import (
    BatchNorm1DSpec,
    Conv1DSpec,
    DenseSpec,
    DropoutSpec,
    FlattenSpec,
    LayerSpec,
    LSTMSpec,
    ReLUSpec,
    SoftmaxSpec,
)

logger = logging.getLogger(__name__)

Shape = Tuple[int, ...]
Params = Dict[str, np.ndarray]
Cache = Dict[str, Any]


def he_uniform(rng: np.random.Generator, shape: Shape, fan_in: int) -> np.ndarray:
    bound = np.sqrt(6.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape)


def glorot_uniform(
    rng: np.random.Generator, shape: Shape, fan_in: int, fan_out: int
) -> np.ndarray:
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape)


def sigmoid(z: np.ndarray) -> np.ndarray:
    # split by sign so exp never overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


class Layer(ABC):
    kind: str = ""

    def __init__(self, spec: LayerSpec, index: int, in_shape: Shape):
        self.spec = spec
        self.index = index
        self.in_shape = in_shape
        self.out_shape = self.infer_shape(in_shape)

    @property
    def name(self) -> str:
        return f"{self.index:02d}.{self.kind}"

    def shape_error(self, message: str) -> ShapeError:
        return ShapeError(f"layer {self.name}: {message}")

    @abstractmethod
    def infer_shape(self, in_shape: Shape) -> Shape: ...

    def param_shapes(self) -> Dict[str, Shape]:
        return {}

    def buffer_shapes(self) -> Dict[str, Shape]:
        return {}

    def init_params(self, rng: np.random.Generator) -> Params:
        return {}

    def init_buffers(self) -> Params:
        return {}

    @abstractmethod
    def forward(
        self,
        params: Params,
        buffers: Params,
        x: np.ndarray,
        training: bool,
        rng: np.random.Generator,
    ) -> Tuple[np.ndarray, Cache, Params]:
        """Returns output, backward cache and updated running buffers."""

    @abstractmethod
    def backward(
        self, params: Params, cache: Cache, dy: np.ndarray
    ) -> Tuple[np.ndarray, Params]:
        """Returns the input gradient and one gradient per parameter."""


class Conv1D(Layer):
    kind = "conv1d"
    spec: Conv1DSpec

    def infer_shape(self, in_shape: Shape) -> Shape:
        if len(in_shape) != 2:
            raise self.shape_error(f"expects (channels, length), got {in_shape}")
        channels, length = in_shape
        if length < self.spec.kernel:
            raise self.shape_error(
                f"length {length} is shorter than kernel {self.spec.kernel}"
            )
        out_length = (length - self.spec.kernel) // self.spec.stride + 1
        return (self.spec.filters, out_length)

    def param_shapes(self) -> Dict[str, Shape]:
        channels = self.in_shape[0]
        return {
            "weight": (self.spec.filters, channels, self.spec.kernel),
            "bias": (self.spec.filters,),
        }

    def init_params(self, rng: np.random.Generator) -> Params:
        shapes = self.param_shapes()
        fan_in = self.in_shape[0] * self.spec.kernel
        return {
            "weight": he_uniform(rng, shapes["weight"], fan_in),
            "bias": np.zeros(shapes["bias"]),
        }

    def _windows(self, x: np.ndarray) -> np.ndarray:
        windows = np.lib.stride_tricks.sliding_window_view(
            x, self.spec.kernel, axis=2
        )
        return windows[:, :, :: self.spec.stride, :][:, :, : self.out_shape[1], :]

    def forward(
        self,
        params: Params,
        buffers: Params,
        x: np.ndarray,
        training: bool,
        rng: np.random.Generator,
    ) -> Tuple[np.ndarray, Cache, Params]:
        windows = self._windows(x)
        # (B, C, L', K) · (F, C, K) -> (B, L', F)
        y = np.tensordot(windows, params["weight"], axes=([1, 3], [1, 2]))
        y = y.transpose(0, 2, 1) + params["bias"][None, :, None]
        return np.ascontiguousarray(y), {"x_shape": x.shape, "windows": windows}, {}

    def backward(
        self, params: Params, cache: Cache, dy: np.ndarray
    ) -> Tuple[np.ndarray, Params]:
        weight = params["weight"]
        stride, kernel = self.spec.stride, self.spec.kernel
        out_length = dy.shape[2]
        grads = {
            "weight": np.tensordot(dy, cache["windows"], axes=([0, 2], [0, 2])),
            "bias": dy.sum(axis=(0, 2)),
        }
        dx = np.zeros(cache["x_shape"], dtype=dy.dtype)
        span = stride * (out_length - 1) + 1
        for j in range(kernel):
            # (F, C) · (B, F, L') -> (C, B, L')
            contrib = np.tensordot(weight[:, :, j], dy, axes=([0], [1]))
            dx[:, :, j : j + span : stride] += contrib.transpose(1, 0, 2)
        return dx, grads


class ReLU(Layer):
    kind = "relu"

    def infer_shape(self, in_shape: Shape) -> Shape:
        return in_shape

    def forward(
        self,
        params: Params,
        buffers: Params,
        x: np.ndarray,
        training: bool,
        rng: np.random.Generator,
    ) -> Tuple[np.ndarray, Cache, Params]:
        mask = x > 0
        return x * mask, {"mask": mask}, {}

    def backward(
        self, params: Params, cache: Cache, dy: np.ndarray
    ) -> Tuple[np.ndarray, Params]:
        return dy * cache["mask"], {}


class BatchNorm1D(Layer):
    """Normalizes each channel over the batch (and steps, for sequences)."""

    kind = "batchnorm1d"
    spec: BatchNorm1DSpec

    def infer_shape(self, in_shape: Shape) -> Shape:
        if len(in_shape) not in (1, 2):
            raise self.shape_error(
                f"expects (channels,) or (channels, steps), got {in_shape}"
            )
        return in_shape

    def param_shapes(self) -> Dict[str, Shape]:
        return {"gamma": (self.in_shape[0],), "beta": (self.in_shape[0],)}

    def buffer_shapes(self) -> Dict[str, Shape]:
        channels = self.in_shape[0]
        return {"running_mean": (channels,), "running_var": (channels,)}

    def init_params(self, rng: np.random.Generator) -> Params:
        channels = self.in_shape[0]
        return {"gamma": np.ones(channels), "beta": np.zeros(channels)}

    def init_buffers(self) -> Params:
        channels = self.in_shape[0]
        return {"running_mean": np.zeros(channels), "running_var": np.ones(channels)}

    def _axes(self, x: np.ndarray) -> Tuple[int, ...]:
        return (0,) if x.ndim == 2 else (0, 2)

    def _broadcast(self, v: np.ndarray, x: np.ndarray) -> np.ndarray:
        return v[None, :] if x.ndim == 2 else v[None, :, None]

    def forward(
        self,
        params: Params,
        buffers: Params,
        x: np.ndarray,
        training: bool,
        rng: np.random.Generator,
    ) -> Tuple[np.ndarray, Cache, Params]:
        axes = self._axes(x)
        if training:
            mean = x.mean(axis=axes)
            var = x.var(axis=axes)
            m = self.spec.momentum
            updates = {
                "running_mean": m * buffers["running_mean"] + (1 - m) * mean,
                "running_var": m * buffers["running_var"] + (1 - m) * var,
            }
        else:
            mean, var = buffers["running_mean"], buffers["running_var"]
            updates = {}
        inv_std = 1.0 / np.sqrt(var + self.spec.eps)
        x_hat = (x - self._broadcast(mean, x)) * self._broadcast(inv_std, x)
        y = self._broadcast(params["gamma"], x) * x_hat + self._broadcast(
            params["beta"], x
        )
        return y, {"x_hat": x_hat, "inv_std": inv_std}, updates

    def backward(
        self, params: Params, cache: Cache, dy: np.ndarray
    ) -> Tuple[np.ndarray, Params]:
        x_hat, inv_std = cache["x_hat"], cache["inv_std"]
        axes = self._axes(dy)
        n = dy.size // dy.shape[1]
        grads = {
            "gamma": (dy * x_hat).sum(axis=axes),
            "beta": dy.sum(axis=axes),
        }
        dx_hat = dy * self._broadcast(params["gamma"], dy)
        sum_dx_hat = self._broadcast(dx_hat.sum(axis=axes), dy)
        sum_dx_hat_x_hat = self._broadcast((dx_hat * x_hat).sum(axis=axes), dy)
        dx = (
            self._broadcast(inv_std, dy)
            / n
            * (n * dx_hat - sum_dx_hat - x_hat * sum_dx_hat_x_hat)
        )
        return dx, grads


class Dropout(Layer):
    """Inverted dropout: survivors are scaled by 1/(1 - rate) during training."""

    kind = "dropout"
    spec: DropoutSpec

    def infer_shape(self, in_shape: Shape) -> Shape:
        return in_shape

    def forward(
        self,
        params: Params,
        buffers: Params,
        x: np.ndarray,
        training: bool,
        rng: np.random.Generator,
    ) -> Tuple[np.ndarray, Cache, Params]:
        rate = self.spec.rate
        if not training or rate == 0.0:
            return x, {"mask": None}, {}
        mask = (rng.random(x.shape) >= rate).astype(x.dtype) / (1.0 - rate)
        return x * mask, {"mask": mask}, {}

    def backward(
        self, params: Params, cache: Cache, dy: np.ndarray
    ) -> Tuple[np.ndarray, Params]:
        if cache["mask"] is None:
            return dy, {}
        return dy * cache["mask"], {}


class Dense(Layer):
    """Affine map over features; sequences are mapped step by step."""

    kind = "dense"
    spec: DenseSpec

    def infer_shape(self, in_shape: Shape) -> Shape:
        if len(in_shape) == 1:
            return (self.spec.units,)
        if len(in_shape) == 2:
            return (self.spec.units, in_shape[1])
        raise self.shape_error(
            f"expects (features,) or (features, steps), got {in_shape}"
        )

    def param_shapes(self) -> Dict[str, Shape]:
        return {
            "weight": (self.in_shape[0], self.spec.units),
            "bias": (self.spec.units,),
        }

    def init_params(self, rng: np.random.Generator) -> Params:
        shapes = self.param_shapes()
        return {
            "weight": he_uniform(rng, shapes["weight"], self.in_shape[0]),
            "bias": np.zeros(shapes["bias"]),
        }

    def forward(
        self,
        params: Params,
        buffers: Params,
        x: np.ndarray,
        training: bool,
        rng: np.random.Generator,
    ) -> Tuple[np.ndarray, Cache, Params]:
        if x.ndim == 2:
            y = x @ params["weight"] + params["bias"]
        else:
            y = np.einsum("bft,fu->but", x, params["weight"]) + params["bias"][:, None]
        return y, {"x": x}, {}

    def backward(
        self, params: Params, cache: Cache, dy: np.ndarray
    ) -> Tuple[np.ndarray, Params]:
        x = cache["x"]
        if x.ndim == 2:
            grads = {"weight": x.T @ dy, "bias": dy.sum(axis=0)}
            return dy @ params["weight"].T, grads
        grads = {
            "weight": np.einsum("bft,but->fu", x, dy),
            "bias": dy.sum(axis=(0, 2)),
        }
        return np.einsum("but,fu->bft", dy, params["weight"]), grads


class LSTM(Layer):
    """
    Single LSTM layer, gates ordered input, forget, candidate, output.

    Consumes (features, steps); emits (units, steps) with return_sequences,
    otherwise the last hidden state (units,).
    """

    kind = "lstm"
    spec: LSTMSpec

    def infer_shape(self, in_shape: Shape) -> Shape:
        if len(in_shape) != 2:
            raise self.shape_error(f"expects (features, steps), got {in_shape}")
        if self.spec.return_sequences:
            return (self.spec.units, in_shape[1])
        return (self.spec.units,)

    def param_shapes(self) -> Dict[str, Shape]:
        units = self.spec.units
        return {
            "kernel": (self.in_shape[0], 4 * units),
            "recurrent": (units, 4 * units),
            "bias": (4 * units,),
        }

    def init_params(self, rng: np.random.Generator) -> Params:
        units, features = self.spec.units, self.in_shape[0]
        bias = np.zeros(4 * units)
        bias[units : 2 * units] = 1.0
        return {
            "kernel": glorot_uniform(rng, (features, 4 * units), features, 4 * units),
            "recurrent": glorot_uniform(rng, (units, 4 * units), units, 4 * units),
            "bias": bias,
        }

    def forward(
        self,
        params: Params,
        buffers: Params,
        x: np.ndarray,
        training: bool,
        rng: np.random.Generator,
    ) -> Tuple[np.ndarray, Cache, Params]:
        batch, _, steps = x.shape
        units = self.spec.units
        projected = np.einsum("bft,fg->btg", x, params["kernel"]) + params["bias"]
        h = np.zeros((batch, units), dtype=x.dtype)
        c = np.zeros((batch, units), dtype=x.dtype)
        gates = np.empty((steps, 4, batch, units), dtype=x.dtype)
        cells = np.empty((steps + 1, batch, units), dtype=x.dtype)
        hidden = np.empty((steps + 1, batch, units), dtype=x.dtype)
        cells[0], hidden[0] = c, h
        for t in range(steps):
            z = projected[:, t] + h @ params["recurrent"]
            i = sigmoid(z[:, :units])
            f = sigmoid(z[:, units : 2 * units])
            g = np.tanh(z[:, 2 * units : 3 * units])
            o = sigmoid(z[:, 3 * units :])
            c = f * c + i * g
            h = o * np.tanh(c)
            gates[t] = (i, f, g, o)
            cells[t + 1], hidden[t + 1] = c, h
        if self.spec.return_sequences:
            y = hidden[1:].transpose(1, 2, 0)
        else:
            y = hidden[-1]
        cache = {"x": x, "gates": gates, "cells": cells, "hidden": hidden}
        return np.ascontiguousarray(y), cache, {}

    def backward(
        self, params: Params, cache: Cache, dy: np.ndarray
    ) -> Tuple[np.ndarray, Params]:
        x, gates = cache["x"], cache["gates"]
        cells, hidden = cache["cells"], cache["hidden"]
        steps = gates.shape[0]
        recurrent = params["recurrent"]
        d_projected = np.empty((x.shape[0], steps, 4 * self.spec.units), dtype=dy.dtype)
        d_recurrent = np.zeros_like(recurrent)
        dh_next = np.zeros_like(hidden[0])
        dc_next = np.zeros_like(cells[0])
        if not self.spec.return_sequences:
            dh_next = dh_next + dy
        for t in reversed(range(steps)):
            i, f, g, o = gates[t]
            dh = dh_next + (dy[:, :, t] if self.spec.return_sequences else 0.0)
            tanh_c = np.tanh(cells[t + 1])
            dc = dc_next + dh * o * (1.0 - tanh_c**2)
            dz = np.concatenate(
                [
                    dc * g * i * (1.0 - i),
                    dc * cells[t] * f * (1.0 - f),
                    dc * i * (1.0 - g**2),
                    dh * tanh_c * o * (1.0 - o),
                ],
                axis=1,
            )
            d_projected[:, t] = dz
            d_recurrent += hidden[t].T @ dz
            dh_next = dz @ recurrent.T
            dc_next = dc * f
        grads = {
            "kernel": np.einsum("bft,btg->fg", x, d_projected),
            "recurrent": d_recurrent,
            "bias": d_projected.sum(axis=(0, 1)),
        }
        dx = np.einsum("btg,fg->bft", d_projected, params["kernel"])
        return dx, grads


class Flatten(Layer):
    kind = "flatten"

    def infer_shape(self, in_shape: Shape) -> Shape:
        return (int(np.prod(in_shape)),)

    def forward(
        self,
        params: Params,
        buffers: Params,
        x: np.ndarray,
        training: bool,
        rng: np.random.Generator,
    ) -> Tuple[np.ndarray, Cache, Params]:
        return x.reshape(x.shape[0], -1), {"x_shape": x.shape}, {}

    def backward(
        self, params: Params, cache: Cache, dy: np.ndarray
    ) -> Tuple[np.ndarray, Params]:
        return dy.reshape(cache["x_shape"]), {}


class Softmax(Layer):
    """
    Row-wise softmax. backward takes the gradient with respect to the
    probabilities; the fused cross-entropy path skips this layer entirely.
    """

    kind = "softmax"

    def infer_shape(self, in_shape: Shape) -> Shape:
        if len(in_shape) != 1:
            raise self.shape_error(f"expects (classes,), got {in_shape}")
        return in_shape

    def forward(
        self,
        params: Params,
        buffers: Params,
        x: np.ndarray,
        training: bool,
        rng: np.random.Generator,
    ) -> Tuple[np.ndarray, Cache, Params]:
        shifted = x - x.max(axis=1, keepdims=True)
        e = np.exp(shifted)
        probs = e / e.sum(axis=1, keepdims=True)
        return probs, {"probs": probs}, {}

    def backward(
        self, params: Params, cache: Cache, dy: np.ndarray
    ) -> Tuple[np.ndarray, Params]:
        p = cache["probs"]
        return p * (dy - (dy * p).sum(axis=1, keepdims=True)), {}


LAYER_TYPES: Dict[type, type[Layer]] = {
    Conv1DSpec: Conv1D,
    ReLUSpec: ReLU,
    BatchNorm1DSpec: BatchNorm1D,
    DropoutSpec: Dropout,
    DenseSpec: Dense,
    LSTMSpec: LSTM,
    FlattenSpec: Flatten,
    SoftmaxSpec: Softmax,
}


def build_layer(spec: LayerSpec, index: int, in_shape: Shape) -> Layer:
    return LAYER_TYPES[type(spec)](spec, index, in_shape)
