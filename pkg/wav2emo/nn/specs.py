import json
import logging
from importlib import resources
from pathlib import Path
from typing import Annotated, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from wav2emo.errors import ConfigError, describe_validation_error

logger = logging.getLogger(__name__)

InputKind = Literal["raw6s", "mfcc", "logmel"]

# (channels, length) of each input kind at 16 kHz with the default frontends:
# 6 s of samples, 248 MFCC frames of 2.5 s, 598 log-mel frames of 6 s.
DEFAULT_INPUT_SHAPES: Dict[str, List[int]] = {
    "raw6s": [1, 96000],
    "mfcc": [40, 248],
    "logmel": [128, 598],
}

DEFAULT_EPOCHS: Dict[str, int] = {"cnn": 500, "lstm": 80, "cnn-lstm": 200}


class _Spec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class Conv1DSpec(_Spec):
    type: Literal["conv1d"] = "conv1d"
    filters: int = Field(ge=1, description="Output channels")
    kernel: int = Field(default=5, ge=1, description="Taps per filter")
    stride: int = Field(default=1, ge=1, description="Step between windows")
    padding: Literal["valid"] = Field(default="valid", description="No padding")


class ReLUSpec(_Spec):
    type: Literal["relu"] = "relu"


class BatchNorm1DSpec(_Spec):
    type: Literal["batchnorm1d"] = "batchnorm1d"
    momentum: float = Field(
        default=0.9, ge=0.0, lt=1.0, description="Weight of the old running stats"
    )
    eps: float = Field(default=1e-5, gt=0.0, description="Variance floor")


class DropoutSpec(_Spec):
    type: Literal["dropout"] = "dropout"
    rate: float = Field(default=0.25, ge=0.0, lt=1.0, description="Drop probability")


class DenseSpec(_Spec):
    type: Literal["dense"] = "dense"
    units: int = Field(ge=1, description="Output features")


class LSTMSpec(_Spec):
    type: Literal["lstm"] = "lstm"
    units: int = Field(ge=1, description="Hidden state size")
    return_sequences: bool = Field(
        default=False, description="Emit every step instead of the last one"
    )


class FlattenSpec(_Spec):
    type: Literal["flatten"] = "flatten"


class SoftmaxSpec(_Spec):
    type: Literal["softmax"] = "softmax"


LayerSpec = Annotated[
    Union[
        Conv1DSpec,
        ReLUSpec,
        BatchNorm1DSpec,
        DropoutSpec,
        DenseSpec,
        LSTMSpec,
        FlattenSpec,
        SoftmaxSpec,
    ],
    Field(discriminator="type"),
]


class ArchConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    schema_version: Literal[1] = Field(default=1, description="ArchConfig schema")
    name: str = Field(description="Architecture name, e.g. cnn, lstm, cnn-lstm")
    input: InputKind = Field(description="Which frontend feeds the network")
    input_shape: Optional[List[int]] = Field(
        default=None,
        description="(channels, length) per sample; the input kind's default if unset",
    )
    layers: List[LayerSpec] = Field(description="Ordered layers")
    n_classes: int = Field(ge=2, description="Number of emotion classes")

    @model_validator(mode="after")
    def ensure_softmax_head(self) -> "ArchConfig":
        if len(self.layers) < 2 or not isinstance(self.layers[-1], SoftmaxSpec):
            raise ValueError("last layer must be softmax")
        head = self.layers[-2]
        if not isinstance(head, DenseSpec) or head.units != self.n_classes:
            raise ValueError(f"softmax must follow dense with {self.n_classes} units")
        if self.input_shape is not None and (
            len(self.input_shape) != 2 or min(self.input_shape) < 1
        ):
            raise ValueError("input_shape must be two positive integers")
        return self

    @property
    def resolved_input_shape(self) -> List[int]:
        if self.input_shape is not None:
            return list(self.input_shape)
        return list(DEFAULT_INPUT_SHAPES[self.input])

    def with_input_shape(self, shape: List[int]) -> "ArchConfig":
        return self.model_copy(update={"input_shape": list(shape)})

    def with_classes(self, n_classes: int) -> "ArchConfig":
        """Resize the dense head feeding softmax."""
        layers = list(self.layers)
        layers[-2] = DenseSpec(units=n_classes)
        return ArchConfig.model_validate(
            {**self.model_dump(), "layers": layers, "n_classes": n_classes}
        )


class AdamConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    beta1: float = Field(default=0.9, gt=0.0, lt=1.0)
    beta2: float = Field(default=0.999, gt=0.0, lt=1.0)
    eps: float = Field(default=1e-8, gt=0.0)


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    learning_rate: float = Field(default=0.001, gt=0.0, description="Adam step size")
    epochs: int = Field(default=500, ge=1, description="Full passes over the data")
    batch_size: int = Field(default=8, ge=1, description="Samples per update")
    optimizer: AdamConfig = Field(default_factory=AdamConfig)
    seed: int = Field(default=0, ge=0, description="Initialization and shuffling")

    @classmethod
    def for_arch(cls, arch_name: str, **overrides: object) -> "TrainConfig":
        """Published defaults for the named architecture, then overrides."""
        values: Dict[str, object] = {"epochs": DEFAULT_EPOCHS.get(arch_name, 500)}
        values.update(overrides)
        return cls.model_validate(values)


def parse_arch(text: str) -> ArchConfig:
    try:
        return ArchConfig.model_validate_json(text)
    except ValidationError as e:
        message = describe_validation_error(e)
        raise ConfigError(f"invalid architecture: {message}") from e


def load_arch(name_or_path: Union[str, Path]) -> ArchConfig:
    """
    Load an ArchConfig by path, or by the name of a bundled architecture
    (cnn, lstm, cnn-lstm and their toy variants).
    """
    path = Path(name_or_path)
    if path.suffix == ".json" or path.exists():
        if not path.exists():
            raise ConfigError(f"architecture file {path} not found")
        return parse_arch(path.read_text(encoding="utf-8"))
    bundled = resources.files("wav2emo.nn") / "architectures"
    candidate = bundled / f"{str(name_or_path).replace('-', '_')}.json"
    if not candidate.is_file():
        available = sorted(
            p.name.removesuffix(".json") for p in bundled.iterdir() if p.is_file()
        )
        raise ConfigError(f"unknown architecture {name_or_path!r}; have {available}")
    return parse_arch(candidate.read_text(encoding="utf-8"))


def dump_arch(arch: ArchConfig) -> str:
    return json.dumps(arch.model_dump(mode="json"), indent=2) + "\n"
