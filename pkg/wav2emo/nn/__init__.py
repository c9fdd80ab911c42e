from .checkpoint_io import (
    dump_checkpoint,
    load_checkpoint,
    parse_checkpoint,
    save_checkpoint,
)
from .gradcheck import gradient_check, relative_error
from .layers import LAYER_TYPES, Layer, build_layer
from .losses import cross_entropy_loss
from .network import (
    AdamState,
    Checkpoint,
    ForwardCache,
    backward,
    build_layers,
    forward,
    init_parameters,
    parameter_count,
    parameter_shapes,
)
from .optim import adam_step
from .specs import (
    DEFAULT_EPOCHS,
    DEFAULT_INPUT_SHAPES,
    AdamConfig,
    ArchConfig,
    BatchNorm1DSpec,
    Conv1DSpec,
    DenseSpec,
    DropoutSpec,
    FlattenSpec,
    LayerSpec,
    LSTMSpec,
    ReLUSpec,
    SoftmaxSpec,
    TrainConfig,
    dump_arch,
    load_arch,
    parse_arch,
)
from .synthetic import synthetic_tone_corpus
from .training import (
    ArrayDataset,
    EpochRecord,
    History,
    accuracy,
    predict,
    predict_batch,
    train,
)

__all__ = [
    "DEFAULT_EPOCHS",
    "DEFAULT_INPUT_SHAPES",
    "LAYER_TYPES",
    "AdamConfig",
    "AdamState",
    "ArchConfig",
    "ArrayDataset",
    "BatchNorm1DSpec",
    "Checkpoint",
    "Conv1DSpec",
    "DenseSpec",
    "DropoutSpec",
    "EpochRecord",
    "FlattenSpec",
    "ForwardCache",
    "History",
    "LSTMSpec",
    "Layer",
    "LayerSpec",
    "ReLUSpec",
    "SoftmaxSpec",
    "TrainConfig",
    "accuracy",
    "adam_step",
    "backward",
    "build_layer",
    "build_layers",
    "cross_entropy_loss",
    "dump_arch",
    "dump_checkpoint",
    "forward",
    "gradient_check",
    "init_parameters",
    "load_arch",
    "load_checkpoint",
    "parameter_count",
    "parameter_shapes",
    "parse_arch",
    "parse_checkpoint",
    "predict",
    "predict_batch",
    "relative_error",
    "save_checkpoint",
    "synthetic_tone_corpus",
    "train",
]
