from pathlib import Path

import pytest
from pydantic import ValidationError

from wav2emo.errors import ConfigError
from wav2emo.nn import (
    DEFAULT_EPOCHS,
    ArchConfig,
    DenseSpec,
    SoftmaxSpec,
    TrainConfig,
    dump_arch,
    load_arch,
    parameter_count,
    parameter_shapes,
    parse_arch,
)

MOCK = Path(__file__).parent / "mock"


def test_bundled_architectures() -> None:
    for name in ("cnn", "lstm", "cnn-lstm", "cnn-toy", "lstm-toy", "cnn-lstm-toy"):
        arch = load_arch(name)
        assert arch.name == name
        assert isinstance(arch.layers[-1], SoftmaxSpec)
        assert isinstance(arch.layers[-2], DenseSpec)
    assert load_arch("cnn").resolved_input_shape == [1, 96000]
    assert load_arch("lstm").resolved_input_shape == [40, 248]
    assert load_arch("cnn-lstm").resolved_input_shape == [128, 598]


def test_load_arch_by_path() -> None:
    arch = load_arch(MOCK / "dense_tiny.json")
    assert arch.name == "dense-tiny"
    assert parameter_shapes(arch) == {
        "01.dense.weight": (6, 4),
        "01.dense.bias": (4,),
        "02.dense.weight": (4, 3),
        "02.dense.bias": (3,),
    }
    assert parameter_count(arch) == 6 * 4 + 4 + 4 * 3 + 3


def test_load_arch_errors(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match="unknown architecture"):
        load_arch("transformer")
    with pytest.raises(ConfigError, match="not found"):
        load_arch(tmp_path / "missing.json")
    with pytest.raises(ConfigError, match="invalid architecture"):
        parse_arch('{"name": "x", "input": "mfcc", "layers": [], "n_classes": 2}')


def test_softmax_head_is_required() -> None:
    base = (MOCK / "dense_tiny.json").read_text()
    with pytest.raises(ConfigError, match="softmax"):
        parse_arch(base.replace('"n_classes": 3', '"n_classes": 4'))
    with pytest.raises(ValidationError):
        ArchConfig(
            name="no-head",
            input="mfcc",
            layers=[DenseSpec(units=2)],
            n_classes=2,
        )


def test_dump_arch_round_trip() -> None:
    arch = load_arch("cnn-lstm-toy")
    assert parse_arch(dump_arch(arch)) == arch


def test_with_classes() -> None:
    arch = load_arch("cnn").with_classes(6)
    assert arch.n_classes == 6
    assert arch.layers[-2] == DenseSpec(units=6)
    assert parameter_shapes(arch)[f"{len(arch.layers) - 2:02d}.dense.weight"][1] == 6


def test_train_config_defaults() -> None:
    cfg = TrainConfig()
    assert cfg.learning_rate == 0.001
    assert cfg.epochs == 500
    assert cfg.batch_size == 8
    assert cfg.optimizer.beta1 == 0.9
    assert cfg.optimizer.beta2 == 0.999
    assert DEFAULT_EPOCHS == {"cnn": 500, "lstm": 80, "cnn-lstm": 200}
    assert TrainConfig.for_arch("lstm").epochs == 80
    assert TrainConfig.for_arch("cnn-lstm", epochs=3, seed=4).epochs == 3
    assert TrainConfig.for_arch("cnn-toy").epochs == 500
    with pytest.raises(ValidationError):
        TrainConfig(learning_rate=0.0)
