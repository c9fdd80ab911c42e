from pathlib import Path

import numpy as np
import pytest

from wav2emo.dsp import FrontendConfig, PreprocessConfig, featurize
from wav2emo.errors import ConfigError, ParseError, ShapeError
from wav2emo.nn import (
    ArrayDataset,
    Checkpoint,
    TrainConfig,
    accuracy,
    dump_checkpoint,
    init_parameters,
    load_arch,
    load_checkpoint,
    parse_checkpoint,
    predict,
    predict_batch,
    save_checkpoint,
    synthetic_tone_corpus,
    train,
)
from wav2emo.utils import dump_model_container

MOCK = Path(__file__).parent / "mock"


@pytest.fixture
def overfit_set() -> ArrayDataset:
    # two classes with opposite offsets
    rng = np.random.default_rng(0)
    labels = np.arange(16) % 2
    offsets = np.where(labels == 0, 1.0, -1.0)[:, None, None]
    inputs = offsets + 0.3 * rng.normal(size=(16, 1, 32))
    return ArrayDataset(inputs=inputs, labels=labels)


def _fixed_head(bias: np.ndarray) -> Checkpoint:
    arch = load_arch(MOCK / "dense_tiny.json")
    ckpt = init_parameters(arch, 0)
    parameters = {
        name: np.zeros_like(value) for name, value in ckpt.parameters.items()
    }
    parameters["02.dense.bias"] = bias.astype(np.float32)
    return ckpt.model_copy(update={"parameters": parameters})


def test_history_length(overfit_set: ArrayDataset) -> None:
    cfg = TrainConfig(epochs=3, seed=0)
    ckpt, history = train(load_arch("cnn-toy"), cfg, overfit_set, overfit_set)
    assert len(history) == 3
    assert [record.epoch for record in history.epochs] == [1, 2, 3]
    assert all(record.valid_accuracy is not None for record in history.epochs)
    assert ckpt.optimizer_state.step == 3 * 2
    assert ckpt.rng_state["bit_generator"] == "PCG64"


def test_training_is_deterministic(overfit_set: ArrayDataset) -> None:
    cfg = TrainConfig(epochs=4, seed=5)
    first, first_history = train(load_arch("cnn-toy"), cfg, overfit_set)
    second, second_history = train(load_arch("cnn-toy"), cfg, overfit_set)
    assert dump_checkpoint(first) == dump_checkpoint(second)
    assert first_history.losses == second_history.losses


def test_overfits_toy_set(overfit_set: ArrayDataset) -> None:
    cfg = TrainConfig(epochs=200, seed=0)
    ckpt, history = train(load_arch("cnn-toy"), cfg, overfit_set)
    assert accuracy(ckpt, overfit_set) == 100.0
    losses = history.losses
    assert np.mean(losses[-20:]) < np.mean(losses[:20])
    starts = range(50, len(losses) - 19, 20)
    peaks = [max(losses[start : start + 20]) for start in starts]
    for earlier, later in zip(peaks, peaks[1:]):
        assert later <= earlier + 1e-2


def test_empty_validation_set_is_skipped(overfit_set: ArrayDataset) -> None:
    empty = ArrayDataset(inputs=np.zeros((0, 1, 32)), labels=np.zeros(0, dtype=int))
    _, history = train(load_arch("cnn-toy"), TrainConfig(epochs=2), overfit_set, empty)
    assert [record.valid_accuracy for record in history.epochs] == [None, None]


def test_training_errors(overfit_set: ArrayDataset) -> None:
    empty = ArrayDataset(inputs=np.zeros((0, 1, 32)), labels=np.zeros(0, dtype=int))
    with pytest.raises(ConfigError):
        train(load_arch("cnn-toy"), TrainConfig(epochs=1), empty)
    with pytest.raises(ShapeError):
        train(load_arch("lstm-toy"), TrainConfig(epochs=1), overfit_set)


def test_prediction_ties_go_to_lowest_class() -> None:
    ckpt = _fixed_head(np.zeros(3))
    label, probs = predict(ckpt, np.ones((2, 3)))
    assert label == 0
    assert probs == pytest.approx([1 / 3] * 3)


def test_prediction_picks_most_probable() -> None:
    ckpt = _fixed_head(np.log(np.array([0.1, 0.7, 0.2])))
    labels, probs = predict_batch(ckpt, np.zeros((5, 2, 3)), batch_size=2)
    assert labels.tolist() == [1] * 5
    assert probs[0] == pytest.approx([0.1, 0.7, 0.2], abs=1e-6)
    with pytest.raises(ShapeError):
        predict(ckpt, np.zeros((1, 2, 3)))


def test_checkpoint_round_trip(tmp_path: Path, overfit_set: ArrayDataset) -> None:
    ckpt, _ = train(load_arch("cnn-toy"), TrainConfig(epochs=2), overfit_set)
    ckpt = ckpt.model_copy(update={"metadata": {"labels": ["calm", "angry"]}})
    data = dump_checkpoint(ckpt)
    loaded = parse_checkpoint(data)
    assert dump_checkpoint(loaded) == data
    assert loaded.labels == ["calm", "angry"]
    assert loaded.rng_state == ckpt.rng_state
    assert loaded.optimizer_state.step == ckpt.optimizer_state.step
    for name, value in ckpt.parameters.items():
        assert np.array_equal(loaded.parameters[name], value)

    path = tmp_path / "models" / "cnn-toy.serm"
    save_checkpoint(ckpt, path)
    assert dump_checkpoint(load_checkpoint(path)) == data
    labels, _ = predict_batch(load_checkpoint(path), overfit_set.inputs)
    assert labels.tolist() == predict_batch(ckpt, overfit_set.inputs)[0].tolist()


def test_checkpoint_errors(tmp_path: Path) -> None:
    with pytest.raises(ConfigError, match="not found"):
        load_checkpoint(tmp_path / "missing.serm")
    with pytest.raises(ParseError, match="not a network checkpoint"):
        parse_checkpoint(dump_model_container({"kind": "classical"}, {}))
    data = dump_checkpoint(init_parameters(load_arch("cnn-toy"), 0))
    with pytest.raises(ParseError):
        parse_checkpoint(data[:-4])
    with pytest.raises(ParseError):
        parse_checkpoint(b"SERX" + data[4:])


@pytest.mark.slow
def test_learns_synthetic_tones() -> None:
    clips, labels = synthetic_tone_corpus(clips_per_class=200, seed=0)
    cfg = FrontendConfig(preprocess=PreprocessConfig(target_seconds=1.0))
    inputs = np.stack([featurize(clip, "raw", cfg) for clip in clips])
    held_out = np.arange(len(labels)) % 5 == 0
    train_set = ArrayDataset(inputs=inputs[~held_out], labels=labels[~held_out])
    test_set = ArrayDataset(inputs=inputs[held_out], labels=labels[held_out])
    ckpt, _ = train(load_arch("cnn-small"), TrainConfig(epochs=30), train_set)
    assert accuracy(ckpt, test_set) >= 95.0
