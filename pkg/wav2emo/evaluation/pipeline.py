"""
Steps shared by the grid and the train/eval/predict commands: loading a
manifest's audio, turning waveforms into classifier or network inputs, fitting
one method, and scoring predictions.
"""

import logging
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from tqdm import tqdm

from wav2emo.audio import DatasetManifest, DataSplit, Waveform, load_waveform
from wav2emo.audio.entities import CANONICAL_RATE
from wav2emo.classical import Classifier, build_classifier
from wav2emo.classical.factory import CLASSICAL_METHODS
from wav2emo.dsp import FrontendConfig, extract, featurize, summarize_mean
from wav2emo.errors import ConfigError, EmptyCorpus, Wav2EmoError
from wav2emo.evaluation.metrics import (
    accuracy_overall,
    confusion,
    per_class_accuracies,
    undefined_support,
)
from wav2emo.evaluation.results import ExperimentResult
from wav2emo.nn import (
    ArchConfig,
    ArrayDataset,
    Checkpoint,
    Conv1DSpec,
    LSTMSpec,
    TrainConfig,
    train,
)
from wav2emo.nn.specs import LayerSpec
from wav2emo.nn.training import History

logger = logging.getLogger(__name__)

FRONTEND_INPUTS: Dict[str, str] = {"raw": "raw6s", "mfcc": "mfcc", "logmel": "logmel"}
INPUT_FRONTENDS: Dict[str, str] = {kind: fe for fe, kind in FRONTEND_INPUTS.items()}
DEEP_METHODS: List[str] = ["cnn", "lstm", "cnn-lstm"]

# 25 ms frames at 16 kHz
RAW_FRAME = 400
RAW_CONV_STRIDE = 4
RAW_MIN_STEPS = 16


def is_classical(method: str) -> bool:
    return method in CLASSICAL_METHODS or method == "lr"


@dataclass
class LoadedDataset:
    manifest: DatasetManifest
    waveforms: List[Waveform]

    def indices(self, part: DatasetManifest) -> np.ndarray:
        """Positions of a split partition's entries in this dataset."""
        position = {entry.path: i for i, entry in enumerate(self.manifest.entries)}
        return np.array([position[entry.path] for entry in part.entries], dtype=int)


def load_dataset(
    manifest: DatasetManifest, target_rate: int = CANONICAL_RATE, progress: bool = False
) -> LoadedDataset:
    """
    Decode every entry; unreadable files are dropped with a warning.

    Raises:
        EmptyCorpus: If no entry could be read.
    """
    kept: List[int] = []
    waveforms: List[Waveform] = []
    entries = tqdm(manifest.entries, desc="Loading audio", disable=not progress)
    for index, entry in enumerate(entries):
        try:
            waveforms.append(load_waveform(manifest.resolve(entry), target_rate))
        except (Wav2EmoError, OSError) as e:
            logger.warning(f"Warning: skipping {entry.path}: {e}")
            continue
        kept.append(index)
    if not waveforms:
        raise EmptyCorpus("no readable audio in manifest")
    return LoadedDataset(manifest=manifest.subset(kept), waveforms=waveforms)


def classical_features(
    waveforms: List[Waveform], frontend: str, cfg: FrontendConfig
) -> np.ndarray:
    """Time-averaged feature vector per waveform, (samples, coefficients)."""
    if frontend == "raw":
        raise ConfigError("classical methods need the mfcc or logmel frontend")
    return np.vstack([summarize_mean(extract(w, frontend, cfg)) for w in waveforms])


def network_inputs(
    waveforms: List[Waveform], frontend: str, cfg: FrontendConfig
) -> np.ndarray:
    """Stacked network inputs, (samples, channels, length), float32."""
    if frontend not in FRONTEND_INPUTS:
        raise ConfigError(f"unknown frontend {frontend!r}")
    return np.stack([featurize(w, frontend, cfg) for w in waveforms]).astype(
        np.float32
    )


def _strided_for_raw(arch: ArchConfig, length: int) -> ArchConfig:
    layers: List[LayerSpec] = []
    for spec in arch.layers:
        if isinstance(spec, Conv1DSpec):
            raised = (length - spec.kernel) // RAW_CONV_STRIDE + 1
            if spec.stride < RAW_CONV_STRIDE and raised >= RAW_MIN_STEPS:
                spec = spec.model_copy(update={"stride": RAW_CONV_STRIDE})
            length = (length - spec.kernel) // spec.stride + 1
        layers.append(spec)
    return arch.model_copy(update={"layers": layers})


def fold_frames(X: np.ndarray, frame: int = RAW_FRAME) -> np.ndarray:
    """
    [N, 1, L] waveforms as [N, frame, L // frame] sequences of consecutive
    non-overlapping frames; trailing samples that fill no frame are dropped.
    """
    steps = X.shape[2] // frame
    folded = X[:, 0, : steps * frame].reshape(X.shape[0], steps, frame)
    return np.ascontiguousarray(folded.transpose(0, 2, 1))


def match_inputs(X: np.ndarray, arch: ArchConfig) -> np.ndarray:
    """Fold raw waveforms when the network reads them as a frame sequence."""
    channels, steps = arch.resolved_input_shape
    if X.shape[1:] != (channels, steps) and X.shape[1] == 1:
        if X.shape[2] // channels == steps:
            return fold_frames(X, channels)
    return X


def adapt_arch(
    arch: ArchConfig, frontend: str, sample_shape: Tuple[int, ...], n_classes: int
) -> ArchConfig:
    """
    Point an architecture at a frontend's sample shape and a label count.

    Raw waveforms are long: a network starting with an LSTM reads them as
    RAW_FRAME-sample frames, and convolutions get stride RAW_CONV_STRIDE while
    their output keeps at least RAW_MIN_STEPS positions.
    """
    shape = list(sample_shape)
    if frontend == "raw":
        if isinstance(arch.layers[0], LSTMSpec):
            shape = [RAW_FRAME, shape[1] // RAW_FRAME]
        else:
            arch = _strided_for_raw(arch, shape[1])
    adapted = arch.model_copy(
        update={"input": FRONTEND_INPUTS[frontend], "input_shape": shape}
    )
    if adapted.n_classes != n_classes:
        adapted = adapted.with_classes(n_classes)
    return ArchConfig.model_validate(adapted.model_dump())


def fit_classical(
    method: str, X: np.ndarray, y: np.ndarray, seed: int, n_jobs: int = 1
) -> Classifier:
    clf = build_classifier(method, seed=seed, n_jobs=n_jobs)
    return clf.fit(X, y)


def fit_network(
    arch: ArchConfig,
    cfg: TrainConfig,
    X: np.ndarray,
    y: np.ndarray,
    labels: List[str],
    X_valid: Optional[np.ndarray] = None,
    y_valid: Optional[np.ndarray] = None,
) -> Tuple[Checkpoint, History]:
    """Train a network; held-out rows, when given, are scored after every epoch."""
    valid = None
    if X_valid is not None and y_valid is not None:
        valid = ArrayDataset(inputs=X_valid, labels=y_valid)
    ckpt, history = train(arch, cfg, ArrayDataset(inputs=X, labels=y), valid)
    metadata = {**ckpt.metadata, "labels": labels}
    return ckpt.model_copy(update={"metadata": metadata}), history


def split_arrays(
    dataset: LoadedDataset, split: DataSplit
) -> Tuple[np.ndarray, np.ndarray]:
    return dataset.indices(split.train), dataset.indices(split.test)


def score(
    dataset_name: str,
    method: str,
    frontend: str,
    seed: int,
    preds: np.ndarray,
    truths: np.ndarray,
    labels: List[str],
    started: float,
    timing: bool = True,
) -> ExperimentResult:
    """Confusion matrix and accuracies of one cell."""
    cm = confusion(preds, truths, n_classes=len(labels), labels=labels)
    wall_ms = int(round(1000.0 * (time.perf_counter() - started))) if timing else 0
    return ExperimentResult(
        dataset=dataset_name,
        method=method,
        frontend=frontend,
        accuracy=accuracy_overall(cm),
        per_class_accuracy=per_class_accuracies(cm),
        confusion=cm,
        undefined_support=undefined_support(cm),
        wall_ms=wall_ms,
        seed=seed,
    )
