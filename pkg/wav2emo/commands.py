"""
Subcommand bodies. Each takes the merged CliConfig plus its positional inputs,
prints its user-facing result to stdout and raises a UserError subclass when
the input is at fault.
"""

import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from wav2emo.audio import (
    DatasetManifest,
    DataSplit,
    Waveform,
    load_waveform,
    read_manifest,
    render_distribution,
    scan_corpus,
    split_by_speaker,
    split_stratified,
    write_manifest,
)
from wav2emo.classical import Classifier, dump_classifier, parse_classifier
from wav2emo.config import CliConfig
from wav2emo.dsp import FrontendConfig, extract, write_features
from wav2emo.errors import (
    ConfigError,
    EmptyCorpus,
    LabelError,
    ShapeError,
    Wav2EmoError,
)
from wav2emo.evaluation import (
    ExperimentResult,
    ResultsDocument,
    load_grid_config,
    render_confusion_csv,
    render_json,
    render_report,
    run_experiment_grid,
    write_report,
)
from wav2emo.evaluation.pipeline import (
    INPUT_FRONTENDS,
    LoadedDataset,
    adapt_arch,
    classical_features,
    fit_classical,
    fit_network,
    load_dataset,
    match_inputs,
    network_inputs,
    score,
    split_arrays,
)
from wav2emo.nn import (
    Checkpoint,
    TrainConfig,
    dump_checkpoint,
    load_arch,
    parse_checkpoint,
    predict_batch,
)
from wav2emo.selftest import run_selftest
from wav2emo.utils import content_hash, load_model_container

logger = logging.getLogger(__name__)

INDEX_FILE = "index.json"


def _read_manifest(path: Union[str, Path]) -> DatasetManifest:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"manifest {path} not found")
    return read_manifest(path)


def _split(dataset: LoadedDataset, mode: str, ratio: float, seed: int) -> DataSplit:
    if mode == "by-speaker":
        return split_by_speaker(dataset.manifest, ratio, seed)
    return split_stratified(dataset.manifest, ratio, seed)


@dataclass
class TrainedModel:
    """A network checkpoint or a classical classifier read from a SERM file."""

    name: str
    metadata: Dict[str, Any]
    checkpoint: Optional[Checkpoint] = None
    classifier: Optional[Classifier] = None

    @property
    def labels(self) -> List[str]:
        return list(self.metadata.get("labels", []))

    @property
    def frontend(self) -> str:
        if "frontend" in self.metadata:
            return str(self.metadata["frontend"])
        if self.checkpoint is not None:
            return INPUT_FRONTENDS[self.checkpoint.arch.input]
        return "mfcc"

    @property
    def features(self) -> FrontendConfig:
        return FrontendConfig.model_validate(self.metadata.get("features", {}))

    def inputs(self, waveforms: List[Waveform]) -> np.ndarray:
        if self.checkpoint is None:
            return classical_features(waveforms, self.frontend, self.features)
        X = match_inputs(
            network_inputs(waveforms, self.frontend, self.features),
            self.checkpoint.arch,
        )
        expected = tuple(self.checkpoint.arch.resolved_input_shape)
        if X.shape[1:] != expected:
            raise ShapeError(
                f"{self.frontend} inputs have shape {X.shape[1:]}, model {self.name} "
                f"expects {expected}"
            )
        return X

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Probabilities over every label id, (samples, labels)."""
        if self.checkpoint is not None:
            return predict_batch(self.checkpoint, X)[1]
        assert self.classifier is not None
        proba = self.classifier.predict_proba(X)
        full = np.zeros((X.shape[0], max(len(self.labels), proba.shape[1])))
        full[:, self.classifier.classes_.astype(int)] = proba
        return full

    def predict(self, X: np.ndarray) -> np.ndarray:
        if self.classifier is not None:
            return self.classifier.predict(X).astype(int)
        return self.predict_proba(X).argmax(axis=1)


def parse_model(data: bytes) -> TrainedModel:
    header, _ = load_model_container(data)
    if header.get("kind") == "classical":
        clf, metadata = parse_classifier(data)
        return TrainedModel(
            name=str(header["method"]), metadata=metadata, classifier=clf
        )
    ckpt = parse_checkpoint(data)
    return TrainedModel(name=ckpt.arch.name, metadata=ckpt.metadata, checkpoint=ckpt)


def load_model(path: Union[str, Path]) -> TrainedModel:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"model file {path} not found")
    return parse_model(path.read_bytes())


def cmd_scan(
    root: Union[str, Path], convention: str, out_manifest: Union[str, Path]
) -> DatasetManifest:
    manifest = scan_corpus(root, convention)
    write_manifest(manifest, out_manifest)
    print(render_distribution({Path(root).name or str(root): manifest}))
    return manifest


def cmd_extract(
    cfg: CliConfig, manifest_path: Union[str, Path], out_dir: Union[str, Path]
) -> Dict[str, Dict[str, str]]:
    """
    One SERF file per manifest entry, named by the hash of the audio bytes and
    the frontend settings. `index.json` maps entry paths to their files; entries
    whose file already exists are skipped.
    """
    frontend = cfg.frontend or "mfcc"
    if frontend == "raw":
        raise ConfigError("extract writes mfcc or logmel features, not raw audio")
    manifest = _read_manifest(manifest_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    settings = cfg.features.model_dump(mode="json")

    index: Dict[str, Dict[str, str]] = {}
    written = skipped = failed = 0
    for entry in manifest.entries:
        source = manifest.resolve(entry)
        try:
            digest = content_hash(source.read_bytes(), frontend, settings)
            target = out_dir / f"{digest[:20]}.serf"
            if target.is_file():
                skipped += 1
            else:
                fm = extract(load_waveform(source), frontend, cfg.features)
                write_features(fm, target)
                written += 1
        except (Wav2EmoError, OSError) as e:
            logger.warning(f"Warning: could not extract {entry.path}: {e}")
            failed += 1
            continue
        index[entry.path] = {
            "file": target.name,
            "hash": digest,
            "label": entry.label.name,
            "speaker": entry.speaker,
        }
    if not index:
        raise EmptyCorpus(f"no features extracted from {manifest_path}")
    (out_dir / INDEX_FILE).write_text(
        json.dumps(index, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"{written} written, {skipped} up to date, {failed} failed")
    return index


def cmd_train(
    cfg: CliConfig,
    manifest_path: Union[str, Path],
    out: Union[str, Path],
    history_path: Optional[Union[str, Path]] = None,
) -> ExperimentResult:
    """
    Split, fit a network (`arch`) or a classical method (`method`), save it
    and print its test accuracy. The score comes from the model as parsed back
    from the saved bytes, so `eval` on the same split reproduces it exactly.
    """
    if (cfg.arch is None) == (cfg.method is None):
        raise ConfigError("train needs exactly one of --arch or --method")
    started = time.perf_counter()
    seed = cfg.resolved_seed
    manifest_path = Path(manifest_path)
    dataset = load_dataset(_read_manifest(manifest_path), progress=cfg.verbose)
    split = _split(dataset, cfg.split, cfg.ratio, seed)
    train_rows, test_rows = split_arrays(dataset, split)
    labels = dataset.manifest.label_ids()
    names = dataset.manifest.label_names
    metadata: Dict[str, Any] = {
        "labels": names,
        "split": cfg.split,
        "ratio": cfg.ratio,
        "seed": seed,
        "features": cfg.features.model_dump(mode="json"),
    }

    if cfg.method is not None:
        frontend = cfg.frontend or "mfcc"
        metadata["frontend"] = frontend
        X = classical_features(dataset.waveforms, frontend, cfg.features)
        clf = fit_classical(
            cfg.method, X[train_rows], labels[train_rows], seed, n_jobs=cfg.threads
        )
        data = dump_classifier(clf, cfg.method, metadata)
    else:
        assert cfg.arch is not None
        arch = load_arch(cfg.arch)
        frontend = cfg.frontend or INPUT_FRONTENDS[arch.input]
        metadata["frontend"] = frontend
        X = network_inputs(dataset.waveforms, frontend, cfg.features)
        arch = adapt_arch(arch, frontend, X.shape[1:], dataset.manifest.n_classes)
        X = match_inputs(X, arch)
        train_cfg = TrainConfig.for_arch(arch.name, seed=seed, **cfg.train_overrides())
        ckpt, history = fit_network(
            arch,
            train_cfg,
            X[train_rows],
            labels[train_rows],
            names,
            X_valid=X[test_rows],
            y_valid=labels[test_rows],
        )
        ckpt = ckpt.model_copy(update={"metadata": {**ckpt.metadata, **metadata}})
        data = dump_checkpoint(ckpt)
        history_path = history_path or Path(out).with_suffix(".history.json")
        Path(history_path).write_text(
            history.model_dump_json(indent=2) + "\n", encoding="utf-8"
        )

    out = Path(out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_bytes(data)
    model = parse_model(data)
    result = score(
        manifest_path.stem,
        model.name,
        frontend,
        seed,
        model.predict(X[test_rows]),
        labels[test_rows],
        names,
        started,
    )
    logger.info(f"Saved {model.name} model to {out}")
    print(f"test accuracy: {result.accuracy:.2f}%")
    return result


def _check_labels(model: TrainedModel, manifest: DatasetManifest) -> None:
    if model.labels and model.labels != manifest.label_names:
        raise LabelError(
            f"model labels {model.labels} differ from manifest labels "
            f"{manifest.label_names}"
        )


def cmd_eval(
    cfg: CliConfig,
    model_path: Union[str, Path],
    manifest_path: Union[str, Path],
    out_dir: Union[str, Path],
) -> ExperimentResult:
    """
    Rebuild the training split from the model's metadata (an explicit seed wins)
    and score the model on its test part.
    """
    started = time.perf_counter()
    model = load_model(model_path)
    if cfg.frontend is not None and cfg.frontend != model.frontend:
        raise ShapeError(
            f"model {model.name} was trained on {model.frontend}, not {cfg.frontend}"
        )
    manifest_path = Path(manifest_path)
    manifest = _read_manifest(manifest_path)
    _check_labels(model, manifest)
    seed = cfg.seed if cfg.seed is not None else model.metadata.get("seed")
    if seed is None:
        seed = cfg.resolved_seed
    dataset = load_dataset(manifest, progress=cfg.verbose)
    split = _split(
        dataset,
        model.metadata.get("split", cfg.split),
        model.metadata.get("ratio", cfg.ratio),
        int(seed),
    )
    _, test_rows = split_arrays(dataset, split)
    X = model.inputs([dataset.waveforms[i] for i in test_rows])
    names = dataset.manifest.label_names
    result = score(
        manifest_path.stem,
        model.name,
        model.frontend,
        int(seed),
        model.predict(X),
        dataset.manifest.label_ids()[test_rows],
        names,
        started,
    )

    out_dir = Path(out_dir)
    (out_dir / "confusion").mkdir(parents=True, exist_ok=True)
    document = ResultsDocument(results=[result])
    (out_dir / "results.json").write_text(render_json(document), encoding="utf-8")
    confusion_path = out_dir / "confusion" / f"{result.dataset}__{result.method}.csv"
    confusion_path.write_text(render_confusion_csv(result), encoding="utf-8")
    print(f"test accuracy: {result.accuracy:.2f}%")
    return result


def cmd_predict(
    cfg: CliConfig, model_path: Union[str, Path], files: List[str]
) -> List[Tuple[str, str, np.ndarray]]:
    """Print the most likely emotion and every label's probability per file."""
    model = load_model(model_path)
    predictions: List[Tuple[str, str, np.ndarray]] = []
    for file in files:
        try:
            X = model.inputs([load_waveform(file)])
        except (Wav2EmoError, OSError) as e:
            logger.warning(f"Warning: skipping {file}: {e}")
            continue
        probs = model.predict_proba(X)[0]
        labels = model.labels or [str(i) for i in range(probs.size)]
        label = labels[int(model.predict(X)[0])]
        scores = " ".join(f"{name}={p:.4f}" for name, p in zip(labels, probs))
        print(f"{file}\t{label}\t{scores}")
        predictions.append((file, label, probs))
    if not predictions:
        raise EmptyCorpus("none of the given files could be read")
    return predictions


def cmd_grid(
    cfg: CliConfig, grid_path: Union[str, Path], out_dir: Union[str, Path]
) -> ResultsDocument:
    grid = load_grid_config(grid_path)
    if cfg.seed is not None:
        grid = grid.model_copy(update={"seed": cfg.seed})
    out_dir = Path(out_dir)
    document = run_experiment_grid(grid, out_dir=out_dir, threads=cfg.threads)
    report = render_report(
        document.results,
        document.failures,
        tables=grid.tables,
        datasets=list(grid.datasets),
    )
    write_report(report, out_dir)
    for text in report.tables.values():
        print(text)
    if document.failures:
        logger.warning(
            f"Warning: {len(document.failures)} cells failed; see failures.json"
        )
    return document


def cmd_selftest() -> bool:
    results = run_selftest()
    for result in results:
        print(f"{'PASS' if result.passed else 'FAIL'}  {result.name}: {result.detail}")
    passed = sum(result.passed for result in results)
    print(f"{passed}/{len(results)} checks passed")
    return passed == len(results)
