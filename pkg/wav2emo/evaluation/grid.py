import logging
import time
import tomllib
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from wav2emo.audio import (
    DatasetManifest,
    DataSplit,
    read_manifest,
    split_by_speaker,
    split_stratified,
)
from wav2emo.audio.corpus import manifest_to_csv
from wav2emo.classical import CLASSICAL_METHODS
from wav2emo.dsp import FrontendConfig
from wav2emo.errors import ConfigError, describe_validation_error
from wav2emo.evaluation.pipeline import (
    DEEP_METHODS,
    LoadedDataset,
    adapt_arch,
    classical_features,
    fit_classical,
    fit_network,
    is_classical,
    load_dataset,
    match_inputs,
    network_inputs,
    score,
    split_arrays,
)
from wav2emo.evaluation.results import CellFailure, ExperimentResult, ResultsDocument
from wav2emo.nn import TrainConfig, load_arch, predict_batch
from wav2emo.utils import content_hash, resolve_seed

logger = logging.getLogger(__name__)

Frontend = Literal["raw", "mfcc", "logmel"]


class TableSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    frontend: Frontend = Field(description="Input path of every cell in the table")
    methods: List[str] = Field(min_length=1, description="Columns, in order")
    title: Optional[str] = Field(default=None, description="Heading of the table")

    @property
    def family(self) -> str:
        return "classical" if all(is_classical(m) for m in self.methods) else "deep"


def default_tables() -> List[TableSpec]:
    """Classical x {mfcc, logmel}, then deep x {mfcc, logmel, raw}."""
    return [
        TableSpec(frontend="mfcc", methods=CLASSICAL_METHODS),
        TableSpec(frontend="logmel", methods=CLASSICAL_METHODS),
        TableSpec(frontend="mfcc", methods=DEEP_METHODS),
        TableSpec(frontend="logmel", methods=DEEP_METHODS),
        TableSpec(frontend="raw", methods=DEEP_METHODS),
    ]


class TrainOverrides(BaseModel):
    model_config = ConfigDict(extra="forbid")

    learning_rate: Optional[float] = Field(default=None, gt=0.0)
    epochs: Optional[int] = Field(default=None, ge=1)
    batch_size: Optional[int] = Field(default=None, ge=1)

    def apply(self, arch_name: str, seed: int) -> TrainConfig:
        values = {k: v for k, v in self.model_dump().items() if v is not None}
        return TrainConfig.for_arch(arch_name, seed=seed, **values)


class GridConfig(BaseModel):
    """Experiment matrix: datasets x tables of (frontend, methods)."""

    model_config = ConfigDict(extra="forbid")

    datasets: Dict[str, str] = Field(
        min_length=1, description="Dataset name to manifest CSV path"
    )
    tables: List[TableSpec] = Field(default_factory=default_tables)
    arch: Dict[str, str] = Field(
        default_factory=lambda: {m: m for m in DEEP_METHODS},
        description="Deep method name to architecture name or JSON path",
    )
    train: TrainOverrides = Field(default_factory=TrainOverrides)
    frontend: FrontendConfig = Field(default_factory=FrontendConfig)
    split: Literal["random", "by-speaker"] = Field(default="random")
    ratio: float = Field(default=0.8, gt=0.0, lt=1.0, description="Training share")
    seed: Optional[int] = Field(
        default=None, ge=0, description="Falls back to SER_SEED"
    )
    timing: bool = Field(default=True, description="Record wall time per cell")
    base_dir: Optional[str] = Field(
        default=None, description="Directory relative paths are resolved against"
    )

    @model_validator(mode="after")
    def ensure_methods_known(self) -> "GridConfig":
        for table in self.tables:
            for method in table.methods:
                if is_classical(method):
                    if table.frontend == "raw":
                        raise ValueError(
                            f"classical method {method} cannot use the raw frontend"
                        )
                elif method not in self.arch:
                    raise ValueError(f"method {method} has no architecture in [arch]")
        return self

    def resolve_path(self, value: str) -> Path:
        path = Path(value)
        if path.is_absolute() or self.base_dir is None:
            return path
        return Path(self.base_dir) / path

    @property
    def resolved_seed(self) -> int:
        return resolve_seed(self.seed)


def load_grid_config(path: Union[str, Path]) -> GridConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"grid config {path} not found")
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from e
    data.setdefault("base_dir", str(path.parent))
    try:
        return GridConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{path}: {describe_validation_error(e)}") from e


class _Cell(BaseModel):
    dataset: str
    frontend: Frontend
    method: str


def audio_digests(manifest: DatasetManifest) -> List[str]:
    """sha256 of every entry's audio bytes, "missing" for unreadable files."""
    digests: List[str] = []
    for entry in manifest.entries:
        try:
            digests.append(content_hash(manifest.resolve(entry).read_bytes()))
        except OSError:
            digests.append("missing")
    return digests


def _split(cfg: GridConfig, dataset: LoadedDataset, seed: int) -> DataSplit:
    if cfg.split == "by-speaker":
        return split_by_speaker(dataset.manifest, cfg.ratio, seed)
    return split_stratified(dataset.manifest, cfg.ratio, seed)


class GridRunner:
    """
    Runs every (dataset, table, method) cell of a GridConfig.

    Each finished cell is cached as JSON under `cells/<hash>.json` in the
    output directory; the hash covers the manifest content, the audio bytes,
    method, frontend, seed, split settings and every config the cell uses, so
    a rerun skips completed cells and an edited clip invalidates them. Failed
    cells are reported and the grid continues.
    """

    def __init__(
        self, cfg: GridConfig, out_dir: Optional[Path] = None, threads: int = 1
    ):
        self.cfg = cfg
        self.out_dir = out_dir
        self.threads = max(1, threads)
        self.seed = cfg.resolved_seed

    def cells(self) -> List[_Cell]:
        cells: List[_Cell] = []
        for dataset in self.cfg.datasets:
            for table in self.cfg.tables:
                for method in table.methods:
                    cell = _Cell(
                        dataset=dataset, frontend=table.frontend, method=method
                    )
                    if cell not in cells:
                        cells.append(cell)
        return cells

    def cell_hash(self, cell: _Cell, manifest_csv: str, audio: List[str]) -> str:
        parts: List[object] = [
            manifest_csv,
            audio,
            cell.method,
            cell.frontend,
            self.seed,
            self.cfg.split,
            self.cfg.ratio,
            self.cfg.frontend.model_dump(mode="json"),
        ]
        if not is_classical(cell.method):
            arch = load_arch(self.resolve_arch(cell.method))
            parts.append(arch.model_dump(mode="json"))
            parts.append(self.cfg.train.apply(arch.name, self.seed).model_dump())
        return content_hash(*parts)

    def resolve_arch(self, method: str) -> Union[str, Path]:
        value = self.cfg.arch[method]
        return self.cfg.resolve_path(value) if value.endswith(".json") else value

    def _cache_path(self, digest: str) -> Optional[Path]:
        if self.out_dir is None:
            return None
        return self.out_dir / "cells" / f"{digest}.json"

    def _run_cell(
        self,
        cell: _Cell,
        dataset: LoadedDataset,
        split: DataSplit,
        inputs: Dict[Tuple[str, str], np.ndarray],
    ) -> ExperimentResult:
        started = time.perf_counter()
        train_rows, test_rows = split_arrays(dataset, split)
        labels = dataset.manifest.label_ids()
        names = dataset.manifest.label_names
        family = "classical" if is_classical(cell.method) else "deep"
        X = inputs[(family, cell.frontend)]

        if family == "classical":
            clf = fit_classical(
                cell.method, X[train_rows], labels[train_rows], self.seed
            )
            preds = clf.predict(X[test_rows])
        else:
            arch = adapt_arch(
                load_arch(self.resolve_arch(cell.method)),
                cell.frontend,
                X.shape[1:],
                dataset.manifest.n_classes,
            )
            X = match_inputs(X, arch)
            train_cfg = self.cfg.train.apply(arch.name, self.seed)
            ckpt, _ = fit_network(
                arch,
                train_cfg,
                X[train_rows],
                labels[train_rows],
                names,
                X_valid=X[test_rows],
                y_valid=labels[test_rows],
            )
            preds, _ = predict_batch(ckpt, X[test_rows])
        return score(
            cell.dataset,
            cell.method,
            cell.frontend,
            self.seed,
            preds,
            labels[test_rows],
            names,
            started,
            timing=self.cfg.timing,
        )

    def _inputs(
        self, dataset: LoadedDataset, cells: List[_Cell]
    ) -> Dict[Tuple[str, str], np.ndarray]:
        inputs: Dict[Tuple[str, str], np.ndarray] = {}
        for cell in cells:
            family = "classical" if is_classical(cell.method) else "deep"
            key = (family, cell.frontend)
            if key in inputs:
                continue
            if family == "classical":
                inputs[key] = classical_features(
                    dataset.waveforms, cell.frontend, self.cfg.frontend
                )
            else:
                inputs[key] = network_inputs(
                    dataset.waveforms, cell.frontend, self.cfg.frontend
                )
        return inputs

    def _run_dataset(
        self, name: str, cells: List[_Cell], document: ResultsDocument
    ) -> None:
        def fail(cell: _Cell, e: Exception) -> None:
            logger.warning(
                f"Warning: cell {name}/{cell.frontend}/{cell.method} failed: {e}"
            )
            document.failures.append(
                CellFailure(
                    dataset=name,
                    method=cell.method,
                    frontend=cell.frontend,
                    error=f"{type(e).__name__}: {e}",
                )
            )

        try:
            manifest = read_manifest(self.cfg.resolve_path(self.cfg.datasets[name]))
            manifest_csv = manifest_to_csv(manifest)
            audio = audio_digests(manifest)
        except Exception as e:
            for cell in cells:
                fail(cell, e)
            return

        pending: List[Tuple[_Cell, Optional[Path]]] = []
        cached: Dict[int, ExperimentResult] = {}
        for index, cell in enumerate(cells):
            try:
                path = self._cache_path(self.cell_hash(cell, manifest_csv, audio))
            except Exception as e:
                fail(cell, e)
                continue
            if path is not None and path.is_file():
                logger.info(f"Cached cell {name}/{cell.frontend}/{cell.method}")
                cached[index] = ExperimentResult.model_validate_json(path.read_text())
            else:
                pending.append((cell, path))

        fresh: Dict[int, ExperimentResult] = {}
        if pending:
            try:
                dataset = load_dataset(manifest)
                split = _split(self.cfg, dataset, self.seed)
                inputs = self._inputs(dataset, [cell for cell, _ in pending])
            except Exception as e:
                for cell, _ in pending:
                    fail(cell, e)
                pending = []

            def attempt(
                job: Tuple[_Cell, Optional[Path]],
            ) -> Union[ExperimentResult, Exception]:
                cell, path = job
                try:
                    result = self._run_cell(cell, dataset, split, inputs)
                except Exception as e:
                    return e
                if path is not None:
                    path.parent.mkdir(parents=True, exist_ok=True)
                    path.write_text(result.model_dump_json(indent=2) + "\n")
                return result

            if self.threads > 1:
                with ThreadPoolExecutor(max_workers=self.threads) as pool:
                    outcomes = list(pool.map(attempt, pending))
            else:
                outcomes = [attempt(job) for job in pending]

            for (cell, _), outcome in zip(pending, outcomes):
                if isinstance(outcome, Exception):
                    fail(cell, outcome)
                    continue
                logger.info(
                    f"{name}/{cell.frontend}/{cell.method}: "
                    f"accuracy {outcome.accuracy:.2f}%"
                )
                fresh[cells.index(cell)] = outcome

        for index in range(len(cells)):
            if index in cached:
                document.results.append(cached[index])
            elif index in fresh:
                document.results.append(fresh[index])

    def run(self) -> ResultsDocument:
        document = ResultsDocument()
        cells = self.cells()
        for name in self.cfg.datasets:
            self._run_dataset(
                name, [c for c in cells if c.dataset == name], document
            )
        logger.info(
            f"Grid finished: {len(document.results)} results, "
            f"{len(document.failures)} failures"
        )
        return document


def run_experiment_grid(
    cfg: GridConfig, out_dir: Optional[Path] = None, threads: int = 1
) -> ResultsDocument:
    """Run every cell of the grid; see GridRunner."""
    return GridRunner(cfg, out_dir=out_dir, threads=threads).run()

