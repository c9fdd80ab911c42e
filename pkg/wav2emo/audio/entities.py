import logging
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

logger = logging.getLogger(__name__)

# Column order of the per-corpus distribution table: NR HP AG SR SD DG FR BR.
CANONICAL_EMOTIONS: List[str] = [
    "neutral",
    "happy",
    "angry",
    "surprised",
    "sad",
    "disgust",
    "fear",
    "bored",
]

EMOTION_ABBREVIATIONS: Dict[str, str] = {
    "neutral": "NR",
    "happy": "HP",
    "angry": "AG",
    "surprised": "SR",
    "sad": "SD",
    "disgust": "DG",
    "fear": "FR",
    "bored": "BR",
}

CANONICAL_RATE = 16000


def canonical_order(names: List[str]) -> List[str]:
    """Sort emotion names into the canonical column order, dropping duplicates."""
    present = set(names)
    return [name for name in CANONICAL_EMOTIONS if name in present]


class Waveform(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    samples: np.ndarray = Field(description="Mono amplitudes, nominally in [-1, 1]")
    sample_rate: int = Field(gt=0, description="Sampling frequency in Hz")

    @field_validator("samples")
    @classmethod
    def ensure_mono_non_empty(cls, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        if v.ndim != 1:
            raise ValueError(f"samples must be one-dimensional, got shape {v.shape}")
        if v.size == 0:
            raise ValueError("samples must be non-empty")
        return v

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def __len__(self) -> int:
        return int(self.samples.size)


class EmotionLabel(BaseModel):
    model_config = ConfigDict(frozen=True)

    id: int = Field(ge=0, lt=len(CANONICAL_EMOTIONS), description="Class id")
    name: str = Field(description="Canonical emotion name")

    @field_validator("name")
    @classmethod
    def ensure_known(cls, v: str) -> str:
        if v not in CANONICAL_EMOTIONS:
            raise ValueError(f"unknown emotion {v!r}")
        return v


class ManifestEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    path: str = Field(description="Audio file path")
    label: EmotionLabel = Field(description="Emotion of the utterance")
    speaker: str = Field(description="Speaker identifier")


class DatasetManifest(BaseModel):
    entries: List[ManifestEntry] = Field(
        default_factory=list, description="Labeled audio files"
    )
    label_set: List[EmotionLabel] = Field(
        default_factory=list, description="Ordered labels; ids are positions"
    )
    root: Optional[str] = Field(
        default=None, description="Base directory of relative entry paths"
    )

    @model_validator(mode="after")
    def ensure_consistent(self) -> "DatasetManifest":
        for i, label in enumerate(self.label_set):
            if label.id != i:
                raise ValueError(f"label {label.name} has id {label.id}, expected {i}")
        allowed = set(self.label_set)
        seen = set()
        for entry in self.entries:
            if entry.label not in allowed:
                raise ValueError(f"{entry.path}: label {entry.label.name} not in set")
            if entry.path in seen:
                raise ValueError(f"duplicate path {entry.path}")
            seen.add(entry.path)
        return self

    @classmethod
    def from_rows(
        cls, rows: List[tuple[str, str, str]], root: Optional[str] = None
    ) -> "DatasetManifest":
        """Build a manifest from (path, emotion name, speaker) rows."""
        names = canonical_order([name for _, name, _ in rows])
        label_set = [EmotionLabel(id=i, name=name) for i, name in enumerate(names)]
        by_name = {label.name: label for label in label_set}
        entries = [
            ManifestEntry(path=path, label=by_name[name], speaker=speaker)
            for path, name, speaker in rows
        ]
        return cls(entries=entries, label_set=label_set, root=root)

    @property
    def label_names(self) -> List[str]:
        return [label.name for label in self.label_set]

    @property
    def n_classes(self) -> int:
        return len(self.label_set)

    def label_ids(self) -> np.ndarray:
        return np.array([entry.label.id for entry in self.entries], dtype=np.int64)

    def subset(self, indices: List[int]) -> "DatasetManifest":
        return DatasetManifest(
            entries=[self.entries[i] for i in indices],
            label_set=self.label_set,
            root=self.root,
        )

    def resolve(self, entry: ManifestEntry) -> Path:
        path = Path(entry.path)
        if self.root is None or path.is_absolute():
            return path
        return Path(self.root) / path

    def __len__(self) -> int:
        return len(self.entries)


class DataSplit(BaseModel):
    train: DatasetManifest = Field(description="Training partition")
    test: DatasetManifest = Field(description="Test partition")
    seed: int = Field(description="Seed of the shuffling PRNG")
    ratio: float = Field(gt=0.0, lt=1.0, description="Nominal training fraction")
