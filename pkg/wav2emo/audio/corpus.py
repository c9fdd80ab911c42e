import csv
import io
import logging
from enum import Enum
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple, Union

from wav2emo.audio.entities import (
    CANONICAL_EMOTIONS,
    EMOTION_ABBREVIATIONS,
    DatasetManifest,
)
from wav2emo.errors import ConfigError, EmptyCorpus, LabelError

logger = logging.getLogger(__name__)

MANIFEST_HEADER = ["path", "label", "speaker"]


class Convention(str, Enum):
    RAVDESS = "ravdess"
    EMODB = "emodb"
    TESS = "tess"
    CREMA = "crema"
    SAVEE = "savee"
    MANIFEST_CSV = "manifest-csv"


# Modality-vocal channel-emotion-intensity-statement-repetition-actor; calm is
# folded into bored.
RAVDESS_CODES: Dict[str, str] = {
    "01": "neutral",
    "02": "bored",
    "03": "happy",
    "04": "sad",
    "05": "angry",
    "06": "fear",
    "07": "disgust",
    "08": "surprised",
}

# Letter six of the German emotion name: Wut, Langeweile, Ekel, Angst, Freude,
# Trauer, Neutral.
EMODB_CODES: Dict[str, str] = {
    "W": "angry",
    "L": "bored",
    "E": "disgust",
    "A": "fear",
    "F": "happy",
    "T": "sad",
    "N": "neutral",
}

CREMA_CODES: Dict[str, str] = {
    "ANG": "angry",
    "DIS": "disgust",
    "FEA": "fear",
    "HAP": "happy",
    "NEU": "neutral",
    "SAD": "sad",
}

SAVEE_CODES: Dict[str, str] = {
    "a": "angry",
    "d": "disgust",
    "f": "fear",
    "h": "happy",
    "n": "neutral",
    "sa": "sad",
    "su": "surprised",
}

LABEL_ALIASES: Dict[str, str] = {
    "fearful": "fear",
    "calm": "bored",
    "surprise": "surprised",
    "ps": "surprised",
    "anger": "angry",
    "happiness": "happy",
    "sadness": "sad",
    "boredom": "bored",
}

# Emotions each corpus can produce; scanned labels never leave this set.
DECLARED_LABELS: Dict[Convention, List[str]] = {
    Convention.RAVDESS: sorted(set(RAVDESS_CODES.values())),
    Convention.EMODB: sorted(set(EMODB_CODES.values())),
    Convention.TESS: sorted(
        ["angry", "disgust", "fear", "happy", "neutral", "sad", "surprised"]
    ),
    Convention.CREMA: sorted(set(CREMA_CODES.values())),
    Convention.SAVEE: sorted(set(SAVEE_CODES.values())),
    Convention.MANIFEST_CSV: list(CANONICAL_EMOTIONS),
}


def normalize_label(name: str) -> str:
    name = name.strip().lower()
    name = LABEL_ALIASES.get(name, name)
    if name not in CANONICAL_EMOTIONS:
        raise LabelError(f"unknown emotion label {name!r}")
    return name


def parse_ravdess_name(path: Path) -> Tuple[str, str]:
    fields = path.stem.split("-")
    if len(fields) != 7 or fields[2] not in RAVDESS_CODES:
        raise LabelError(f"{path.name}: not a RAVDESS emotion code")
    return RAVDESS_CODES[fields[2]], fields[6]


def parse_emodb_name(path: Path) -> Tuple[str, str]:
    stem = path.stem
    if len(stem) < 6 or stem[5] not in EMODB_CODES:
        raise LabelError(f"{path.name}: not an EMO-DB emotion code")
    return EMODB_CODES[stem[5]], stem[:2]


def parse_tess_name(path: Path) -> Tuple[str, str]:
    fields = path.stem.split("_")
    if len(fields) < 3:
        raise LabelError(f"{path.name}: not a TESS file name")
    try:
        return normalize_label(fields[-1]), fields[0]
    except LabelError as e:
        raise LabelError(f"{path.name}: {e}") from e


def parse_crema_name(path: Path) -> Tuple[str, str]:
    fields = path.stem.split("_")
    if len(fields) < 3 or fields[2] not in CREMA_CODES:
        raise LabelError(f"{path.name}: not a CREMA-D emotion code")
    return CREMA_CODES[fields[2]], fields[0]


def parse_savee_name(path: Path) -> Tuple[str, str]:
    stem = path.stem
    if "_" in stem:
        speaker, stem = stem.split("_", 1)
    else:
        speaker = path.parent.name
    code = stem.rstrip("0123456789")
    if code not in SAVEE_CODES:
        raise LabelError(f"{path.name}: not a SAVEE emotion code")
    return SAVEE_CODES[code], speaker


FILENAME_PARSERS: Dict[Convention, Callable[[Path], Tuple[str, str]]] = {
    Convention.RAVDESS: parse_ravdess_name,
    Convention.EMODB: parse_emodb_name,
    Convention.TESS: parse_tess_name,
    Convention.CREMA: parse_crema_name,
    Convention.SAVEE: parse_savee_name,
}


def read_manifest_csv(text: str, root: Optional[str] = None) -> DatasetManifest:
    """
    Read a `path,label,speaker` manifest. Paths are kept verbatim; relative ones
    resolve against root when audio is loaded.
    """
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != MANIFEST_HEADER:
        raise ConfigError(f"manifest header must be {','.join(MANIFEST_HEADER)}")
    rows = []
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise ConfigError(f"manifest line {line_no}: expected 3 fields")
        path, label, speaker = (field.strip() for field in row)
        try:
            name = normalize_label(label)
        except LabelError as e:
            raise LabelError(f"manifest line {line_no} ({path}): {e}") from e
        rows.append((path, name, speaker))
    if not rows:
        raise EmptyCorpus("manifest has no rows")
    return _manifest_from_rows(rows, root)


def read_manifest(path: Union[str, Path]) -> DatasetManifest:
    path = Path(path)
    return read_manifest_csv(path.read_text(encoding="utf-8"), str(path.parent))


def write_manifest(m: DatasetManifest, path: Union[str, Path]) -> None:
    Path(path).write_text(manifest_to_csv(m), encoding="utf-8")


def manifest_to_csv(m: DatasetManifest) -> str:
    lines = [",".join(MANIFEST_HEADER)]
    for entry in m.entries:
        lines.append(f"{entry.path},{entry.label.name},{entry.speaker}")
    return "\n".join(lines) + "\n"


def _manifest_from_rows(
    rows: List[Tuple[str, str, str]], root: Optional[str] = None
) -> DatasetManifest:
    try:
        return DatasetManifest.from_rows(rows, root=root)
    except ValueError as e:
        raise ConfigError(str(e)) from e


def scan_corpus(
    root: Union[str, Path], convention: Union[Convention, str]
) -> DatasetManifest:
    """
    Build a labeled manifest from a corpus directory.

    Args:
        root: Corpus directory, searched recursively for .wav files. For the
            manifest-csv convention, either the CSV file itself or a directory
            holding `manifest.csv`.
        convention: File naming scheme of the corpus.

    Returns:
        Manifest ordered by relative path, labels in canonical column order.
    """
    convention = Convention(convention)
    root = Path(root)
    if not root.exists():
        raise ConfigError(f"corpus root {root} does not exist")

    if convention is Convention.MANIFEST_CSV:
        csv_path = root / "manifest.csv" if root.is_dir() else root
        if not csv_path.exists():
            raise EmptyCorpus(f"no manifest.csv under {root}")
        return read_manifest(csv_path)

    parser = FILENAME_PARSERS[convention]
    declared = set(DECLARED_LABELS[convention])
    rows = []
    for wav_path in sorted(root.rglob("*.wav"), key=lambda p: p.as_posix()):
        name, speaker = parser(wav_path)
        if name not in declared:
            raise LabelError(f"{wav_path.name}: {name} outside {convention.value}")
        rows.append((str(wav_path), name, speaker))
    if not rows:
        raise EmptyCorpus(f"no .wav files found under {root}")
    logger.info(f"Scanned {len(rows)} files from {root} ({convention.value})")
    return _manifest_from_rows(rows)


def merge_manifests(manifests: List[DatasetManifest]) -> DatasetManifest:
    rows = [
        (str(m.resolve(entry)), entry.label.name, entry.speaker)
        for m in manifests
        for entry in m.entries
    ]
    if not rows:
        raise EmptyCorpus("nothing to merge")
    return _manifest_from_rows(rows)


def label_distribution(m: DatasetManifest) -> Dict[str, int]:
    counts = {label.name: 0 for label in m.label_set}
    for entry in m.entries:
        counts[entry.label.name] += 1
    return counts


def render_distribution(datasets: Dict[str, DatasetManifest]) -> str:
    """Render per-corpus emotion counts with one column per canonical emotion."""
    header = ["Dataset", *EMOTION_ABBREVIATIONS.values(), "Total"]
    lines = [header]
    for name, m in datasets.items():
        counts = label_distribution(m)
        row = [name]
        row += [str(counts[e]) if e in counts else "-" for e in CANONICAL_EMOTIONS]
        row.append(str(len(m)))
        lines.append(row)
    widths = [max(len(line[i]) for line in lines) for i in range(len(header))]
    return "\n".join(
        "  ".join(cell.rjust(width) for cell, width in zip(line, widths))
        for line in lines
    )
