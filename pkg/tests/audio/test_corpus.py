from pathlib import Path

import numpy as np
import pytest

from wav2emo.audio import (
    CANONICAL_EMOTIONS,
    Convention,
    DatasetManifest,
    Waveform,
    label_distribution,
    merge_manifests,
    read_manifest,
    render_distribution,
    scan_corpus,
    write_manifest,
    write_wav,
)
from wav2emo.audio.corpus import (
    DECLARED_LABELS,
    parse_crema_name,
    parse_emodb_name,
    parse_ravdess_name,
    parse_savee_name,
    parse_tess_name,
)
from wav2emo.errors import ConfigError, EmptyCorpus, LabelError

MOCK = Path(__file__).parent / "mock"


def _touch_wavs(root: Path, names: list[str]) -> None:
    clip = write_wav(Waveform(samples=np.zeros(160), sample_rate=16000))
    for name in names:
        path = root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(clip)


@pytest.fixture
def manifest() -> DatasetManifest:
    return read_manifest(MOCK / "manifest.csv")


def test_ravdess_name() -> None:
    assert parse_ravdess_name(Path("03-01-05-01-01-01-12.wav")) == ("angry", "12")
    assert parse_ravdess_name(Path("03-01-02-01-01-01-07.wav")) == ("bored", "07")
    with pytest.raises(LabelError, match="03-01-09"):
        parse_ravdess_name(Path("03-01-09-01-01-01-12.wav"))


def test_emodb_name() -> None:
    assert parse_emodb_name(Path("03a01Fa.wav")) == ("happy", "03")
    assert parse_emodb_name(Path("16b10Lb.wav")) == ("bored", "16")
    with pytest.raises(LabelError):
        parse_emodb_name(Path("03a01Xa.wav"))


def test_other_conventions() -> None:
    assert parse_tess_name(Path("OAF_back_angry.wav")) == ("angry", "OAF")
    assert parse_tess_name(Path("YAF_dog_ps.wav")) == ("surprised", "YAF")
    assert parse_crema_name(Path("1001_DFA_ANG_XX.wav")) == ("angry", "1001")
    assert parse_savee_name(Path("DC_sa01.wav")) == ("sad", "DC")
    assert parse_savee_name(Path("KL/su12.wav")) == ("surprised", "KL")


def test_read_manifest_normalizes_labels(manifest: DatasetManifest) -> None:
    assert len(manifest) == 5
    names = [entry.label.name for entry in manifest.entries]
    assert names == ["happy", "fear", "bored", "neutral", "happy"]
    # label ids follow the canonical column order
    assert manifest.label_names == ["neutral", "happy", "fear", "bored"]
    assert manifest.root == str(MOCK)
    assert manifest.resolve(manifest.entries[0]) == MOCK / "clips" / "a.wav"


def test_manifest_round_trip(tmp_path: Path, manifest: DatasetManifest) -> None:
    path = tmp_path / "copy.csv"
    write_manifest(manifest, path)
    again = read_manifest(path)
    assert [e.path for e in again.entries] == [e.path for e in manifest.entries]
    assert again.label_set == manifest.label_set


def test_single_row_manifest(tmp_path: Path) -> None:
    path = tmp_path / "manifest.csv"
    path.write_text("path,label,speaker\na.wav,happy,s1\n")
    assert len(scan_corpus(tmp_path, Convention.MANIFEST_CSV)) == 1


def test_manifest_errors(tmp_path: Path) -> None:
    path = tmp_path / "m.csv"
    path.write_text("file,emotion\na.wav,happy\n")
    with pytest.raises(ConfigError):
        read_manifest(path)
    path.write_text("path,label,speaker\na.wav,elated,s1\n")
    with pytest.raises(LabelError, match="line 2"):
        read_manifest(path)
    path.write_text("path,label,speaker\n")
    with pytest.raises(EmptyCorpus):
        read_manifest(path)
    path.write_text("path,label,speaker\na.wav,happy,s1\na.wav,sad,s1\n")
    with pytest.raises(ConfigError, match="duplicate"):
        read_manifest(path)


def test_scan_ravdess(tmp_path: Path) -> None:
    _touch_wavs(
        tmp_path,
        [
            "Actor_12/03-01-05-01-01-01-12.wav",
            "Actor_12/03-01-01-01-01-01-12.wav",
            "Actor_03/03-01-02-02-01-02-03.wav",
        ],
    )
    m = scan_corpus(tmp_path, "ravdess")
    assert len(m) == 3
    assert m.label_names == ["neutral", "angry", "bored"]
    assert {e.speaker for e in m.entries} == {"12", "03"}
    declared = set(DECLARED_LABELS[Convention.RAVDESS])
    assert set(m.label_names) <= declared


def test_scan_rejects_unknown_code(tmp_path: Path) -> None:
    _touch_wavs(tmp_path, ["03a01Fa.wav", "03a01Qa.wav"])
    with pytest.raises(LabelError, match="03a01Qa.wav"):
        scan_corpus(tmp_path, "emodb")


def test_scan_empty_directory(tmp_path: Path) -> None:
    with pytest.raises(EmptyCorpus):
        scan_corpus(tmp_path, "emodb")
    with pytest.raises(ConfigError):
        scan_corpus(tmp_path / "missing", "emodb")


def test_merge_manifests(tmp_path: Path, manifest: DatasetManifest) -> None:
    _touch_wavs(tmp_path, ["OAF_back_angry.wav", "OAF_bean_sad.wav"])
    tess = scan_corpus(tmp_path, "tess")
    merged = merge_manifests([manifest, tess])
    assert len(merged) == 7
    assert merged.label_names == ["neutral", "happy", "angry", "sad", "fear", "bored"]
    with pytest.raises(ConfigError, match="duplicate"):
        merge_manifests([tess, tess])


def test_label_distribution(manifest: DatasetManifest) -> None:
    counts = label_distribution(manifest)
    assert counts == {"neutral": 1, "happy": 2, "fear": 1, "bored": 1}
    table = render_distribution({"mock": manifest})
    header, row = table.splitlines()
    abbreviations = ["NR", "HP", "AG", "SR", "SD", "DG", "FR", "BR"]
    assert header.split() == ["Dataset", *abbreviations, "Total"]
    assert row.split() == ["mock", "1", "2", "-", "-", "-", "-", "1", "1", "5"]
    assert len(CANONICAL_EMOTIONS) == 8
