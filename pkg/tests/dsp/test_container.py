from pathlib import Path

import numpy as np
import pytest

from wav2emo.dsp import (
    FeatureMatrix,
    export_features_csv,
    read_features,
    write_features,
)
from wav2emo.dsp.container import dump_features, load_features
from wav2emo.errors import ParseError


@pytest.fixture
def features() -> FeatureMatrix:
    values = np.random.default_rng(0).normal(size=(5, 3)).astype(np.float32)
    return FeatureMatrix(values=values, frame_rate=100.0, kind="mfcc")


def test_layout(features: FeatureMatrix) -> None:
    data = dump_features(features)
    assert data[:4] == b"SERF"
    assert len(data) == 4 + 4 * 4 + 4 + 5 * 3 * 4


def test_file_round_trip(tmp_path: Path, features: FeatureMatrix) -> None:
    path = tmp_path / "clip.serf"
    write_features(features, path)
    loaded = read_features(path)
    assert loaded.kind == "mfcc"
    assert loaded.frame_rate == 100.0
    assert np.array_equal(loaded.values, features.values)


def test_corrupt_files(features: FeatureMatrix) -> None:
    data = dump_features(features)
    with pytest.raises(ParseError, match="magic"):
        load_features(b"SERX" + data[4:])
    with pytest.raises(ParseError, match="payload"):
        load_features(data[:-4])
    with pytest.raises(ParseError):
        load_features(data[:10])


def test_csv_export(features: FeatureMatrix) -> None:
    lines = export_features_csv(features).splitlines()
    assert lines[0] == "c0,c1,c2"
    assert len(lines) == 6
    assert [float(v) for v in lines[1].split(",")] == pytest.approx(
        features.values[0].tolist(), rel=1e-5
    )
