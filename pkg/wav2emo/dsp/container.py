import io
import logging
import struct
from pathlib import Path
from typing import Dict, Union

import numpy as np

from wav2emo.dsp.features import FeatureKind, FeatureMatrix
from wav2emo.errors import ParseError

logger = logging.getLogger(__name__)

FEATURE_MAGIC = b"SERF"
FEATURE_VERSION = 1
# magic, version, kind, frames, coefficients, frame rate
_HEADER = struct.Struct("<4sIIIIf")

KIND_TAGS: Dict[FeatureKind, int] = {"logmel": 0, "mfcc": 1}
_TAG_KINDS: Dict[int, FeatureKind] = {tag: kind for kind, tag in KIND_TAGS.items()}


def dump_features(fm: FeatureMatrix) -> bytes:
    frames, coeffs = fm.values.shape
    header = _HEADER.pack(
        FEATURE_MAGIC,
        FEATURE_VERSION,
        KIND_TAGS[fm.kind],
        frames,
        coeffs,
        fm.frame_rate,
    )
    return header + fm.values.astype("<f4").tobytes(order="C")


def load_features(data: bytes) -> FeatureMatrix:
    if len(data) < _HEADER.size:
        raise ParseError("feature file shorter than its header")
    magic, version, tag, frames, coeffs, frame_rate = _HEADER.unpack_from(data, 0)
    if magic != FEATURE_MAGIC:
        raise ParseError(f"bad feature magic {magic!r}")
    if version != FEATURE_VERSION:
        raise ParseError(f"unsupported feature version {version}")
    if tag not in _TAG_KINDS:
        raise ParseError(f"unknown feature kind tag {tag}")
    payload = data[_HEADER.size :]
    if len(payload) != frames * coeffs * 4:
        raise ParseError(
            f"payload holds {len(payload)} bytes, header says {frames}x{coeffs}"
        )
    values = np.frombuffer(payload, dtype="<f4").reshape(frames, coeffs)
    return FeatureMatrix(values=values, frame_rate=frame_rate, kind=_TAG_KINDS[tag])


def write_features(fm: FeatureMatrix, path: Union[str, Path]) -> None:
    Path(path).write_bytes(dump_features(fm))


def read_features(path: Union[str, Path]) -> FeatureMatrix:
    return load_features(Path(path).read_bytes())


def export_features_csv(fm: FeatureMatrix) -> str:
    buffer = io.StringIO()
    header = ",".join(f"c{i}" for i in range(fm.n_coefficients))
    np.savetxt(buffer, fm.values, delimiter=",", header=header, comments="", fmt="%.6g")
    return buffer.getvalue()
