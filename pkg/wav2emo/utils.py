import hashlib
import json
import logging
import os
import struct
from typing import Any, Dict, Mapping, Optional, Tuple

import numpy as np

from wav2emo.errors import ConfigError, ParseError

logger = logging.getLogger(__name__)

MODEL_MAGIC = b"SERM"
MODEL_VERSION = 1
SEED_ENV_VAR = "SER_SEED"


def dump_model_container(
    header: Dict[str, Any], tensors: Mapping[str, np.ndarray]
) -> bytes:
    """
    Frame a model file: magic, u32 version, u32 header length, JSON header, then
    each tensor as little-endian float32 in the order of `header["tensors"]`.

    The tensor table (name and shape per tensor) is written into the header here;
    callers supply everything else.
    """
    header = dict(header)
    header["tensors"] = [
        {"name": name, "shape": list(array.shape)} for name, array in tensors.items()
    ]
    encoded = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    parts = [MODEL_MAGIC, struct.pack("<II", MODEL_VERSION, len(encoded)), encoded]
    for array in tensors.values():
        parts.append(np.ascontiguousarray(array, dtype="<f4").tobytes())
    return b"".join(parts)


def load_model_container(data: bytes) -> Tuple[Dict[str, Any], Dict[str, np.ndarray]]:
    if data[:4] != MODEL_MAGIC:
        raise ParseError(f"bad model magic {data[:4]!r}")
    if len(data) < 12:
        raise ParseError("model file shorter than its header")
    version, header_len = struct.unpack_from("<II", data, 4)
    if version != MODEL_VERSION:
        raise ParseError(f"unsupported model version {version}")
    try:
        header = json.loads(data[12 : 12 + header_len].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise ParseError(f"model header is not valid JSON: {e}") from e
    offset = 12 + header_len
    tensors: Dict[str, np.ndarray] = {}
    for entry in header["tensors"]:
        shape = tuple(entry["shape"])
        n_bytes = 4 * int(np.prod(shape, dtype=np.int64))
        chunk = data[offset : offset + n_bytes]
        if len(chunk) != n_bytes:
            raise ParseError(f"tensor {entry['name']} truncated")
        tensors[entry["name"]] = np.frombuffer(chunk, dtype="<f4").reshape(shape).copy()
        offset += n_bytes
    if offset != len(data):
        raise ParseError(f"{len(data) - offset} trailing bytes after last tensor")
    return header, tensors


def content_hash(*parts: Any) -> str:
    """Stable sha256 over bytes, strings and JSON-serializable values."""
    digest = hashlib.sha256()
    for part in parts:
        if isinstance(part, bytes):
            digest.update(part)
        elif isinstance(part, str):
            digest.update(part.encode("utf-8"))
        else:
            digest.update(json.dumps(part, sort_keys=True, default=str).encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()


def resolve_seed(seed: Optional[int], default: int = 0) -> int:
    """Explicit seed, else $SER_SEED, else default."""
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV_VAR)
    if env is None:
        return default
    try:
        return int(env)
    except ValueError as e:
        raise ConfigError(f"{SEED_ENV_VAR}={env!r} is not an integer") from e
