import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from wav2emo.classical.base import Classifier
from wav2emo.classical.factory import build_classifier
from wav2emo.errors import ConfigError, ParseError
from wav2emo.utils import dump_model_container, load_model_container

logger = logging.getLogger(__name__)

MODEL_KIND = "classical"


def scalar_params(clf: Classifier) -> Dict[str, Any]:
    """Constructor arguments that fit in a JSON header; members are rebuilt."""
    return {
        name: value
        for name, value in clf.get_params(deep=False).items()
        if value is None or isinstance(value, (bool, int, float, str))
    }


def dump_classifier(
    clf: Classifier, method: str, metadata: Optional[Dict[str, Any]] = None
) -> bytes:
    header = {
        "kind": MODEL_KIND,
        "method": method,
        "params": scalar_params(clf),
        "metadata": metadata or {},
    }
    return dump_model_container(header, clf.export_tensors())


def parse_classifier(data: bytes) -> Tuple[Classifier, Dict[str, Any]]:
    """Rebuild a fitted classifier; also returns the file's metadata."""
    header, tensors = load_model_container(data)
    if header.get("kind") != MODEL_KIND:
        raise ParseError(f"not a classical model (kind {header.get('kind')!r})")
    params = header.get("params", {})
    clf = build_classifier(header["method"], seed=params.get("seed", 0))
    clf.set_params(**params)
    try:
        clf.import_tensors(tensors)
    except KeyError as e:
        raise ParseError(f"{header['method']} model is missing tensor {e}") from e
    return clf, header.get("metadata", {})


def save_classifier(
    clf: Classifier,
    path: Union[str, Path],
    method: str,
    metadata: Optional[Dict[str, Any]] = None,
) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dump_classifier(clf, method, metadata))
    logger.info(f"Saved {method} model to {path}")


def load_classifier(path: Union[str, Path]) -> Tuple[Classifier, Dict[str, Any]]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"model {path} not found")
    return parse_classifier(path.read_bytes())
