import argparse
import logging
import tomllib
from pathlib import Path
from typing import Any, Dict, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from wav2emo.dsp import FrontendConfig
from wav2emo.errors import ConfigError, describe_validation_error
from wav2emo.utils import resolve_seed

logger = logging.getLogger(__name__)


class CliConfig(BaseModel):
    """
    Settings shared by the subcommands. TOML keys mirror the long flag names
    with dashes turned into underscores; frontend knobs live in a [features]
    table shaped like FrontendConfig.
    """

    model_config = ConfigDict(extra="forbid")

    seed: Optional[int] = Field(default=None, ge=0, description="Split and model seed")
    threads: int = Field(default=1, ge=1, description="Worker threads")
    verbose: bool = Field(default=False, description="DEBUG logging")
    split: Literal["random", "by-speaker"] = Field(
        default="random", description="Stratified random or speaker-disjoint"
    )
    ratio: float = Field(default=0.8, gt=0.0, lt=1.0, description="Training share")
    frontend: Optional[Literal["raw", "mfcc", "logmel"]] = Field(
        default=None, description="Input path; derived from the model when unset"
    )
    arch: Optional[str] = Field(default=None, description="Architecture name or path")
    method: Optional[str] = Field(default=None, description="Classical method name")
    learning_rate: Optional[float] = Field(default=None, gt=0.0)
    epochs: Optional[int] = Field(default=None, ge=1)
    batch_size: Optional[int] = Field(default=None, ge=1)
    features: FrontendConfig = Field(default_factory=FrontendConfig)

    @property
    def resolved_seed(self) -> int:
        return resolve_seed(self.seed)

    def train_overrides(self) -> Dict[str, Any]:
        values = {
            "learning_rate": self.learning_rate,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
        }
        return {key: value for key, value in values.items() if value is not None}


def read_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} not found")
    try:
        return tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from e


def merge_config(args: argparse.Namespace) -> CliConfig:
    """
    Explicit flags, then the --config TOML file, then model defaults. The seed
    falls back to $SER_SEED when neither sets it.
    """
    values: Dict[str, Any] = {}
    config_path = getattr(args, "config", None)
    if config_path is not None:
        values.update(read_config_file(config_path))
    for name in CliConfig.model_fields:
        flag = getattr(args, name, None)
        if flag is not None and flag is not False:
            values[name] = flag
    try:
        return CliConfig.model_validate(values)
    except ValidationError as e:
        message = describe_validation_error(e)
        raise ConfigError(f"invalid configuration: {message}") from e
