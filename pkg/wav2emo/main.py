import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from wav2emo import __version__
from wav2emo.audio import Convention
from wav2emo.commands import (
    cmd_eval,
    cmd_extract,
    cmd_grid,
    cmd_predict,
    cmd_scan,
    cmd_selftest,
    cmd_train,
)
from wav2emo.config import merge_config
from wav2emo.errors import UserError, describe_validation_error

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USER = 2

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="TOML file; explicit flags win over it")
    common.add_argument("--seed", type=int, help="Split and model seed")
    common.add_argument("--threads", type=int, help="Worker threads (default 1)")
    common.add_argument("--verbose", action="store_true", help="DEBUG logging")
    return common


def _frontend(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--frontend", choices=["raw", "mfcc", "logmel"])


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(
        prog="wav2emo", description="Speech emotion recognition experiments"
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    scan = sub.add_parser("scan", parents=[common], help="Build a corpus manifest")
    scan.add_argument("root", help="Corpus directory or manifest CSV")
    scan.add_argument(
        "--convention", required=True, choices=[c.value for c in Convention]
    )
    scan.add_argument("--out", required=True, help="Manifest CSV to write")

    extract = sub.add_parser("extract", parents=[common], help="Dump features")
    extract.add_argument("manifest")
    _frontend(extract)
    extract.add_argument("--out", required=True, help="Feature directory")

    train = sub.add_parser("train", parents=[common], help="Fit and save a model")
    train.add_argument("manifest")
    model = train.add_mutually_exclusive_group()
    model.add_argument("--arch", help="Architecture name or JSON path")
    model.add_argument("--method", help="Classical method: svm, rf, dt, nb, ...")
    _frontend(train)
    train.add_argument("--split", choices=["random", "by-speaker"])
    train.add_argument("--ratio", type=float, help="Training share (default 0.8)")
    train.add_argument("--learning-rate", dest="learning_rate", type=float)
    train.add_argument("--epochs", type=int)
    train.add_argument("--batch-size", dest="batch_size", type=int)
    train.add_argument("--out", required=True, help="Model file to write")
    train.add_argument("--history", help="Training history JSON")

    evaluate = sub.add_parser("eval", parents=[common], help="Score a saved model")
    evaluate.add_argument("model")
    evaluate.add_argument("manifest")
    _frontend(evaluate)
    evaluate.add_argument("--out", default=".", help="Report directory")

    predict = sub.add_parser("predict", parents=[common], help="Classify files")
    predict.add_argument("model")
    predict.add_argument("files", nargs="+")

    grid = sub.add_parser("grid", parents=[common], help="Run an experiment grid")
    grid.add_argument("grid_config", help="Grid TOML")
    grid.add_argument("--out", required=True, help="Report directory")

    sub.add_parser("selftest", parents=[common], help="Gradient and DSP checks")
    return parser


def run(args: argparse.Namespace) -> int:
    if args.command == "scan":
        cmd_scan(args.root, args.convention, args.out)
        return EXIT_OK
    if args.command == "selftest":
        return EXIT_OK if cmd_selftest() else EXIT_INTERNAL

    cfg = merge_config(args)
    match args.command:
        case "extract":
            cmd_extract(cfg, args.manifest, args.out)
        case "train":
            cmd_train(cfg, args.manifest, args.out, args.history)
        case "eval":
            cmd_eval(cfg, args.model, args.manifest, args.out)
        case "predict":
            cmd_predict(cfg, args.model, args.files)
        case "grid":
            cmd_grid(cfg, args.grid_config, args.out)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO, format=LOG_FORMAT
    )
    try:
        return run(args)
    except UserError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USER
    except ValidationError as e:
        logger.error(f"ConfigError: {describe_validation_error(e)}")
        return EXIT_USER
    except Exception:
        logger.exception("Internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
