from pydantic import ValidationError


class Wav2EmoError(Exception):
    """Base class for every error raised by wav2emo."""


class UserError(Wav2EmoError):
    """Raised when input data or configuration is at fault (CLI exit code 2)."""


class ParseError(UserError):
    pass


class UnsupportedFormat(UserError):
    pass


class LabelError(UserError):
    pass


class EmptyCorpus(UserError):
    pass


class StratifyError(UserError):
    pass


class ConfigError(UserError):
    pass


class ShapeError(UserError):
    pass


class FitError(UserError):
    pass


class EvalError(UserError):
    pass


def describe_validation_error(e: ValidationError) -> str:
    """One `field.path: message` item per failing field."""
    return "; ".join(
        f"{'.'.join(str(part) for part in err['loc']) or '<root>'}: {err['msg']}"
        for err in e.errors()
    )
