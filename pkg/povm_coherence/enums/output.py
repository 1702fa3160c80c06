try:
    from enum import StrEnum
except ImportError:
    from strenum import StrEnum

from povm_coherence.errors import ValidationError


class LandscapeMode(StrEnum):
    COHERENCE = "coherence"
    CONVERSION = "conversion"


class OutputFormat(StrEnum):
    JSON = "json"
    CSV = "csv"


def convert_to_output_format(key: str) -> OutputFormat:
    try:
        return OutputFormat(str(key).strip().lower())
    except ValueError:
        raise ValidationError(f"Unknown output format {key!r}; expected json or csv")


def convert_to_landscape_mode(key: str) -> LandscapeMode:
    try:
        return LandscapeMode(str(key).strip().lower())
    except ValueError:
        raise ValidationError(f"Unknown landscape mode {key!r}; expected coherence or conversion")
