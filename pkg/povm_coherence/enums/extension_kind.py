try:
    from enum import StrEnum
except ImportError:
    from strenum import StrEnum

from povm_coherence.errors import ValidationError


class ExtensionKind(StrEnum):
    CANONICAL = "canonical"
    MINIMAL = "minimal"


_NAME2ENUM = {e.value: e for e in ExtensionKind}


def convert_to_extension_kind(key: str) -> ExtensionKind:
    try:
        return _NAME2ENUM[str(key).strip().lower()]
    except KeyError:
        raise ValidationError(f"Unknown extension kind {key!r}; expected one of {sorted(_NAME2ENUM)}")
