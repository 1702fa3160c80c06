import importlib
import pkgutil
from typing import Dict, List, Type, TypeVar

T = TypeVar("T")

_COMMAND_REGISTRY: Dict[str, type] = {}


def register_command(command_cls: Type[T]) -> Type[T]:
    name = getattr(command_cls, "name", None)
    if not name:
        raise ValueError("Command must define 'name' attribute")

    _COMMAND_REGISTRY[name.lower()] = command_cls

    for a in getattr(command_cls, "aliases", []):
        _COMMAND_REGISTRY[a.lower()] = command_cls
    return command_cls


def get_command_class(name: str):
    return _COMMAND_REGISTRY.get(name.lower())


def registered_commands() -> List[type]:
    """Distinct registered classes, in registration order."""
    seen: List[type] = []
    for cls in _COMMAND_REGISTRY.values():
        if cls not in seen:
            seen.append(cls)
    return seen


def discover_and_register(package: str) -> None:
    pkg = importlib.import_module(package)
    for finder, modname, ispkg in pkgutil.iter_modules(pkg.__path__):
        importlib.import_module(f"{package}.{modname}")
