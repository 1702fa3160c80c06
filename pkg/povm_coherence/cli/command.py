from __future__ import annotations

import argparse
import sys
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from core.configuration.configuration import Configuration
from core.logging.logging import Logger
from core.utils.json_utils import dumps, load_json_as
from povm_coherence.errors import ValidationError
from povm_coherence.linalg.states import DensityMatrix
from povm_coherence.povm.catalog import computational_povm, qutrit_split_povm, trine_povm
from povm_coherence.povm.povm import Povm

BUILTIN_POVMS: Dict[str, Callable[[], Povm]] = {
    "trine": trine_povm,
    "computational": lambda: computational_povm(2),
    "qutrit-split": qutrit_split_povm,
}


class Command(ABC):
    """
    One CLI subcommand: subclass declares arguments and implements run().
    Base class handles input loading and JSON output so every command reads and writes the same formats.
    """

    name: Optional[str] = None
    aliases: List[str] = []
    help: str = ""

    def __init__(self, config: Configuration):
        self.config = config

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        """Command-specific arguments; shared flags are added by the parser builder."""

    @abstractmethod
    def run(self, args: argparse.Namespace) -> int:
        raise NotImplementedError

    # ================================
    #         INPUT HELPERS
    # ================================

    @staticmethod
    def load_povm(source: str, validate: bool = True) -> Povm:
        """A POVM JSON file, or a built-in name (trine, computational, qutrit-split)."""
        if source in BUILTIN_POVMS and not Path(source).exists():
            Logger.debug(f"Using built-in POVM '{source}'")
            return BUILTIN_POVMS[source]()
        p = load_json_as(existing_file(source, "POVM"), Povm.from_dict)
        return p.require_valid() if validate else p

    @staticmethod
    def load_state(source: str) -> DensityMatrix:
        return load_json_as(existing_file(source, "state"), DensityMatrix.from_dict)

    # ================================
    #         OUTPUT HELPERS
    # ================================

    @staticmethod
    def emit(data: Any) -> None:
        """Machine-readable result on stdout."""
        sys.stdout.write(dumps(data) + "\n")
        sys.stdout.flush()


def existing_file(source: str, what: str) -> Path:
    path = Path(source).expanduser()
    if not path.is_file():
        raise ValidationError(f"{what} file {source} does not exist")
    return path
