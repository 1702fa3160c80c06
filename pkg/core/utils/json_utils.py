from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Callable, List, Sequence, TypeVar, Union

import numpy as np

from core.logging.logging import Logger

T = TypeVar("T")


def load_json_as(path_or_data: Union[str, Path, dict], from_dict: Callable[[dict], T]) -> T:
    """
    Loads JSON data either from a file path or from an existing dictionary,
    then maps it using the from_dict function.
    """
    if isinstance(path_or_data, (str, Path)):
        Logger.debug(f"Reading JSON from {path_or_data}")
        with open(path_or_data, "r", encoding="utf-8") as f:
            data_dict = json.load(f)

    elif isinstance(path_or_data, dict):
        data_dict = path_or_data

    else:
        raise TypeError("Input must be a file path (str/Path) or a dictionary (dict)")

    return from_dict(data_dict)


# ================================
#          COMPLEX CODEC
# ================================


def _decode_scalar(x: Any) -> complex:
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ValueError(f"Complex entry must be a [re, im] pair, got {x!r}")
        return complex(float(x[0]), float(x[1]))
    return complex(float(x))


def encode_vector(v: Sequence[complex] | np.ndarray) -> List[List[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).reshape(-1)]


def decode_vector(data: Sequence[Any]) -> np.ndarray:
    return np.array([_decode_scalar(x) for x in data], dtype=complex)


def encode_matrix(m: np.ndarray) -> List[List[List[float]]]:
    """Row-major nested arrays of [re, im] pairs."""
    arr = np.asarray(m, dtype=complex)
    return [encode_vector(row) for row in arr]


def decode_matrix(data: Sequence[Sequence[Any]]) -> np.ndarray:
    rows = [decode_vector(row) for row in data]
    if not rows:
        raise ValueError("Matrix must have at least one row")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("Matrix rows have unequal length")
    return np.vstack(rows)


def dumps(data: Any, pretty: bool = True) -> str:
    return json.dumps(data, ensure_ascii=False, indent=2 if pretty else None)
