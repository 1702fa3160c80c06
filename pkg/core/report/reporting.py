from __future__ import annotations

import json
import os
import traceback
from contextlib import contextmanager
from pathlib import Path
from typing import Any, Dict, Iterator, Optional

import numpy as np

from core.logging.logging import Logger

try:
    import allure
    from allure_commons.types import AttachmentType
except ImportError:
    class _Attach:
        def __call__(self, *args, **kwargs):
            return None

        def file(self, *args, **kwargs):
            return None

    class _Dynamic:
        def __getattr__(self, _):
            return lambda *a, **k: None

    class AttachmentType:
        TEXT = "text/plain"
        JSON = "application/json"
        CSV = "text/csv"

    class _NoAllure:
        """Stand-in used when the CLI runs without allure-pytest installed."""
        attach = _Attach()
        dynamic = _Dynamic()

        @contextmanager
        def step(self, _title):
            yield

    allure = _NoAllure()


def to_jsonable(x: Any) -> Any:
    """json.dumps fallback: numpy arrays and scalars, complex numbers as [re, im]."""
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return {"re": x.real.tolist(), "im": x.imag.tolist()}
        return x.tolist()
    if isinstance(x, (np.floating, np.integer, np.bool_)):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    try:
        return str(x)
    except Exception:
        Logger.error(f"Cannot serialize {type(x).__name__} for a report attachment")
        return ""


class AllureReporter:
    """
    Thin layer over allure for numerical tests.

    Attachments take the body first and the name second, as allure.attach does.
    """

    @staticmethod
    @contextmanager
    def step(title: str) -> Iterator[None]:
        """Allure step that attaches the traceback when the wrapped block raises."""
        with allure.step(title):
            try:
                yield
            except Exception:
                AllureReporter.attach_text(traceback.format_exc(), "Exception")
                raise

    # ================================
    #          ATTACHMENTS
    # ================================

    @staticmethod
    def attach_text(text: str, name: str) -> None:
        allure.attach(text or "", name=name, attachment_type=AttachmentType.TEXT)

    @staticmethod
    def attach_json(data: Any, name: str) -> None:
        body = json.dumps(data, indent=2, default=to_jsonable)
        allure.attach(body, name=name, attachment_type=AttachmentType.JSON)

    @staticmethod
    def attach_csv(body: str, name: str) -> None:
        allure.attach(body or "", name=name, attachment_type=AttachmentType.CSV)

    @staticmethod
    def attach_file(path: str | Path, name: Optional[str] = None) -> None:
        path = Path(path)
        if not path.is_file():
            Logger.warning(f"Attachment {path} does not exist")
            return
        allure.attach.file(str(path), name=name or path.name)

    # ================================
    #          METADATA
    # ================================

    @staticmethod
    def set_title(title: str) -> None:
        allure.dynamic.title(title)

    @staticmethod
    def add_parameters(params: Dict[str, Any]) -> None:
        for key, value in (params or {}).items():
            allure.dynamic.parameter(key, "" if value is None else str(value))

    @staticmethod
    def write_environment(props: Dict[str, Any], results_dir: Optional[str] = None) -> Path:
        """environment.properties shown on the report overview."""
        results = Path(results_dir or os.getenv("ALLURE_RESULTS_DIR", "allure-results"))
        results.mkdir(parents=True, exist_ok=True)
        target = results / "environment.properties"
        target.write_text("\n".join(f"{k} = {v}" for k, v in props.items()), encoding="utf-8")
        return target
