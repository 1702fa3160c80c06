import os
from importlib import resources
from pathlib import Path
from typing import Any, Dict

import pytest

from core.constants.constants import Constants
from core.logging.logging import Logger
from core.utils.json_utils import load_json_as
from povm_coherence.naimark.construction import canonical_extension, minimal_extension
from povm_coherence.naimark.extension import NaimarkExtension
from povm_coherence.povm.catalog import trine_povm
from povm_coherence.povm.povm import Povm, canonical_kraus
from tests.povm_coherence.data.coherence_case import CoherenceCase
from tests.povm_coherence.data.pic_case import PicCase

RESOURCE_ROOT = Path(str(resources.files(Constants.RESOURCE_PACKAGE)))
CASES_JSON = os.getenv("POVM_CASES_JSON") or str(RESOURCE_ROOT / "cases.json")


def resource_path(*parts: str) -> Path:
    return RESOURCE_ROOT.joinpath(*parts)


@pytest.fixture(scope="module")
def all_cases() -> Dict[str, Any]:
    """Load the entire cases JSON file once per module."""
    try:
        return load_json_as(CASES_JSON, lambda data: data)
    except Exception:
        raise ValueError(f"Cannot load test cases file {CASES_JSON}.")


def _case(all_cases: Dict[str, Any], section: str, case_id: str) -> Dict[str, Any]:
    cases = all_cases.get(section, {})
    if case_id not in cases:
        raise ValueError(f"Case '{case_id}' not found in section '{section}' of {CASES_JSON}.")
    Logger.debug(f"Using {section} case '{case_id}'")
    return cases[case_id]


@pytest.fixture(scope="function")
def coherence_case(request, all_cases) -> CoherenceCase:
    """Coherence case for the id in 'request.param'."""
    return load_json_as(_case(all_cases, "coherence", request.param), CoherenceCase.from_dict)


@pytest.fixture(scope="function")
def pic_case(request, all_cases) -> PicCase:
    """PIC case for the id in 'request.param'."""
    return load_json_as(_case(all_cases, "pic", request.param), lambda d: PicCase.from_dict(d, RESOURCE_ROOT))


# ================================
#          TRINE FIXTURES
# ================================


@pytest.fixture(scope="session")
def trine() -> Povm:
    return trine_povm()


@pytest.fixture(scope="session")
def x_min(trine) -> NaimarkExtension:
    return minimal_extension(trine)


@pytest.fixture(scope="session")
def x_can(trine) -> NaimarkExtension:
    return canonical_extension(canonical_kraus(trine))


@pytest.fixture(scope="session")
def solver(cfg) -> Dict[str, Any]:
    """Solver keyword arguments taken from the session configuration."""
    return {"tol": cfg.solver_tol, "max_iters": cfg.max_iters}
