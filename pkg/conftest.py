import os
import platform

import cvxopt
import numpy as np
import pytest
import scipy
from dotenv import load_dotenv

load_dotenv()

from core.assertion.assertions import AssertionInterface
from core.assertion.hard_asserts import HardAsserts
from core.assertion.soft_asserts import SoftAsserts
from core.configuration.configuration import Configuration
from core.logging.logging import Logger
Logger.setup_logging()

from core.report.reporting import AllureReporter


def pytest_addoption(parser):
    """
    Add command line options for pytest:
    --povm-config: key=value configuration file (same format as the CLI --config)
    --run-slow: also run tests marked slow (canonical-extension SDPs, dense landscapes)
    """
    group = parser.getgroup("povm_coherence")
    group.addoption("--povm-config", dest="povm_config", action="store", default=None,
                    help="Path to a key=value configuration file (optional)")
    group.addoption("--run-slow", dest="run_slow", action="store_true", default=False,
                    help="Run tests marked slow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("run_slow") or os.getenv("RUN_SLOW"):
        return
    skip_slow = pytest.mark.skip(reason="slow; pass --run-slow to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


# ================================
#          COMMON FIXTURES
# ================================


@pytest.fixture(scope="session")
def cfg(pytestconfig) -> Configuration:
    """Fixture provides a global configuration object for the entire session."""
    cli_path = pytestconfig.getoption("povm_config")
    return Configuration.from_sources(cli_config_path=cli_path)


@pytest.fixture(scope="function")
def rng(cfg) -> np.random.Generator:
    """Fresh generator per test so results do not depend on test order."""
    return np.random.default_rng(cfg.seed)


@pytest.fixture(scope="session", autouse=True)
def _allure_env():
    AllureReporter.write_environment({
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "cvxopt": cvxopt.__version__,
        "seed": os.getenv("POVM_SEED", "0"),
    })


@pytest.hookimpl(hookwrapper=True, tryfirst=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call" and rep.failed:
        try:
            AllureReporter.attach_text(rep.longreprtext, f"{item.name} - failed")
        except Exception:
            Logger.info("Failed to attach failure details")


# ================================
#          ASSERTION
# ================================

@pytest.fixture(scope="function", autouse=True)
def hard_asserts() -> AssertionInterface:
    """Provide automatic Hard Asserts for every test case."""
    return HardAsserts()


@pytest.fixture(scope="function", autouse=True)
def soft_asserts() -> AssertionInterface:
    """Provide automatic Soft Asserts for every test case."""
    yield SoftAsserts()
