from abc import ABC, abstractmethod
from contextlib import contextmanager
from typing import Any, Callable, Dict, Iterable, Optional, Tuple

import numpy as np
import numpy.typing as npt
import pytest

from core.assertion.assertions import AssertionInterface
from core.logging.logging import Logger
from core.report.reporting import AllureReporter


class BaseAssertion(AssertionInterface, ABC):
    """
    Evaluates every check once and hands the outcome to _conclude(); subclasses decide
    whether a failing check stops the test (hard) or is collected (soft).
    """

    @abstractmethod
    def _conclude(self, ok: bool, description: str) -> None:
        raise NotImplementedError

    @classmethod
    @contextmanager
    def assertion_step(cls, description: str):
        with AllureReporter.step(description):
            yield

    def _check(self, title: str, ok: bool, description: str, evidence: Optional[Dict[str, Any]] = None) -> None:
        with self.assertion_step(f"{title}: {description}"):
            if evidence is not None:
                BaseAssertion.attach_json_allure(title, evidence)
            if ok:
                Logger.info(f"PASS: {description}")
            else:
                Logger.error(f"FAIL: {description}")
            self._conclude(bool(ok), description)

    # ================================
    #           GENERIC
    # ================================

    def assert_equal(self, actual: Any, expected: Any, msg: str) -> None:
        description = f"{msg} | Expected: {expected!r}, Actual: {actual!r}"
        self._check("Assert equal", actual == expected, description, {"expected": expected, "actual": actual})

    def assert_true(self, expr: bool, msg: str) -> None:
        self._check("Assert true", bool(expr), f"{msg} |Condition: {expr}")

    def assert_false(self, expr: bool, msg: str) -> None:
        self._check("Assert false", not expr, f"{msg} |Condition: {expr}")

    def assert_in(self, member: Any, container: Iterable[Any], msg: str) -> None:
        ok = member in container
        self._check("Assert in", ok, f"{msg} |{member!r} {'found' if ok else 'not found'} in container",
                    None if ok else {"container": _display(container)})

    def assert_not_in(self, member: Any, container: Iterable[Any], msg: str) -> None:
        ok = member not in container
        verdict = "absent from" if ok else "unexpectedly found in"
        self._check("Assert not in", ok, f"{msg} |{member!r} {verdict} container",
                    None if ok else {"container": _display(container)})

    def assert_len(self, obj: Any, expected_len: int, msg: str) -> None:
        actual_len = len(obj)
        self._check("Assert length", actual_len == expected_len,
                    f"{msg} | Expected: {expected_len}, Actual: {actual_len}",
                    {"expected_len": expected_len, "actual_len": actual_len})

    def assert_between(self, num: float, lo: float, hi: float, inclusive: bool = True,
                       msg: Optional[str] = None) -> None:
        ok = (lo <= num <= hi) if inclusive else (lo < num < hi)
        description = f"{msg} |{num} in range [{lo}, {hi}{']' if inclusive else ')'}"
        self._check("Assert between", ok, description, {"value": num, "lo": lo, "hi": hi, "inclusive": inclusive})

    # ================================
    #           NUMERIC
    # ================================

    def assert_close(self, actual: float, expected: float, atol: float, msg: str) -> None:
        deviation = abs(actual - expected)
        description = f"{msg} | Expected: {expected!r} ± {atol}, Actual: {actual!r}"
        self._check("Assert close", bool(deviation <= atol), description,
                    {"expected": expected, "actual": actual, "deviation": deviation, "atol": atol})

    def assert_allclose(self, actual: npt.ArrayLike, expected: npt.ArrayLike, atol: float, msg: str) -> None:
        same_shape, deviation = BaseAssertion.max_deviation(actual, expected)
        ok = same_shape and deviation <= atol
        description = f"{msg} | max deviation {deviation:.3e} (atol {atol})"
        self._check("Assert allclose", ok, description,
                    None if ok else {"expected": np.asarray(expected), "actual": np.asarray(actual)})

    def assert_less_equal(self, actual: float, bound: float, msg: str) -> None:
        self._check("Assert less or equal", actual <= bound, f"{msg} | {actual!r} <= {bound!r}",
                    {"actual": actual, "bound": bound})

    # ================================
    #           HELPERS
    # ================================

    @staticmethod
    def assert_raises(fn: Callable, exc: type[BaseException]) -> BaseException:
        """Expect the function to throw an exception; return the exception to continue asserting the property."""
        with pytest.raises(exc) as exc_info:
            fn()
        return exc_info.value

    @staticmethod
    def attach_json_allure(title: str, data: Any) -> None:
        """Helper to attach JSON data to Allure report."""
        AllureReporter.attach_json(data, title)

    @staticmethod
    def max_deviation(actual: npt.ArrayLike, expected: npt.ArrayLike) -> Tuple[bool, float]:
        """(shapes match, max |actual - expected|)."""
        a, b = np.asarray(actual), np.asarray(expected)
        if a.shape != b.shape:
            return False, float("inf")
        return True, float(np.max(np.abs(a - b), initial=0.0))


def _display(container: Iterable[Any]) -> Any:
    return list(container) if not isinstance(container, (str, bytes)) else {"text": container}
