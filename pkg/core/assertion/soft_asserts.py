from __future__ import annotations

import pytest_check as soft_assert_check

from core.assertion.base_assertion import BaseAssertion
from core.report.reporting import AllureReporter


class SoftAsserts(BaseAssertion):
    """Failing checks are collected by pytest_check and reported when the test ends."""

    def _conclude(self, ok: bool, description: str) -> None:
        if soft_assert_check.is_true(ok, description):
            AllureReporter.attach_text(description, "Soft checkpoint PASSED")
