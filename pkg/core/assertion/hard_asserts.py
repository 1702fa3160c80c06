from __future__ import annotations

from core.assertion.base_assertion import BaseAssertion


class HardAsserts(BaseAssertion):
    """First failing check stops the test."""

    def _conclude(self, ok: bool, description: str) -> None:
        assert ok, description
