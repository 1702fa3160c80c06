import pytest

from core.report.reporting import AllureReporter as AR
from povm_coherence.povm.catalog import perturbed
from povm_coherence.trine.suite import run_trine_suite


class TestTrineSuite:

    def test_quick_suite_passes(self, cfg, soft_asserts):
        AR.set_title("Quick trine suite passes every check")
        report = run_trine_suite(config=cfg, quick=True)
        AR.attach_json(report.to_dict(), "trine suite")

        for check in report.checks:
            soft_asserts.assert_true(check.passed, f"{check.name}: expected {check.expected}, got {check.actual}")
        soft_asserts.assert_true(report.passed, f"{len(report.failures)} failed checks")
        soft_asserts.assert_true(report.quick, "Quick flag recorded")
        soft_asserts.assert_equal(report.checks[-1].name, "runtime within budget", "Runtime check comes last")
        soft_asserts.assert_in("psi reaches no target off its orbit", [c.name for c in report.checks],
                               "Off-orbit targets checked")

    def test_perturbed_povm_fails_validation(self, cfg, trine, hard_asserts):
        AR.set_title("A perturbed POVM stops the suite at validation")
        report = run_trine_suite(perturbed(trine, 0, 1.01), config=cfg, quick=True)

        hard_asserts.assert_false(report.passed, "Suite fails")
        hard_asserts.assert_equal([c.name for c in report.checks], ["povm is valid", "runtime within budget"],
                                  "Only validation and the runtime check ran")
        hard_asserts.assert_equal(report.to_dict()["n_failed"], 1, "One failure reported")
        hard_asserts.assert_true(report.checks[-1].passed, "Runtime within budget")

    def test_budget_overrun_is_reported(self, cfg, trine, hard_asserts):
        AR.set_title("A run slower than its budget fails the runtime check")
        report = run_trine_suite(perturbed(trine, 0, 1.01), config=cfg, quick=True, budget_seconds=0.0)
        budget = report.checks[-1]

        hard_asserts.assert_equal(budget.name, "runtime within budget", "Runtime check comes last")
        hard_asserts.assert_false(budget.passed, "Any positive wall clock exceeds a zero budget")
        hard_asserts.assert_equal(report.to_dict()["n_failed"], 2, "Validation and runtime both failed")

    @pytest.mark.slow
    def test_full_suite_passes(self, cfg, hard_asserts):
        AR.set_title("Full trine suite including canonical-extension SDPs")
        report = run_trine_suite(config=cfg)
        AR.attach_json(report.to_dict(), "trine suite")
        hard_asserts.assert_true(report.passed, f"Failed: {[c.name for c in report.failures]}")
