import csv
import json

import numpy as np
import pytest

from core.report.reporting import AllureReporter as AR
from core.utils.registry import get_command_class
from povm_coherence.cli.commands.pic_check import PicCheckCommand
from povm_coherence.cli.main import EXIT_ERROR, EXIT_OK, EXIT_SUITE_FAILED, build_parser, main
from tests.povm_coherence.conftest import resource_path

LOG3 = float(np.log2(3))


def _path(*parts: str) -> str:
    return str(resource_path(*parts))


def run_cli(capsys, *argv: str):
    code = main(list(argv))
    captured = capsys.readouterr()
    AR.attach_text(captured.err, "stderr")
    return code, captured.out, captured.err


class TestCoherenceCommands:

    def test_coherence(self, capsys, hard_asserts):
        AR.set_title("coherence prints the value and its entropy terms")
        code, out, _ = run_cli(capsys, "coherence", _path("povms", "trine.json"), _path("states", "zero.json"))
        data = json.loads(out)

        hard_asserts.assert_equal(code, EXIT_OK, "Exit code 0")
        hard_asserts.assert_close(data["value"], LOG3, 1e-8, "C(|0>) = log2 3")
        hard_asserts.assert_false(data["incoherent"], "|0> is not trine-incoherent")

    def test_builtin_povm_name(self, capsys, hard_asserts):
        code, out, _ = run_cli(capsys, "coherence", "trine", _path("states", "maximally_mixed.json"))
        hard_asserts.assert_equal(code, EXIT_OK, "Exit code 0")
        hard_asserts.assert_close(json.loads(out)["value"], LOG3 - 1, 1e-8, "C(1/2) = log2 3 - 1")

    @pytest.mark.parametrize("kind, d_prime", [("minimal", 3), ("canonical", 6)])
    def test_naimark(self, capsys, kind, d_prime, soft_asserts):
        AR.set_title(f"naimark --kind {kind}")
        code, out, _ = run_cli(capsys, "naimark", "trine", "--kind", kind)
        data = json.loads(out)

        soft_asserts.assert_equal(code, EXIT_OK, "Exit code 0")
        soft_asserts.assert_equal(data["d_prime"], d_prime, "Extension dimension")
        soft_asserts.assert_len(data["projectors"], 3, "One projector per outcome")
        soft_asserts.assert_true(data["diagnostics"]["ok"], "Extension validates")


class TestSdpCommands:

    @pytest.mark.parametrize("command", ["pic-check", "pic"])
    def test_pic_check(self, capsys, command, soft_asserts):
        AR.set_title(f"{command} decides POVM incoherence")
        code, out, _ = run_cli(capsys, command, "trine", _path("channels", "rz_2pi_3.json"))
        data = json.loads(out)

        soft_asserts.assert_equal(code, EXIT_OK, "Exit code 0")
        soft_asserts.assert_true(data["feasible"], "R_z(2 pi/3) is free")
        soft_asserts.assert_equal(data["kind"], "minimal", "Minimal extension by default")

    def test_pic_check_infeasible(self, capsys, hard_asserts):
        code, out, _ = run_cli(capsys, "pic-check", "trine", _path("channels", "hadamard.json"))
        hard_asserts.assert_equal(code, EXIT_OK, "A negative verdict is still a successful run")
        hard_asserts.assert_false(json.loads(out)["feasible"], "Hadamard is not free")

    def test_fmax(self, capsys, soft_asserts):
        AR.set_title("fmax from |0> to psi(pi/8)")
        code, out, _ = run_cli(capsys, "fmax", "trine", _path("states", "zero.json"), _path("states", "psi_pi_8.json"))
        data = json.loads(out)

        soft_asserts.assert_equal(code, EXIT_OK, "Exit code 0")
        soft_asserts.assert_true(data["fmax"] >= 1 - 1e-5, "|0> reaches every state")
        soft_asserts.assert_in(data["status"], ["optimal", "max_iterations"], "Usable solver status")

    def test_fmax_to_a_more_coherent_state(self, capsys, soft_asserts):
        AR.set_title("fmax from psi(pi/8) to |0> solves and stays below one")
        code, out, _ = run_cli(capsys, "fmax", "trine", _path("states", "psi_pi_8.json"), _path("states", "zero.json"))

        soft_asserts.assert_equal(code, EXIT_OK, "Exit code 0")
        soft_asserts.assert_less_equal(json.loads(out)["fmax"], 1 - 1e-3, "Coherence cannot grow")

    def test_fmax_cptp_channels(self, capsys, hard_asserts):
        code, out, _ = run_cli(capsys, "fmax", "trine", _path("states", "psi_pi_8.json"), _path("states", "zero.json"),
                               "--channels", "cptp")
        hard_asserts.assert_equal(code, EXIT_OK, "Exit code 0")
        hard_asserts.assert_close(json.loads(out)["fmax"], 1.0, 1e-5, "Unrestricted channels reach |0>")


class TestLandscapeCommand:

    def test_landscape_to_csv_file(self, capsys, tmp_path, soft_asserts):
        AR.set_title("landscape writes a CSV file and prints a summary")
        out_file = tmp_path / "landscape.csv"
        code, out, _ = run_cli(capsys, "landscape", "--grid", "5x3", "--out", str(out_file))
        summary = json.loads(out)
        with out_file.open(encoding="utf-8") as fh:
            rows = list(csv.reader(fh))

        soft_asserts.assert_equal(code, EXIT_OK, "Exit code 0")
        soft_asserts.assert_equal(summary["points"], 15, "5 x 3 grid")
        soft_asserts.assert_equal(rows[0], ["theta", "phi", "bx", "by", "bz", "value"], "CSV header")
        soft_asserts.assert_len(rows, 16, "Header plus 15 rows")

    def test_landscape_json_to_stdout(self, capsys, hard_asserts):
        code, out, _ = run_cli(capsys, "landscape", "trine", "--grid", "3x2", "--format", "json")
        hard_asserts.assert_equal(code, EXIT_OK, "Exit code 0")
        hard_asserts.assert_len(json.loads(out), 6, "Six records")

    def test_conversion_needs_state(self, capsys, hard_asserts):
        code, _, err = run_cli(capsys, "landscape", "--mode", "conversion", "--grid", "3x2")
        hard_asserts.assert_equal(code, EXIT_ERROR, "Exit code 2")
        hard_asserts.assert_in("--state", err, "Error names the missing flag")


class TestSuiteAndErrors:

    def test_perturbed_trine_suite_fails(self, capsys, soft_asserts):
        AR.set_title("trine-suite exits 1 when a check fails")
        code, out, _ = run_cli(capsys, "trine-suite", "--perturb", "1.01")
        data = json.loads(out)

        soft_asserts.assert_equal(code, EXIT_SUITE_FAILED, "Exit code 1")
        soft_asserts.assert_false(data["passed"], "Suite failed")
        soft_asserts.assert_equal(data["n_failed"], 1, "Completeness check failed")

    def test_perturbed_povm_file_rejected(self, capsys, hard_asserts):
        code, _, err = run_cli(capsys, "coherence", _path("povms", "trine_perturbed.json"),
                               _path("states", "zero.json"))
        hard_asserts.assert_equal(code, EXIT_ERROR, "Invalid POVM files are input errors")
        hard_asserts.assert_in("error:", err, "Message on stderr")

    def test_missing_file(self, capsys, tmp_path, hard_asserts):
        code, out, err = run_cli(capsys, "coherence", "trine", str(tmp_path / "missing.json"))
        hard_asserts.assert_equal(code, EXIT_ERROR, "Exit code 2")
        hard_asserts.assert_in("error:", err, "Message on stderr")
        hard_asserts.assert_equal(out, "", "Nothing on stdout")

    def test_bad_grid(self, capsys, hard_asserts):
        code, _, err = run_cli(capsys, "landscape", "--grid", "10")
        hard_asserts.assert_equal(code, EXIT_ERROR, "Exit code 2")
        hard_asserts.assert_in("NxM", err, "Grid format explained")

    def test_unknown_command(self, capsys, hard_asserts):
        with pytest.raises(SystemExit) as exc:
            main(["entropy"])
        hard_asserts.assert_equal(exc.value.code, 2, "argparse usage error")

    @pytest.mark.parametrize("name", ["pic-check", "pic", "PIC"])
    def test_registry_resolves_aliases(self, name, hard_asserts):
        build_parser()
        hard_asserts.assert_equal(get_command_class(name), PicCheckCommand, f"'{name}' resolves to pic-check")
        hard_asserts.assert_true(get_command_class("entropy") is None, "Unknown names resolve to None")
