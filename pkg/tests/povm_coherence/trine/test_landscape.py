import csv
import json

import numpy as np
import pytest

from core.constants.constants import Constants
from core.report.reporting import AllureReporter as AR
from povm_coherence.enums.output import OutputFormat
from povm_coherence.errors import ConfigurationError, SolverError, ValidationError
from povm_coherence.linalg.entropy import shannon_entropy
from povm_coherence.linalg.states import DensityMatrix
from povm_coherence.povm.catalog import qutrit_split_povm
from povm_coherence.trine import landscape
from povm_coherence.trine.landscape import (
    CSV_HEADER, LandscapeSample, SphereGrid, coherence_landscape, conversion_landscape, render_landscape,
    write_landscape,
)
from povm_coherence.trine.suite import PSI_PI_8, UNREACHABLE_MARGIN, orbit_distance

LOG3 = float(np.log2(3))


class TestSphereGrid:

    def test_parse(self, soft_asserts):
        grid = SphereGrid.parse("181x91")
        soft_asserts.assert_equal((grid.n_phi, grid.n_theta), (181, 91), "NxM is azimuths x polar angles")
        soft_asserts.assert_equal(grid.size, 181 * 91, "Point count")
        soft_asserts.assert_equal(str(SphereGrid.parse("4X3")), "4x3", "Case-insensitive separator")

    @pytest.mark.parametrize("spec", ["", "10", "10x", "axb", "1x5", "5x1", "3x3x3"])
    def test_invalid_grids(self, spec, hard_asserts):
        hard_asserts.assert_raises(lambda: SphereGrid.parse(spec), ConfigurationError)

    def test_theta_major_order(self, hard_asserts):
        points = SphereGrid(3, 2).points()
        hard_asserts.assert_allclose(points, [(0, 0), (0, np.pi), (0, 2 * np.pi),
                                              (np.pi, 0), (np.pi, np.pi), (np.pi, 2 * np.pi)], 1e-15,
                                     "theta outer, phi inner, endpoints included")


class TestCoherenceLandscape:

    def test_trine_landscape_values(self, soft_asserts):
        AR.set_title("Trine coherence landscape: poles and equator")
        samples = coherence_landscape("7x5", threads=1)
        by_point = {(round(s.theta, 9), round(s.phi, 9)): s for s in samples}

        soft_asserts.assert_len(samples, 35, "One sample per grid point")
        soft_asserts.assert_true(all(abs(s.bloch.norm - 1) < 1e-12 for s in samples), "Pure states on the sphere")
        soft_asserts.assert_true(all(abs(s.value - LOG3) < 1e-8 for s in samples if s.theta in (0.0, np.pi)),
                                 "Poles have coherence log2 3")
        plus = by_point[(round(np.pi / 2, 9), 0.0)]
        soft_asserts.assert_close(plus.value, shannon_entropy([2 / 3, 1 / 6, 1 / 6]), 1e-8,
                                  "+x is the m_1 direction")
        soft_asserts.assert_true(min(s.value for s in samples) >= 1 - 1e-8, "Pure states have at least one bit")

    def test_invariant_under_trine_rotation(self, hard_asserts):
        AR.set_title("Rotating by 2 pi/3 about z leaves the landscape unchanged")
        grid = SphereGrid(4, 5)
        values = np.array([s.value for s in coherence_landscape(grid, threads=1)]).reshape(5, 4)
        hard_asserts.assert_allclose(values[:, 1:], values[:, :-1], 1e-9, "phi -> phi + 2 pi/3")

    def test_thread_count_does_not_change_values(self, hard_asserts):
        one = coherence_landscape("9x7", threads=1)
        four = coherence_landscape("9x7", threads=4)
        hard_asserts.assert_allclose([s.row() for s in four], [s.row() for s in one], 0, "Same rows, same order")

    def test_needs_qubit_povm(self, hard_asserts):
        hard_asserts.assert_raises(lambda: coherence_landscape("3x3", qutrit_split_povm()), ValidationError)


class TestOutput:

    def test_csv_rendering(self, soft_asserts):
        samples = coherence_landscape("3x2", threads=1)
        text = render_landscape(samples)
        AR.attach_csv(text, "landscape.csv")
        rows = list(csv.reader(text.splitlines()))

        soft_asserts.assert_equal(tuple(rows[0]), CSV_HEADER, "Header theta,phi,bx,by,bz,value")
        soft_asserts.assert_len(rows, 7, "Header plus six points")
        soft_asserts.assert_close(float(rows[1][5]), samples[0].value, 1e-15, "Values written in full precision")

    @pytest.mark.parametrize("fmt, suffix", [(OutputFormat.CSV, "csv"), (OutputFormat.JSON, "json")])
    def test_write_landscape(self, tmp_path, fmt, suffix, hard_asserts):
        AR.set_title(f"Landscape written as {suffix}")
        samples = coherence_landscape("3x3", threads=1)
        path = write_landscape(samples, tmp_path / "out" / f"landscape.{suffix}", fmt)
        AR.attach_file(path, f"landscape.{suffix}")

        text = path.read_text(encoding="utf-8")
        if fmt == OutputFormat.JSON:
            loaded = json.loads(text)
            hard_asserts.assert_len(loaded, 9, "Nine JSON records")
            hard_asserts.assert_equal(sorted(loaded[0]), sorted(CSV_HEADER), "Record keys")
        else:
            hard_asserts.assert_len(text.strip().splitlines(), 10, "Header and nine rows")

    def test_unknown_format(self, hard_asserts):
        hard_asserts.assert_raises(lambda: render_landscape([], "xml"), ValidationError)


class TestConversionLandscape:

    def test_ket0_reaches_the_whole_sphere(self, solver, hard_asserts):
        AR.set_title("Conversion landscape from |0> is flat at one")
        samples = conversion_landscape(DensityMatrix.basis(2, 0), "3x3", threads=1, **solver)
        worst = min(s.value for s in samples)
        hard_asserts.assert_true(worst >= 1 - 1e-5, f"Worst fidelity {worst:.8f}")

    def test_needs_qubit_state(self, hard_asserts):
        hard_asserts.assert_raises(lambda: conversion_landscape(DensityMatrix.maximally_mixed(3), "3x3"),
                                   ValidationError)

    def test_psi_reaches_exactly_its_orbit(self, x_min, solver, soft_asserts):
        AR.set_title("Conversion landscape from psi(pi/8): one on the orbit, clearly below one elsewhere")
        # theta in {0, pi/4, pi/2, 3 pi/4, pi}, phi in {0, 2 pi/3, 4 pi/3, 2 pi}: every orbit point is on the grid
        samples = conversion_landscape(PSI_PI_8.density(), SphereGrid(4, 5), x=x_min, threads=2, **solver)
        AR.attach_csv(render_landscape(samples), "psi_landscape.csv")
        on_orbit = [s for s in samples if orbit_distance(s.theta, s.phi) < 1e-6]
        off_orbit = [s for s in samples if orbit_distance(s.theta, s.phi) >= 1e-6]
        at_psi = next(s for s in samples if np.isclose(s.theta, np.pi / 4) and s.phi == 0.0)

        soft_asserts.assert_true(all(s.solved for s in samples), "Every point solved")
        soft_asserts.assert_close(at_psi.value, 1.0, 1e-5, "psi converts to itself")
        soft_asserts.assert_len(on_orbit, 8, "Six orbit points, two of them repeated at phi = 2 pi")
        soft_asserts.assert_len({(round(s.theta, 6), round(s.phi % (2 * np.pi), 6)) for s in on_orbit}, 6,
                                "Six distinct orbit points")
        for s in on_orbit:
            soft_asserts.assert_close(s.value, 1.0, 1e-5, f"Orbit point theta={s.theta:.4f}, phi={s.phi:.4f}")
        for s in off_orbit:
            soft_asserts.assert_true(orbit_distance(s.theta, s.phi) >= 0.1, "Off-orbit grid points are far")
            soft_asserts.assert_less_equal(s.value, 1 - UNREACHABLE_MARGIN,
                                           f"Off-orbit point theta={s.theta:.4f}, phi={s.phi:.4f}")

    def test_failed_points_are_retried_then_left_unsolved(self, monkeypatch, soft_asserts):
        AR.set_title("A point the solver cannot finish is retried at a looser tolerance, then written as NaN")
        tolerances = []

        def failing_fmax(rho, sigma, x, tol, max_iters):
            tolerances.append(tol)
            raise SolverError("SDP backend failed: float division by zero")

        monkeypatch.setattr(landscape, "fmax", failing_fmax)
        samples = conversion_landscape(DensityMatrix.basis(2, 0), "2x2", threads=1, tol=1e-9)
        text = render_landscape(samples)

        soft_asserts.assert_len(samples, 4, "Every grid point still has a sample")
        soft_asserts.assert_false(any(s.solved for s in samples), "No point solved")
        soft_asserts.assert_equal(tolerances[:2], [1e-9, 1e-9 * Constants.RETRY_TOL_FACTOR], "One looser retry")
        soft_asserts.assert_len(tolerances, 8, "Two attempts per point")
        soft_asserts.assert_equal(text.splitlines()[1].split(",")[-1], "nan", "CSV marks the value as nan")
        soft_asserts.assert_equal(samples[0].to_dict()["value"], None, "JSON marks the value as null")

    def test_retry_recovers_a_point(self, monkeypatch, hard_asserts):
        real_fmax = landscape.fmax
        calls = []

        def flaky_fmax(rho, sigma, x, tol, max_iters):
            calls.append(tol)
            if len(calls) == 1:
                raise SolverError("SDP backend failed: float division by zero")
            return real_fmax(rho, sigma, x, tol=tol, max_iters=max_iters)

        monkeypatch.setattr(landscape, "fmax", flaky_fmax)
        samples = conversion_landscape(DensityMatrix.basis(2, 0), "2x2", threads=1)
        hard_asserts.assert_true(all(s.solved and s.value >= 1 - 1e-5 for s in samples), "Retried point solved")

    def test_infinite_values_rejected(self, hard_asserts):
        hard_asserts.assert_raises(lambda: LandscapeSample.at(0.0, 0.0, float("inf")), ValidationError)
