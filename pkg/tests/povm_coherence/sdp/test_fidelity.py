import numpy as np
import pytest

from core.report.reporting import AllureReporter as AR
from povm_coherence.enums.sdp_status import ChannelClass
from povm_coherence.errors import ValidationError
from povm_coherence.linalg.entropy import fidelity
from povm_coherence.linalg.random import random_density
from povm_coherence.linalg.states import DensityMatrix
from povm_coherence.sdp.fidelity import fmax
from povm_coherence.superop.representations import choi_diagnostics, choi_from_process
from povm_coherence.trine.landscape import pure_state_at
from povm_coherence.trine.suite import OFF_ORBIT_POINTS, PSI_PI_8, UNREACHABLE_MARGIN, orbit_distance
from povm_coherence.trine.unitaries import trine_incoherent_unitaries

ZERO = DensityMatrix.basis(2, 0)
UNITARIES = trine_incoherent_unitaries()


class TestConversionFromMaximal:

    @pytest.mark.parametrize("n_targets", [
        10,
        pytest.param(50, marks=pytest.mark.slow),
    ])
    def test_ket0_reaches_every_state(self, rng, x_min, solver, n_targets, hard_asserts):
        AR.set_title("|0> converts to any state under free operations")
        values = [fmax(ZERO, random_density(2, rng), x_min, **solver).value for _ in range(n_targets)]
        AR.add_parameters({"targets": n_targets, "worst": min(values)})
        hard_asserts.assert_true(min(values) >= 1 - 1e-5, f"Worst fidelity {min(values):.8f}")

    def test_optimal_process_is_a_channel(self, rng, x_min, solver, soft_asserts):
        sigma = random_density(2, rng)
        result = fmax(ZERO, sigma, x_min, **solver)
        report = choi_diagnostics(choi_from_process(result.process), tol=1e-6)

        soft_asserts.assert_true(report.cptp, "Returned process is CPTP")
        soft_asserts.assert_close(fidelity(result.process.apply_state(ZERO), sigma), result.value, 1e-4,
                                  "Returned process attains the reported fidelity")
        soft_asserts.assert_true(0.0 <= result.value <= 1.0, "Value clipped to [0, 1]")


class TestTrineOrbit:

    @pytest.mark.parametrize("label, u", UNITARIES, ids=[label for label, _ in UNITARIES])
    def test_orbit_is_reachable(self, label, u, x_min, solver, hard_asserts):
        AR.set_title(f"psi converts to U{label} psi")
        psi = PSI_PI_8.density()
        value = fmax(psi, psi.evolve(u), x_min, **solver).value
        hard_asserts.assert_true(value >= 1 - 1e-5, f"Fidelity {value:.8f}")

    @pytest.mark.parametrize("pole", [0, 1], ids=["ket0", "ket1"])
    def test_poles_are_out_of_reach(self, pole, x_min, solver, hard_asserts):
        AR.set_title(f"psi does not convert to |{pole}>")
        result = fmax(PSI_PI_8.density(), DensityMatrix.basis(2, pole), x_min, **solver)
        AR.attach_json(result.to_dict(), "fmax")
        hard_asserts.assert_less_equal(result.value, 1 - UNREACHABLE_MARGIN, f"Fidelity to |{pole}>")

    @pytest.mark.slow
    @pytest.mark.parametrize("pole", [0, 1], ids=["ket0", "ket1"])
    def test_poles_are_out_of_reach_on_canonical_extension(self, pole, x_min, x_can, solver, soft_asserts):
        AR.set_title(f"psi does not convert to |{pole}> whichever extension carries the SDP")
        target = DensityMatrix.basis(2, pole)
        canonical = fmax(PSI_PI_8.density(), target, x_can, **solver).value
        minimal = fmax(PSI_PI_8.density(), target, x_min, **solver).value

        soft_asserts.assert_less_equal(canonical, 1 - UNREACHABLE_MARGIN, f"Fidelity to |{pole}> on d' = 6")
        soft_asserts.assert_close(canonical, minimal, 1e-5, "Both extensions give the same optimum")

    @pytest.mark.parametrize("theta, phi", OFF_ORBIT_POINTS,
                             ids=[f"{theta:.3f},{phi:.3f}" for theta, phi in OFF_ORBIT_POINTS])
    def test_off_orbit_targets_stay_below_one(self, theta, phi, x_min, solver, hard_asserts):
        AR.add_parameters({"theta": theta, "phi": phi, "orbit_distance": orbit_distance(theta, phi)})
        value = fmax(PSI_PI_8.density(), pure_state_at(theta, phi), x_min, **solver).value
        hard_asserts.assert_less_equal(value, 1 - UNREACHABLE_MARGIN, "Off-orbit pure target")

    def test_designated_targets_are_far_from_the_orbit(self, soft_asserts):
        soft_asserts.assert_len(OFF_ORBIT_POINTS, 20, "Twenty designated targets")
        nearest = min(orbit_distance(theta, phi) for theta, phi in OFF_ORBIT_POINTS)
        soft_asserts.assert_true(nearest >= 0.35, f"Nearest target is {nearest:.4f} rad from the orbit")

    def test_orbit_distance_vanishes_on_the_orbit(self, hard_asserts):
        hard_asserts.assert_close(orbit_distance(np.pi / 4, 0.0), 0.0, 1e-7, "psi itself")
        hard_asserts.assert_close(orbit_distance(3 * np.pi / 4, 2 * np.pi / 3), 0.0, 1e-7, "X then R_z image")

    def test_coherence_cannot_grow(self, x_min, solver, hard_asserts):
        AR.set_title("psi does not convert to the more coherent |0>")
        result = fmax(PSI_PI_8.density(), ZERO, x_min, **solver)
        AR.attach_json(result.to_dict(), "fmax")
        hard_asserts.assert_less_equal(result.value, 1 - UNREACHABLE_MARGIN, "Fidelity stays strictly below one")

    def test_optimal_process_for_an_unreachable_target(self, x_min, solver, soft_asserts):
        AR.set_title("The maximizer for psi -> |0> is a channel that attains the optimum")
        psi = PSI_PI_8.density()
        result = fmax(psi, ZERO, x_min, **solver)
        report = choi_diagnostics(choi_from_process(result.process), tol=1e-6)

        soft_asserts.assert_true(report.cptp, f"CPTP (min eigenvalue {report.min_eigenvalue:.2e})")
        soft_asserts.assert_close(fidelity(result.process.apply_state(psi), ZERO), result.value, 1e-4,
                                  "Fidelity of the returned channel's output")


class TestChannelClasses:

    def test_cptp_relaxation_dominates(self, rng, x_min, solver, soft_asserts):
        AR.set_title("Dropping block incoherence can only raise the optimum")
        pairs = [(PSI_PI_8.density(), ZERO)] + [(random_density(2, rng), random_density(2, rng)) for _ in range(8)]
        for i, (rho, sigma) in enumerate(pairs):
            pic = fmax(rho, sigma, x_min, mode=ChannelClass.PIC, **solver).value
            cptp = fmax(rho, sigma, x_min, mode=ChannelClass.CPTP, **solver).value
            soft_asserts.assert_true(cptp >= pic - 1e-6, f"pair {i}: CPTP {cptp:.6f} >= PIC {pic:.6f}")
            soft_asserts.assert_close(cptp, 1.0, 1e-5, f"pair {i}: some channel prepares sigma")

    def test_dimension_mismatch(self, x_min, hard_asserts):
        hard_asserts.assert_raises(lambda: fmax(DensityMatrix.maximally_mixed(3), ZERO, x_min), ValidationError)

    def test_mode_from_string(self, x_min, solver, hard_asserts):
        value = fmax(ZERO, ZERO, x_min, mode="cptp", **solver).value
        hard_asserts.assert_close(value, 1.0, 1e-5, "Identity attains F = 1")
