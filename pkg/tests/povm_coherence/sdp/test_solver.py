import json

import numpy as np
import pytest

from core.report.reporting import AllureReporter as AR
from povm_coherence.enums.sdp_status import SdpStatus, Sense
from povm_coherence.errors import SolverError, ValidationError
from povm_coherence.linalg.entropy import fidelity
from povm_coherence.linalg.random import random_density
from povm_coherence.linalg.states import DensityMatrix, PureState
from povm_coherence.sdp.fidelity import fidelity_sdp, lambda_max_sdp, max_trace_below_identity
from povm_coherence.sdp.problem import (
    HermitianSdpProblem, LinearSystem, SdpProblem, complex_to_real_embed, entry_functionals,
    hermitian_from_embedding, real_embedding,
)
from povm_coherence.sdp.solver import solve


class TestOracles:

    def test_fidelity_matches_closed_form(self, rng, hard_asserts):
        AR.set_title("Fidelity SDP agrees with tr|sqrt(rho) sqrt(sigma)|")
        worst = 0.0
        for _ in range(50):
            d = int(rng.integers(2, 4))
            rho, sigma = random_density(d, rng), random_density(d, rng)
            worst = max(worst, abs(fidelity_sdp(rho, sigma) - fidelity(rho, sigma)))
        AR.add_parameters({"worst_deviation": worst})
        hard_asserts.assert_less_equal(worst, 1e-6, "Largest deviation over 50 pairs")

    @pytest.mark.parametrize("rho, sigma, expected", [
        (DensityMatrix.basis(2, 0), DensityMatrix.basis(2, 0), 1.0),
        (DensityMatrix.basis(2, 0), DensityMatrix.basis(2, 1), 0.0),
        (DensityMatrix.basis(2, 0), PureState.from_angles(np.pi / 2, 0.0).density(), 1 / np.sqrt(2)),
        (DensityMatrix.basis(3, 2), DensityMatrix.maximally_mixed(3), 1 / np.sqrt(3)),
    ], ids=["same pure", "orthogonal", "|0> and |+>", "pure against mixed"])
    def test_fidelity_of_rank_deficient_states(self, rho, sigma, expected, hard_asserts):
        AR.set_title("Fidelity SDP on states without full rank")
        hard_asserts.assert_close(fidelity_sdp(rho, sigma), expected, 1e-6, "Root fidelity")

    def test_lambda_max_matches_eigvalsh(self, rng, hard_asserts):
        AR.set_title("Largest-eigenvalue SDP agrees with a dense eigensolver")
        worst = 0.0
        for _ in range(20):
            n = int(rng.integers(2, 6))
            a = rng.standard_normal((n, n))
            a = (a + a.T) / 2
            worst = max(worst, abs(lambda_max_sdp(a) - float(np.linalg.eigvalsh(a)[-1])))
        hard_asserts.assert_less_equal(worst, 1e-7, "Largest deviation over 20 matrices")

    @pytest.mark.parametrize("d", [1, 2, 4])
    def test_max_trace_below_identity(self, d, hard_asserts):
        hard_asserts.assert_close(max_trace_below_identity(d), float(d), 1e-7, f"max tr X with X <= 1 is {d}")

    def test_oracle_input_validation(self, soft_asserts):
        soft_asserts.assert_raises(lambda: lambda_max_sdp(np.array([[0, 1j], [-1j, 0]])), ValidationError)
        soft_asserts.assert_raises(lambda: lambda_max_sdp(np.array([[0, 1], [0, 0]])), ValidationError)
        soft_asserts.assert_raises(lambda: max_trace_below_identity(0), ValidationError)
        qubit, qutrit = DensityMatrix.maximally_mixed(2), DensityMatrix.maximally_mixed(3)
        soft_asserts.assert_raises(lambda: fidelity_sdp(qubit, qutrit), ValidationError)


class TestSolver:

    def test_minimize_sense(self, hard_asserts):
        AR.set_title("Minimization returns the smallest eigenvalue")
        a = np.diag([3.0, -2.0, 1.0])
        problem = SdpProblem(block_dims=(3,), objective=(a,), constraint_blocks=(np.eye(3)[None],), rhs=np.ones(1),
                             sense=Sense.MINIMIZE)
        solution = solve(problem)

        hard_asserts.assert_equal(solution.status, SdpStatus.OPTIMAL, "Solved to optimality")
        hard_asserts.assert_close(solution.objective_value, -2.0, 1e-7, "min <A, X> = lambda_min")
        hard_asserts.assert_close(solution.X[0][1, 1], 1.0, 1e-5, "Optimal point concentrates on e_2")
        hard_asserts.assert_less_equal(solution.primal_residual, 1e-7, "Primal feasibility")
        hard_asserts.assert_less_equal(solution.gap, 1e-6, "Duality gap")
        hard_asserts.assert_less_equal(solution.dual_residual, 1e-7, "Dual feasibility")

    def test_infeasible_problem(self, hard_asserts):
        problem = SdpProblem(block_dims=(2,), objective=(np.zeros((2, 2)),), constraint_blocks=(np.eye(2)[None],),
                             rhs=-np.ones(1))
        solution = solve(problem)
        hard_asserts.assert_equal(solution.status, SdpStatus.INFEASIBLE, "tr X = -1 has no PSD solution")
        hard_asserts.assert_false(solution.near_optimal(), "Infeasible result is not usable")

    def test_problem_validation(self, soft_asserts):
        AR.set_title("Malformed problems are rejected before solving")
        soft_asserts.assert_raises(
            lambda: SdpProblem(block_dims=(2,), objective=(np.eye(3),), constraint_blocks=(np.eye(2)[None],),
                               rhs=np.ones(1)), ValidationError)
        soft_asserts.assert_raises(
            lambda: SdpProblem(block_dims=(2,), objective=(np.eye(2),),
                               constraint_blocks=(np.array([[[0.0, 1.0], [0.0, 0.0]]]),), rhs=np.ones(1)),
            ValidationError)
        soft_asserts.assert_raises(
            lambda: HermitianSdpProblem(block_dims=(2,), objective=(np.eye(2),), constraint_blocks=(np.eye(2)[None],),
                                        rhs=np.array([1j])), ValidationError)
        empty = SdpProblem(block_dims=(2,), objective=(np.eye(2),), constraint_blocks=(np.zeros((0, 2, 2)),),
                           rhs=np.zeros(0))
        soft_asserts.assert_raises(lambda: solve(empty), SolverError)


class TestRealEmbedding:

    def test_embedding_preserves_spectrum(self, rng, hard_asserts):
        h = random_density(3, rng).matrix
        big = real_embedding(h)
        doubled = np.sort(np.repeat(np.linalg.eigvalsh(h), 2))

        hard_asserts.assert_allclose(np.linalg.eigvalsh(big), doubled, 1e-12, "Each eigenvalue appears twice")
        hard_asserts.assert_allclose(hermitian_from_embedding(big), h, 1e-15, "Embedding is invertible")

    def test_hermitian_problem_solves_through_embedding(self, hard_asserts):
        AR.set_title("Complex Hermitian SDP solved through its real embedding")
        h = np.array([[1.0, 1j], [-1j, 1.0]])
        problem = HermitianSdpProblem(block_dims=(2,), objective=(h,), constraint_blocks=(np.eye(2)[None],),
                                      rhs=np.ones(1), sense=Sense.MAXIMIZE)
        solution = solve(complex_to_real_embed(problem))
        hard_asserts.assert_close(solution.objective_value, 2.0, 1e-7, "lambda_max of [[1, i], [-i, 1]] is 2")

    def test_debug_dumps(self, soft_asserts):
        AR.set_title("Both problem forms dump to JSON with their blocks and constraints")
        h = np.array([[1.0, 1j], [-1j, 1.0]])
        complex_problem = HermitianSdpProblem(block_dims=(2, 1), objective=(h, np.zeros((1, 1))),
                                              constraint_blocks=(np.eye(2)[None], np.ones((1, 1, 1))),
                                              rhs=np.ones(1))
        real_problem = complex_to_real_embed(complex_problem)
        complex_dump, real_dump = complex_problem.to_dict(), real_problem.to_dict()
        AR.attach_json(complex_dump, "hermitian problem")
        AR.attach_json(real_dump, "real problem")

        soft_asserts.assert_equal(json.loads(json.dumps(complex_dump)), complex_dump, "Hermitian dump is plain JSON")
        soft_asserts.assert_equal(complex_dump["block_dims"], [2, 1], "Hermitian block sizes")
        soft_asserts.assert_equal(complex_dump["objective"][0][0][1], [0.0, 1.0], "Entries as [re, im] pairs")
        soft_asserts.assert_len(complex_dump["constraints"], 1, "One constraint")
        soft_asserts.assert_len(complex_dump["constraints"][0], 2, "One coefficient block per variable block")
        soft_asserts.assert_equal(real_dump["block_dims"], [4, 2], "Embedding doubles every block")
        soft_asserts.assert_equal(real_dump["rhs"], [1.0], "Right-hand side unchanged")
        soft_asserts.assert_equal(real_dump["sense"], complex_dump["sense"], "Sense unchanged")
        soft_asserts.assert_equal(real_dump["objective"][0][2][1], 0.5, "Im H sits in the lower-left block, halved")


class TestLinearSystem:

    def test_dependent_rows_are_dropped(self, hard_asserts):
        system = LinearSystem(block_dims=(2,))
        system.add("first", {0: entry_functionals(2, [(0, 0), (0, 1)])}, np.array([0.5, 0.25j]))
        system.add("again", {0: entry_functionals(2, [(0, 0)], weight=2.0)}, np.array([1.0]))
        reduced = system.reduce()

        hard_asserts.assert_true(reduced.consistent, "Duplicated constraint is consistent")
        hard_asserts.assert_equal(reduced.rank, 3, "H_00, Re H_01 and Im H_01 are independent; the copy is not")
        hard_asserts.assert_equal(reduced.raw_rows, 4, "Four nontrivial real rows before reduction")

    def test_inconsistent_system_reported(self, soft_asserts):
        AR.set_title("Contradictory equalities are detected before solving")
        system = LinearSystem(block_dims=(2,))
        system.add("one", {0: entry_functionals(2, [(0, 0)])}, np.array([1.0]))
        system.add("two", {0: entry_functionals(2, [(0, 0)])}, np.array([2.0]))
        reduced = system.reduce()

        soft_asserts.assert_false(reduced.consistent, "H_00 = 1 and H_00 = 2")
        soft_asserts.assert_true(reduced.residual > 0.1, "Residual reflects the contradiction")

    def test_shape_and_emptiness_errors(self, soft_asserts):
        system = LinearSystem(block_dims=(2,))
        soft_asserts.assert_raises(lambda: system.reduce(), SolverError)
        soft_asserts.assert_raises(lambda: system.add("bad", {0: np.zeros((1, 3, 3))}, np.zeros(1)), ValidationError)
