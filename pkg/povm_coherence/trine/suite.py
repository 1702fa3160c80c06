"""
End-to-end trine validation: every analytic number of the trine example, checked in one run.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from core.configuration.configuration import Configuration
from core.logging.logging import Logger
from povm_coherence.errors import PovmCoherenceError
from povm_coherence.linalg.entropy import shannon_entropy
from povm_coherence.linalg.matrices import equal_up_to_phase
from povm_coherence.linalg.random import make_rng, random_density
from povm_coherence.linalg.states import BlochVector, DensityMatrix, PureState, density_to_bloch
from povm_coherence.measures.coherence import c_rel_povm_from_extension, coherence_value, is_povm_incoherent
from povm_coherence.measures.extremal import max_coherence_pure, min_coherence_qubit
from povm_coherence.naimark.construction import canonical_extension, minimal_extension
from povm_coherence.povm.catalog import OMEGA, mixed_unitary_povm, trine_directions, trine_povm
from povm_coherence.povm.povm import Povm, canonical_kraus, validate
from povm_coherence.sdp.fidelity import fmax
from povm_coherence.sdp.pic import pic_feasibility
from povm_coherence.superop.representations import KrausChannel
from povm_coherence.trine.landscape import pure_state_at
from povm_coherence.trine.unitaries import (
    closed_under_products, derive_incoherent_unitaries, maps_directions, rz, same_unitary_set,
    trine_incoherent_unitaries,
)

LOG3 = float(np.log2(3))
PSI_PI_8 = PureState(np.array([np.cos(np.pi / 8), np.sin(np.pi / 8)], dtype=complex))

# (theta, phi) targets at least 0.35 rad from every U psi_pi/8, the poles included
OFF_ORBIT_POINTS: Tuple[Tuple[float, float], ...] = (
    (0.0, 0.0), (np.pi, 0.0),
    *((np.pi / 2, phi) for phi in (0.0, 2 * np.pi / 3, 4 * np.pi / 3)),
    *((np.pi / 2, phi) for phi in (np.pi / 3, np.pi, 5 * np.pi / 3)),
    *((np.pi / 4, phi) for phi in (np.pi / 3, np.pi, 5 * np.pi / 3)),
    *((3 * np.pi / 4, phi) for phi in (np.pi / 3, np.pi, 5 * np.pi / 3)),
    *((np.pi / 8, phi) for phi in (0.0, 2 * np.pi / 3, 4 * np.pi / 3)),
    *((7 * np.pi / 8, phi) for phi in (np.pi / 3, np.pi, 5 * np.pi / 3)),
)
UNREACHABLE_MARGIN = 1e-3

Outcome = Tuple[bool, Any, Any, str]


def orbit_bloch_vectors(psi: PureState = PSI_PI_8) -> np.ndarray:
    """Bloch vectors of U psi for the six trine-incoherent unitaries, one per row."""
    rho = psi.density()
    return np.array([density_to_bloch(rho.evolve(u)).as_array() for _, u in trine_incoherent_unitaries()])


def orbit_distance(theta: float, phi: float, psi: PureState = PSI_PI_8) -> float:
    """Smallest Bloch-sphere angle between |psi(theta, phi)> and the orbit of psi."""
    r = PureState.from_angles(theta, phi).bloch().as_array()
    return float(np.min(np.arccos(np.clip(orbit_bloch_vectors(psi) @ r, -1.0, 1.0))))


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    expected: Any
    actual: Any
    detail: str = ""
    seconds: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "expected": _plain(self.expected),
                "actual": _plain(self.actual), "detail": self.detail, "seconds": round(self.seconds, 4)}


def _plain(value: Any) -> Any:
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


@dataclass
class SuiteReport:
    checks: List[CheckResult] = field(default_factory=list)
    quick: bool = False

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    @property
    def seconds(self) -> float:
        return sum(c.seconds for c in self.checks)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "quick": self.quick,
            "n_checks": len(self.checks),
            "n_failed": len(self.failures),
            "seconds": round(self.seconds, 3),
            "checks": [c.to_dict() for c in self.checks],
        }


class _Runner:
    def __init__(self, report: SuiteReport):
        self.report = report

    def check(self, name: str, fn: Callable[[], Outcome]) -> CheckResult:
        start = time.perf_counter()
        try:
            passed, expected, actual, detail = fn()
        except PovmCoherenceError as e:
            passed, expected, actual, detail = False, None, None, f"{type(e).__name__}: {e}"
        result = CheckResult(name, bool(passed), expected, actual, detail, time.perf_counter() - start)
        Logger.info(f"[{'PASS' if result.passed else 'FAIL'}] {name} ({result.seconds:.2f}s)")
        self.report.checks.append(result)
        return result


def _close(actual: float, expected: float, tol: float, detail: str = "") -> Outcome:
    return abs(actual - expected) <= tol, expected, actual, detail or f"tolerance {tol:g}"


def _within_budget(run: _Runner, started: float, budget: float) -> None:
    elapsed = time.perf_counter() - started
    run.check("runtime within budget", lambda: (elapsed <= budget, f"<= {budget:g} s", round(elapsed, 3), "wall clock"))


def run_trine_suite(povm: Optional[Povm] = None, config: Optional[Configuration] = None,
                    quick: bool = False, budget_seconds: Optional[float] = None) -> SuiteReport:
    """
    Run every trine check; ``quick`` skips the canonical-extension SDPs.

    The last check compares the wall clock against ``budget_seconds`` (default: the configured suite budget).
    """
    started = time.perf_counter()
    cfg = config or Configuration.from_sources()
    budget = cfg.suite_budget if budget_seconds is None else budget_seconds
    p = povm or trine_povm()
    report = SuiteReport(quick=quick)
    run = _Runner(report)

    diagnostics = validate(p, tol=cfg.tol)
    run.check("povm is valid", lambda: (diagnostics.ok, True, diagnostics.ok, "; ".join(diagnostics.messages)))
    if not diagnostics.ok:
        Logger.error("POVM is invalid; remaining trine checks skipped")
        _within_budget(run, started, budget)
        return report

    solver = dict(tol=cfg.solver_tol, max_iters=cfg.max_iters)
    rng = make_rng(cfg.seed)

    # ---- coherence values ----
    run.check("C(|0>) = log2 3", lambda: _close(coherence_value(DensityMatrix.basis(2, 0), p), LOG3, 1e-8))
    run.check("C(|1>) = log2 3", lambda: _close(coherence_value(DensityMatrix.basis(2, 1), p), LOG3, 1e-8))
    run.check("C(1/2) = log2 3 - 1",
              lambda: _close(coherence_value(DensityMatrix.maximally_mixed(2), p), LOG3 - 1, 1e-8))
    for i, m in enumerate(trine_directions(), start=1):
        run.check(f"C(-m_{i}) = 1", lambda m=m: _close(coherence_value(BlochVector(tuple(-m)).density(), p), 1.0, 1e-8))
    run.check("C(+m_1) = H(2/3, 1/6, 1/6)",
              lambda: _close(coherence_value(BlochVector(tuple(trine_directions()[0])).density(), p),
                             shannon_entropy([2 / 3, 1 / 6, 1 / 6]), 1e-8))

    def minimum() -> Outcome:
        result = min_coherence_qubit(p)
        norm = result.bloch.norm
        return norm < 1e-5 and abs(result.value - (LOG3 - 1)) < 1e-8, 0.0, norm, f"value {result.value:.12f}"

    run.check("minimal coherence at the maximally mixed state", minimum)
    run.check("maximal pure coherence = log2 3",
              lambda: _close(max_coherence_pure(p, grid_points=cfg.sphere_points, seed=cfg.seed).value, LOG3, 1e-6))

    def no_incoherent_state() -> Outcome:
        mixed = DensityMatrix.maximally_mixed(2)
        verdict = is_povm_incoherent(mixed, p, cfg.incoherence_tol)
        return not verdict.incoherent, False, verdict.incoherent, f"residual {verdict.max_residual:.3e}"

    run.check("minimizer is not POVM-incoherent", no_incoherent_state)

    # ---- extensions ----
    x_min = minimal_extension(p)
    run.check("minimal extension d' = 3", lambda: (x_min.d_prime == 3, 3, x_min.d_prime, ""))

    def range_vectors() -> Outcome:
        expected = [np.array([1, OMEGA ** k, OMEGA ** (-k)]) / np.sqrt(3) for k in range(3)]
        ok = all(any(equal_up_to_phase(proj @ v, v, 1e-9) for proj in x_min.projectors) for v in expected)
        return ok, True, ok, "projector ranges (1, w^k, w^-k)/sqrt(3)"

    run.check("minimal extension projector ranges", range_vectors)
    x_can = canonical_extension(canonical_kraus(p))
    run.check("canonical extension d' = 6", lambda: (x_can.d_prime == 6, 6, x_can.d_prime, ""))

    def independence() -> Outcome:
        worst = 0.0
        for _ in range(10):
            rho = random_density(2, rng)
            worst = max(worst, abs(c_rel_povm_from_extension(rho, x_min) - c_rel_povm_from_extension(rho, x_can)),
                        abs(c_rel_povm_from_extension(rho, x_min) - coherence_value(rho, p)))
        return worst < 1e-8, 0.0, worst, "max deviation over 10 random states"

    run.check("coherence independent of the extension", independence)

    # ---- incoherent unitaries ----
    listed = trine_incoherent_unitaries()

    def derived_match() -> Outcome:
        same = same_unitary_set(derive_incoherent_unitaries(x_min), listed)
        return same, True, same, "up to global phase"

    run.check("derived unitaries match the list", derived_match)

    def closed() -> Outcome:
        ok = closed_under_products(listed)
        return ok, True, ok, "products up to global phase"

    def permutes() -> Outcome:
        each = [maps_directions(u) for _, u in listed]
        return all(each), True, each, ""

    run.check("unitaries form a closed group", closed)
    run.check("unitaries permute the trine directions", permutes)

    # ---- PIC characterization ----
    def pic(channel: KrausChannel, want: bool, x=x_min) -> Outcome:
        verdict = pic_feasibility(channel, x, feas_threshold=cfg.feas_threshold, **solver)
        return verdict.feasible == want, want, verdict.feasible, f"slack {verdict.slack:.3e}"

    for label, u in listed:
        run.check(f"U{label} is POVM-incoherent", lambda u=u: pic(KrausChannel.unitary(u), True))
    run.check("R_z(pi/5) is not POVM-incoherent", lambda: pic(KrausChannel.unitary(rz(np.pi / 5)), False))
    measurement_map = KrausChannel(canonical_kraus(p).ops)
    run.check("measurement map is POVM-incoherent", lambda: pic(measurement_map, True))
    if not quick:
        run.check("canonical extension: U(231) feasible", lambda: pic(KrausChannel.unitary(listed[1][1]), True, x_can))
        run.check("canonical extension: R_z(pi/5) infeasible",
                  lambda: pic(KrausChannel.unitary(rz(np.pi / 5)), False, x_can))

    def monotone() -> Outcome:
        worst = -np.inf
        channels = [KrausChannel.unitary(u) for _, u in listed] + [measurement_map]
        for _ in range(20):
            rho = random_density(2, rng)
            before = coherence_value(rho, p)
            for ch in channels:
                worst = max(worst, coherence_value(ch.apply(rho), p) - before)
        return worst <= 1e-8, "<= 1e-8", worst, "largest coherence increase"

    run.check("free channels do not increase coherence", monotone)

    # ---- conversion fidelities ----
    zero = DensityMatrix.basis(2, 0)

    def from_maximal() -> Outcome:
        values = [fmax(zero, random_density(2, rng), x_min, **solver).value for _ in range(3 if quick else 10)]
        return min(values) >= 1 - 1e-5, ">= 1 - 1e-5", min(values), f"{len(values)} random targets"

    run.check("|0> converts to any state", from_maximal)
    psi = PSI_PI_8.density()

    def orbit(u: np.ndarray) -> Outcome:
        value = fmax(psi, psi.evolve(u), x_min, **solver).value
        return value >= 1 - 1e-5, ">= 1 - 1e-5", value, ""

    for label, u in listed:
        run.check(f"psi converts to U{label} psi", lambda u=u: orbit(u))

    def strict() -> Outcome:
        value = fmax(psi, zero, x_min, **solver).value
        return value <= 1 - UNREACHABLE_MARGIN, f"<= 1 - {UNREACHABLE_MARGIN:g}", value, "coherence cannot grow"

    run.check("psi does not convert to |0>", strict)

    def off_orbit() -> Outcome:
        values = [fmax(psi, pure_state_at(theta, phi), x_min, **solver).value for theta, phi in OFF_ORBIT_POINTS]
        worst = int(np.argmax(values))
        theta, phi = OFF_ORBIT_POINTS[worst]
        return (values[worst] <= 1 - UNREACHABLE_MARGIN, f"<= 1 - {UNREACHABLE_MARGIN:g}", values[worst],
                f"{len(values)} targets off the orbit; largest at theta={theta:.4f}, phi={phi:.4f}")

    run.check("psi reaches no target off its orbit", off_orbit)

    # ---- mixed-unitary POVM ----
    def mixed_unitary() -> Outcome:
        weights = (0.5, 0.3, 0.2)
        q = mixed_unitary_povm(weights)
        value = coherence_value(random_density(2, rng), q)
        return _close(value, shannon_entropy(weights), 1e-9, "every state has coherence H(p)")

    run.check("mixed-unitary POVM coherence = H(p)", mixed_unitary)
    _within_budget(run, started, budget)

    Logger.info(f"Trine suite: {len(report.checks) - len(report.failures)}/{len(report.checks)} passed "
                f"in {report.seconds:.1f}s")
    return report

