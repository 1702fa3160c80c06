"""Pure-qubit coherence and conversion-fidelity landscapes on an equiangular sphere grid."""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.constants.constants import Constants
from core.logging.logging import Logger
from povm_coherence.enums.output import OutputFormat, convert_to_output_format
from povm_coherence.errors import ConfigurationError, SolverError, ValidationError
from povm_coherence.linalg.states import BlochVector, DensityMatrix, PureState
from povm_coherence.measures.coherence import coherence_value
from povm_coherence.naimark.construction import minimal_extension
from povm_coherence.naimark.extension import NaimarkExtension
from povm_coherence.povm.catalog import trine_povm
from povm_coherence.povm.povm import Povm
from povm_coherence.sdp.fidelity import fmax

CSV_HEADER = ("theta", "phi", "bx", "by", "bz", "value")


@dataclass(frozen=True)
class SphereGrid:
    """n_phi azimuths in [0, 2 pi] times n_theta polar angles in [0, pi]."""
    n_phi: int
    n_theta: int

    def __post_init__(self):
        if self.n_phi < 2 or self.n_theta < 2:
            raise ConfigurationError(f"Grid needs at least 2 x 2 points, got {self.n_phi}x{self.n_theta}")

    @classmethod
    def parse(cls, spec: str) -> "SphereGrid":
        """'181x91' -> 181 azimuths, 91 polar angles."""
        try:
            n_phi, n_theta = (int(part) for part in str(spec).lower().split("x"))
        except ValueError as e:
            raise ConfigurationError(f"Grid must look like NxM, got {spec!r}") from e
        return cls(n_phi, n_theta)

    @property
    def size(self) -> int:
        return self.n_phi * self.n_theta

    def points(self) -> List[Tuple[float, float]]:
        """(theta, phi) pairs, theta-major."""
        thetas = np.linspace(0.0, np.pi, self.n_theta)
        phis = np.linspace(0.0, 2 * np.pi, self.n_phi)
        return [(float(t), float(p)) for t in thetas for p in phis]

    def __str__(self) -> str:
        return f"{self.n_phi}x{self.n_theta}"


@dataclass(frozen=True)
class LandscapeSample:
    """One grid point; ``value`` is NaN where the solver gave up."""
    theta: float
    phi: float
    bloch: BlochVector
    value: float

    def __post_init__(self):
        if np.isinf(self.value):
            raise ValidationError(f"Landscape value at theta={self.theta}, phi={self.phi} is infinite")

    @property
    def solved(self) -> bool:
        return not np.isnan(self.value)

    @classmethod
    def at(cls, theta: float, phi: float, value: float) -> "LandscapeSample":
        bloch = BlochVector((np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)))
        return cls(theta, phi, bloch, float(value))

    def row(self) -> Tuple[float, ...]:
        return (self.theta, self.phi, *self.bloch.r, self.value)

    def to_dict(self) -> Dict[str, Any]:
        out = dict(zip(CSV_HEADER, self.row()))
        if not self.solved:
            out["value"] = None
        return out


def pure_state_at(theta: float, phi: float) -> DensityMatrix:
    return PureState.from_angles(theta, phi).density()


def _sweep(points: Sequence[Tuple[float, float]], evaluate: Callable[[float, float], float],
           threads: Optional[int]) -> List[LandscapeSample]:
    workers = max(1, threads or os.cpu_count() or 1)

    def sample(point: Tuple[float, float]) -> LandscapeSample:
        return LandscapeSample.at(point[0], point[1], evaluate(*point))

    if workers == 1:
        samples = [sample(pt) for pt in points]
    else:
        # map keeps grid order
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(sample, points))
    Logger.info(f"Landscape: {len(samples)} points on {workers} thread(s)")
    unsolved = sum(not s.solved for s in samples)
    if unsolved:
        Logger.error(f"Landscape: {unsolved} point(s) left unsolved and written as NaN")
    return samples


def coherence_landscape(grid: SphereGrid | str, p: Optional[Povm] = None,
                        threads: Optional[int] = None) -> List[LandscapeSample]:
    """C_rel(|psi(theta, phi)>) for every grid point (default POVM: trine)."""
    grid = SphereGrid.parse(grid) if isinstance(grid, str) else grid
    p = (p or trine_povm()).require_valid()
    if p.dim != 2:
        raise ValidationError(f"Sphere landscapes need a qubit POVM, got dim {p.dim}")
    return _sweep(grid.points(), lambda t, ph: coherence_value(pure_state_at(t, ph), p), threads)


def conversion_landscape(rho: DensityMatrix, grid: SphereGrid | str, p: Optional[Povm] = None,
                         x: Optional[NaimarkExtension] = None, threads: Optional[int] = None,
                         tol: float = Constants.SOLVER_TOL,
                         max_iters: int = Constants.SOLVER_MAX_ITERS) -> List[LandscapeSample]:
    """F_max(rho -> |psi(theta, phi)>) over POVM-incoherent channels for every grid point."""
    grid = SphereGrid.parse(grid) if isinstance(grid, str) else grid
    if rho.dim != 2:
        raise ValidationError(f"Conversion landscapes need a qubit state, got dim {rho.dim}")
    x = x or minimal_extension((p or trine_povm()).require_valid())

    def evaluate(theta: float, phi: float) -> float:
        sigma = pure_state_at(theta, phi)
        try:
            return fmax(rho, sigma, x, tol=tol, max_iters=max_iters).value
        except SolverError as e:
            Logger.warning(f"fmax at theta={theta:.4f}, phi={phi:.4f} failed ({e}); "
                           f"retrying at tol {tol * Constants.RETRY_TOL_FACTOR:g}")
        try:
            return fmax(rho, sigma, x, tol=tol * Constants.RETRY_TOL_FACTOR, max_iters=max_iters).value
        except SolverError as e:
            Logger.error(f"fmax at theta={theta:.4f}, phi={phi:.4f} failed again: {e}")
            return float("nan")

    return _sweep(grid.points(), evaluate, threads)


def render_landscape(samples: Iterable[LandscapeSample], fmt: OutputFormat | str = OutputFormat.CSV) -> str:
    fmt = convert_to_output_format(fmt)
    if fmt == OutputFormat.JSON:
        return json.dumps([s.to_dict() for s in samples], indent=2)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerows(s.row() for s in samples)
    return buffer.getvalue()


def write_landscape(samples: Iterable[LandscapeSample], path: Union[str, Path],
                    fmt: OutputFormat | str = OutputFormat.CSV) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render_landscape(samples, fmt), encoding="utf-8")
    Logger.info(f"Landscape written to {path}")
    return path
