# services/holonomy/splitting.py
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from config_services import numerics
from exceptions import StructuralError
from interfaces import IEvolutionSolver
from services.extension.build import ExtendedAlgebra, build_extension
from services.extension.couple import Couple
from services.holonomy.transport import transport_grid, transport_path
from services.paths.evolution import is_homotopy, solve_evolution
from services.paths.models import APath, HomotopyGrid
from services.paths.operations import concatenate
from utils.integrators import integrate

logger = logging.getLogger(__name__)


@dataclass
class SplitPath:
    """A path in the total algebra as a base path and a transported kernel path"""
    base_path: APath
    kernel_path: APath

    def __post_init__(self):
        if self.base_path.N != self.kernel_path.N:
            raise StructuralError("split path samples", self.base_path.N, self.kernel_path.N)


def _apply(matrices: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    return np.einsum('...ij,...j->...i', matrices, vectors)


def _unapply(matrices: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    return np.linalg.solve(matrices, vectors[..., None])[..., 0]


def _extension(cpl: Couple, ext: Optional[ExtendedAlgebra]) -> ExtendedAlgebra:
    return ext if ext is not None else build_extension(cpl)


def split_path(cpl: Couple, path: APath, ext: Optional[ExtendedAlgebra] = None, substeps: int = 1) -> SplitPath:
    """a -> (a_B, a_K) with a_B the projection and a_K(t) = Phi_t^-1 (vertical part of a(t))."""
    ext = _extension(cpl, ext)
    if path.algebra.dim != ext.total.dim:
        raise StructuralError("total path", ext.total.dim, path.algebra.dim)
    base = APath(cpl.base, path.samples[:, ext.base_slice])
    transports = transport_path(cpl, base, substeps)
    kernel = APath(cpl.kernel, _unapply(transports, path.samples[:, ext.kernel_slice]))
    return SplitPath(base_path=base, kernel_path=kernel)


def unsplit(cpl: Couple, split: SplitPath, ext: Optional[ExtendedAlgebra] = None, substeps: int = 1) -> APath:
    ext = _extension(cpl, ext)
    transports = transport_path(cpl, split.base_path, substeps)
    vertical = _apply(transports, split.kernel_path.samples)
    return APath(ext.total, np.concatenate([vertical, split.base_path.samples], axis=1))


def concat_split(cpl: Couple, first: SplitPath, second: SplitPath, substeps: int = 1) -> SplitPath:
    """
    Concatenation in split form: the base paths concatenate, the second kernel
    path is pulled back by the transport along the whole first base path.
    """
    end = transport_path(cpl, first.base_path, substeps)[-1]
    pulled = APath(cpl.kernel, _unapply(end[None, ...], second.kernel_path.samples))
    return SplitPath(base_path=concatenate(first.base_path, second.base_path),
                     kernel_path=concatenate(first.kernel_path, pulled))


@dataclass
class SplitHomotopyReport:
    ok: bool
    residual: float
    base_residual: float
    tolerance: float
    terminal: np.ndarray
    expected: np.ndarray
    cross_check_residual: Optional[float] = None

    def to_dict(self) -> dict:
        payload = {
            "ok": self.ok,
            "residual": self.residual,
            "base_residual": self.base_residual,
            "tolerance": self.tolerance,
        }
        if self.cross_check_residual is not None:
            payload["cross_check_residual"] = self.cross_check_residual
        return payload


def transported_curvature(cpl: Couple, a: np.ndarray, b: np.ndarray, transports: np.ndarray) -> np.ndarray:
    """Phi^-1 omega(a, b) at every node, for base grids a and b."""
    omega = np.einsum('...i,...j,ijk->...k', a, b, cpl.float_omega)
    return _unapply(transports, omega)


def split_homotopy_check(cpl: Couple, base: HomotopyGrid, kernel_family: np.ndarray,
                         solver: Optional[IEvolutionSolver] = None, tol: Optional[float] = None,
                         cross_check: bool = False, substeps: int = 1) -> SplitHomotopyReport:
    """
    Decide whether the split paths (a_B(., eps), a_K(., eps)) form a homotopy of total paths.

    The base family must be a homotopy, and the kernel evolution mu with
    d_t mu = d_eps a_K - [a_K, mu], mu(0) = 0, must end at
    int_0^1 Phi_s^-1 omega(a_B, beta_B)(s) ds, beta_B being the base evolution.
    """
    threshold = numerics().tol_ode if tol is None else tol
    kernel_family = np.asarray(kernel_family, dtype=float)
    if kernel_family.shape != base.a.shape[:2] + (cpl.n_kernel,):
        raise StructuralError("kernel family", base.a.shape[:2] + (cpl.n_kernel,), kernel_family.shape)

    beta = solve_evolution(HomotopyGrid(base.algebra, base.a), None, solver)
    base_residual = float(np.max(np.abs(beta[-1])))
    transports = transport_grid(cpl, base.a, substeps)
    expected = integrate(transported_curvature(cpl, base.a, beta, transports), 1.0 / base.N)
    terminal = solve_evolution(HomotopyGrid(cpl.kernel, kernel_family), None, solver)[-1]
    residual = max(float(np.max(np.abs(terminal - expected))), base_residual)

    cross = None
    if cross_check:
        ext = build_extension(cpl)
        total = np.stack([
            unsplit(cpl, SplitPath(APath(cpl.base, base.a[:, j]), APath(cpl.kernel, kernel_family[:, j])),
                    ext, substeps).samples
            for j in range(base.M + 1)
        ], axis=1)
        cross = is_homotopy(HomotopyGrid(ext.total, total), threshold, solver).residual

    report = SplitHomotopyReport(ok=residual <= threshold, residual=residual, base_residual=base_residual,
                                 tolerance=threshold, terminal=terminal, expected=expected,
                                 cross_check_residual=cross)
    logger.info(f"[HOLONOMY] [SPLIT] homotopy residual {residual:.3e} (base {base_residual:.3e})")
    return report
