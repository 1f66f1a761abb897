# services/paths/evolution.py
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from config_services import numerics
from exceptions import StructuralError
from interfaces import IEvolutionSolver
from services.liealg.algebra import LieAlgebra, batch_ad
from services.liealg.flows import derivation_flow_path
from services.paths.models import HomotopyGrid
from utils.integrators import SampledField, cumulative_simpson, finite_difference, rk4

logger = logging.getLogger(__name__)


def _validated(algebra: LieAlgebra, alpha: np.ndarray, beta0: Optional[np.ndarray]):
    alpha = np.asarray(alpha, dtype=float)
    n = algebra.dim
    if alpha.ndim < 3 or alpha.shape[-1] != n or alpha.shape[0] < 2 or alpha.shape[1] < 2:
        raise StructuralError("evolution alpha", f"(N+1, M+1, ..., {n}) with N, M >= 1", alpha.shape)
    if beta0 is None:
        beta0 = np.zeros(alpha.shape[1:])
    beta0 = np.asarray(beta0, dtype=float)
    if beta0.shape != alpha.shape[1:]:
        raise StructuralError("evolution beta0", alpha.shape[1:], beta0.shape)
    return alpha, beta0


class SteppingEvolutionSolver(IEvolutionSolver):
    """
    RK4 in t of d_t beta = d_eps alpha - [alpha, beta], all eps samples at once.
    Axes between eps and the last one are independent problems solved together.

    d_eps alpha comes from 4th-order differences along the eps axis; values
    between t nodes are cubic interpolants.
    """

    name = "stepping"

    def __init__(self, substeps: int = 1):
        self.substeps = substeps

    def solve(self, algebra: LieAlgebra, alpha: np.ndarray, beta0: np.ndarray) -> np.ndarray:
        alpha, beta0 = _validated(algebra, alpha, beta0)
        N, M = alpha.shape[0] - 1, alpha.shape[1] - 1
        drive = SampledField(finite_difference(alpha, 1.0 / M, axis=1))
        generator = SampledField(batch_ad(algebra, alpha))

        def rhs(t, beta):
            return drive(t) - np.einsum('...ij,...j->...i', generator(t), beta)

        path = rk4(rhs, beta0, 0.0, 1.0, N * self.substeps, return_path=True)
        logger.debug(f"[PATHS] [EVOLUTION] stepping solve on {N + 1}x{M + 1} grid")
        return path[::self.substeps]


class IntegralEvolutionSolver(IEvolutionSolver):
    """
    beta(t) = psi_t (beta0 + int_0^t psi_s^-1 d_eps alpha(s) ds), where psi is the
    flow of the derivation -ad(alpha).
    """

    name = "integral"

    def __init__(self, substeps: int = 1):
        self.substeps = substeps

    def solve(self, algebra: LieAlgebra, alpha: np.ndarray, beta0: np.ndarray) -> np.ndarray:
        alpha, beta0 = _validated(algebra, alpha, beta0)
        N, M = alpha.shape[0] - 1, alpha.shape[1] - 1
        drive = finite_difference(alpha, 1.0 / M, axis=1)
        psi = derivation_flow_path(-batch_ad(algebra, alpha), substeps=self.substeps)
        integrand = np.einsum('...ij,...j->...i', np.linalg.inv(psi), drive)
        accumulated = cumulative_simpson(integrand, 1.0 / N)
        logger.debug(f"[PATHS] [EVOLUTION] integral solve on {N + 1}x{M + 1} grid")
        return np.einsum('...ij,...j->...i', psi, beta0[None, ...] + accumulated)


SOLVERS = {
    SteppingEvolutionSolver.name: SteppingEvolutionSolver,
    IntegralEvolutionSolver.name: IntegralEvolutionSolver,
}


def default_solver() -> IEvolutionSolver:
    return SOLVERS[numerics().solver]()


def solve_evolution(grid: HomotopyGrid, beta0: Optional[np.ndarray] = None,
                    solver: Optional[IEvolutionSolver] = None) -> np.ndarray:
    """
    beta on the grid of ``grid.a`` with d_eps a - d_t beta = [a, beta] and
    beta(t=0, eps) = beta0(eps) (zero when omitted).
    """
    solver = solver or default_solver()
    return solver.solve(grid.algebra, grid.a, beta0)


@dataclass
class HomotopyReport:
    ok: bool
    residual: float
    tolerance: float
    terminal: np.ndarray

    def to_dict(self) -> dict:
        return {"ok": self.ok, "residual": self.residual, "tolerance": self.tolerance}


def is_homotopy(grid: HomotopyGrid, tol: Optional[float] = None,
                solver: Optional[IEvolutionSolver] = None) -> HomotopyReport:
    """The family a(., eps) is an A-homotopy iff beta(t=1, eps) = 0 for beta(t=0) = 0."""
    threshold = numerics().tol_ode if tol is None else tol
    beta = solve_evolution(grid, None, solver)
    terminal = beta[-1]
    residual = float(np.max(np.abs(terminal)))
    report = HomotopyReport(ok=residual <= threshold, residual=residual, tolerance=threshold, terminal=terminal)
    if report.ok:
        logger.info(f"[PATHS] [HOMOTOPY] residual {residual:.3e} within {threshold:.1e}")
    else:
        logger.info(f"[PATHS] [HOMOTOPY] not a homotopy: residual {residual:.3e} > {threshold:.1e}")
    return report
