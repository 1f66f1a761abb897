# services/paths/geometry.py
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from config_services import numerics
from exceptions import ContractViolationError, StructuralError
from interfaces import IEvolutionSolver
from services.liealg.algebra import LieRep, batch_bracket
from services.paths.evolution import default_solver
from services.paths.models import HomotopyGrid, SphereFamily, morphism_residual
from utils.integrators import SampledField, finite_difference, rk4

logger = logging.getLogger(__name__)


def rep_flow(rep: LieRep, samples: np.ndarray, steps: int) -> np.ndarray:
    """Phi(1) for Phi' = -rho(x(s)) Phi, Phi(0) = id, along uniform samples of x."""
    field = SampledField(rep.action(np.asarray(samples, dtype=float)))
    return rk4(lambda s, y: -field(s) @ y, np.eye(rep.dim), 0.0, 1.0, steps)


@dataclass
class HgeomReport:
    ok: bool
    residual: float
    tolerance: float
    morphism_residual: float

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "morphism_residual": self.morphism_residual,
        }


def verify_hgeom(grid: HomotopyGrid, rep: LieRep, steps: Optional[int] = None,
                 tol: Optional[float] = None) -> HgeomReport:
    """
    Flow commutation around the square for a = alpha, b = beta.

    Compares the flow of b(t=0, .) followed by a(., eps=1) with the flow of
    a(., eps=0) followed by b(t=1, .); they agree when (a, b) is a morphism.
    """
    if grid.b is None:
        raise ContractViolationError("verify_hgeom", "the grid carries no b component")
    if rep.algebra.dim != grid.algebra.dim:
        raise StructuralError("representation", grid.algebra.dim, rep.algebra.dim)
    if not rep.is_faithful():
        raise ContractViolationError("verify_hgeom", "representation is not faithful")
    settings = numerics()
    steps = settings.steps if steps is None else steps
    threshold = settings.tol_ode if tol is None else tol

    upper = rep_flow(rep, grid.a[:, -1], steps) @ rep_flow(rep, grid.b[0], steps)
    lower = rep_flow(rep, grid.b[-1], steps) @ rep_flow(rep, grid.a[:, 0], steps)
    residual = float(np.max(np.abs(upper - lower)))
    report = HgeomReport(ok=residual <= threshold, residual=residual, tolerance=threshold,
                         morphism_residual=morphism_residual(grid))
    logger.info(f"[PATHS] [HGEOM] flow commutation residual {residual:.3e}")
    return report


@dataclass
class ThetaReport:
    """Result of sphere_theta; grids are indexed (t, eps, u)"""
    theta: np.ndarray
    alpha: np.ndarray
    pde_residual: float
    boundary_residual: float
    terminal_residual: float
    pde_tolerance: float
    tolerance: float

    @property
    def boundary_ok(self) -> bool:
        return self.boundary_residual <= self.tolerance

    @property
    def pde_ok(self) -> bool:
        return self.pde_residual <= self.pde_tolerance

    @property
    def ok(self) -> bool:
        return self.boundary_ok and self.pde_ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "pde_residual": self.pde_residual,
            "pde_tolerance": self.pde_tolerance,
            "boundary_residual": self.boundary_residual,
            "terminal_residual": self.terminal_residual,
            "tolerance": self.tolerance,
        }


def _eps_evolution(solver: IEvolutionSolver, algebra, values: np.ndarray) -> np.ndarray:
    """y with d_eps y = d_x b - [b, y], y(eps=0) = 0; values and y are indexed (eps, x, ..., n)."""
    return solver.solve(algebra, values, np.zeros(values.shape[1:]))


def sphere_theta(family: SphereFamily, solver: Optional[IEvolutionSolver] = None,
                 tol: Optional[float] = None) -> ThetaReport:
    """
    du-component theta of a family of spheres, from d_eps theta - d_u b = [theta, b]
    with theta(eps=0) = 0.

    The dt-component is taken from the family when present, otherwise solved the
    same way from d_eps a - d_t b = [a, b]. Reports the residual of
    d_t theta - d_u a = [theta, a] at interior nodes against tol_grid at the
    (t, eps) spacing of the spheres, the values of theta on the edges t = 0 and
    t = 1, and the terminal slice theta(eps=1).
    """
    solver = solver or default_solver()
    settings = numerics()
    threshold = settings.tol_ode if tol is None else tol
    algebra = family.algebra
    N, M, U = (size - 1 for size in family.shape)
    b = family.b

    # all t slices in one solve: (eps, u, t, n)
    theta = _eps_evolution(solver, algebra, b.transpose(1, 2, 0, 3)).transpose(2, 0, 1, 3)
    if family.a is not None:
        alpha = family.a
    else:
        alpha = _eps_evolution(solver, algebra, b.transpose(1, 0, 2, 3)).transpose(1, 0, 2, 3)

    defect = (finite_difference(theta, 1.0 / N, axis=0) - finite_difference(alpha, 1.0 / U, axis=2)
              - batch_bracket(algebra, theta, alpha))
    interior = defect[1:-1, 1:-1, 1:-1]
    pde = float(np.max(np.abs(interior))) if interior.size else 0.0
    boundary = float(max(np.max(np.abs(theta[0])), np.max(np.abs(theta[-1]))))
    terminal = float(np.max(np.abs(theta[:, -1])))
    report = ThetaReport(theta=theta, alpha=alpha, pde_residual=pde, boundary_residual=boundary,
                         terminal_residual=terminal, pde_tolerance=settings.tol_grid(max(1.0 / N, 1.0 / M)),
                         tolerance=threshold)
    logger.info(f"[PATHS] [SPHERE] pde residual {pde:.3e}, boundary {boundary:.3e}, terminal {terminal:.3e}")
    return report
