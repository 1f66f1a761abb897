# services/holonomy/monodromy.py
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from config_services import numerics
from exceptions import ContractViolationError, NumericalFailureError
from interfaces import IEvolutionSolver
from services.extension.build import build_extension
from services.extension.couple import Couple, is_admissible
from services.holonomy.splitting import transported_curvature
from services.holonomy.transport import group_element, transport_grid
from services.liealg.algebra import LieRep
from services.paths.evolution import default_solver
from services.paths.models import APath, ASphere, HomotopyGrid
from services.paths.operations import concatenate_homotopies, path_integral
from utils.integrators import integrate

logger = logging.getLogger(__name__)


@dataclass
class MonodromyElement:
    """
    A kernel path representing an element of the simply connected group of K.

    ``group_element`` is its endpoint in a faithful matrix representation,
    when one was supplied.
    """
    kpath: APath
    group_element: Optional[np.ndarray] = None

    @property
    def abelian_value(self) -> np.ndarray:
        """The element itself for an abelian kernel, identified with K by integration."""
        if np.any(self.kpath.algebra.float_constants):
            raise ContractViolationError("MonodromyElement.abelian_value", "the kernel is not abelian")
        return path_integral(self.kpath)

    def to_dict(self) -> dict:
        payload = {"N": self.kpath.N, "samples": self.kpath.samples.tolist()}
        if self.group_element is not None:
            payload["group_element"] = self.group_element.tolist()
        if not np.any(self.kpath.algebra.float_constants):
            payload["abelian_value"] = self.abelian_value.tolist()
        return payload


def _require_admissible(cpl: Couple, operation: str) -> None:
    if not is_admissible(cpl).ok:
        raise ContractViolationError(operation, "couple is not admissible")


def _element(kpath: APath, rep: Optional[LieRep], steps: Optional[int]) -> MonodromyElement:
    return MonodromyElement(kpath=kpath, group_element=group_element(kpath, rep, steps) if rep is not None else None)


def monodromy_partial(cpl: Couple, homotopy: HomotopyGrid, rep: Optional[LieRep] = None,
                      steps: Optional[int] = None, substeps: int = 1) -> MonodromyElement:
    """
    eps -> int_0^1 Phi_s^-1 omega(a, b)(s, eps) ds for a base homotopy a dt + b deps,
    Phi being the transport along a(., eps).
    """
    _require_admissible(cpl, "monodromy_partial")
    if homotopy.b is None:
        raise ContractViolationError("monodromy_partial", "the homotopy carries no b component")
    transports = transport_grid(cpl, homotopy.a, substeps)
    curvature = transported_curvature(cpl, homotopy.a, homotopy.b, transports)
    kpath = APath(cpl.kernel, integrate(curvature, 1.0 / homotopy.N))
    logger.info(f"[HOLONOMY] [MONODROMY] kernel path over {homotopy.M + 1} eps samples")
    return _element(kpath, rep, steps)


def connecting_partial2(cpl: Couple, sphere: ASphere, rep: Optional[LieRep] = None,
                        solver: Optional[IEvolutionSolver] = None, tol: Optional[float] = None,
                        steps: Optional[int] = None) -> MonodromyElement:
    """
    Kernel path t -> alpha(t, eps=1), where alpha solves
    d_eps alpha - d_t h(b) = [alpha, h(b)] in the total algebra with alpha(eps=0) = 0.

    Over a sphere the base part of alpha(., 1) vanishes; leakage above ``tol``
    raises NumericalFailureError.
    """
    _require_admissible(cpl, "connecting_partial2")
    solver = solver or default_solver()
    threshold = numerics().tol_ode if tol is None else tol
    ext = build_extension(cpl)
    grid = sphere.grid
    lifted = np.zeros(grid.b.shape[:2] + (ext.total.dim,))
    lifted[..., ext.base_slice] = grid.b
    alpha = solver.solve(ext.total, lifted.transpose(1, 0, 2), np.zeros((grid.N + 1, ext.total.dim)))
    final = alpha[-1]
    leakage = float(np.max(np.abs(final[:, ext.base_slice])))
    if leakage > threshold:
        logger.error(f"[HOLONOMY] [CONNECTING] horizontal leakage {leakage:.3e}")
        raise NumericalFailureError("horizontal part of the connecting path", leakage, threshold)
    kpath = APath(cpl.kernel, final[:, ext.kernel_slice])
    logger.info(f"[HOLONOMY] [CONNECTING] leakage {leakage:.3e}")
    return _element(kpath, rep, steps)


@dataclass
class CocycleReport:
    ok: bool
    residual: float
    tolerance: float
    combined: np.ndarray
    product: np.ndarray
    cross_check_residual: Optional[float] = None

    def to_dict(self) -> dict:
        payload = {"ok": self.ok, "residual": self.residual, "tolerance": self.tolerance}
        if self.cross_check_residual is not None:
            payload["cross_check_residual"] = self.cross_check_residual
        return payload


def total_monodromy_path(cpl: Couple, homotopy: HomotopyGrid, solver: Optional[IEvolutionSolver] = None,
                         substeps: int = 1) -> APath:
    """
    The monodromy kernel path through the total algebra.

    Evolves the horizontal lift h(a) with beta(t=0) = 0; the vertical part mu
    of beta(t=1, eps) is -Phi_1 k(eps), Phi_1 being the transport along a(., eps).
    """
    _require_admissible(cpl, "total_monodromy_path")
    solver = solver or default_solver()
    ext = build_extension(cpl)
    lifted = np.zeros(homotopy.a.shape[:2] + (ext.total.dim,))
    lifted[..., ext.base_slice] = homotopy.a
    beta = solver.solve(ext.total, lifted, np.zeros((homotopy.M + 1, ext.total.dim)))
    transports = transport_grid(cpl, homotopy.a, substeps)
    vertical = beta[-1][:, ext.kernel_slice]
    return APath(cpl.kernel, -np.linalg.solve(transports[-1], vertical[..., None])[..., 0])


def cocycle_check(cpl: Couple, first: HomotopyGrid, second: HomotopyGrid, rep: LieRep,
                  tol: Optional[float] = None, steps: Optional[int] = None, cross_check: bool = False,
                  solver: Optional[IEvolutionSolver] = None) -> CocycleReport:
    """
    The monodromy of ``first`` followed by ``second`` against the product of the two monodromies.

    With ``cross_check`` the glued monodromy is also computed through the total
    algebra by ``total_monodromy_path``; both residuals must be within ``tol``.
    """
    threshold = numerics().tol_ode if tol is None else tol
    glued = concatenate_homotopies(first, second)
    combined = monodromy_partial(cpl, glued, rep, steps).group_element
    product = monodromy_partial(cpl, first, rep, steps).group_element @ \
        monodromy_partial(cpl, second, rep, steps).group_element
    residual = float(np.max(np.abs(combined - product)))
    ok = residual <= threshold

    cross = None
    if cross_check:
        total = group_element(total_monodromy_path(cpl, glued, solver), rep, steps)
        cross = float(np.max(np.abs(total - combined)))
        ok = ok and cross <= threshold
        logger.info(f"[HOLONOMY] [COCYCLE] total algebra route residual {cross:.3e}")
    logger.info(f"[HOLONOMY] [COCYCLE] residual {residual:.3e}")
    return CocycleReport(ok=ok, residual=residual, tolerance=threshold, combined=combined, product=product,
                         cross_check_residual=cross)
