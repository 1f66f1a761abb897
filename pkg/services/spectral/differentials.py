# services/spectral/differentials.py
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from config_services import numerics
from exceptions import ContractViolationError
from services.extension.build import ExtendedAlgebra
from services.extension.couple import Couple
from services.liealg.cohomology import alternating_differential
from services.spectral.bigraded import (
    bidegree_dim,
    bigraded_differential,
    decomposition_matrix,
    delta01_matrix,
    delta10_matrix,
    delta21_matrix,
)
from utils.linalg import EXACT, matmul, max_abs, to_float

logger = logging.getLogger(__name__)

RELATIONS = (
    "kernel_square",
    "kernel_horizontal",
    "horizontal_square",
    "horizontal_omega",
    "omega_square",
)


def verify_sum_decomposition(ext: ExtendedAlgebra, cpl: Optional[Couple] = None, k: int = 0) -> float:
    """
    Largest entry of decompose(d Theta) - (delta01 + delta10 + delta21)(decompose Theta)
    over the basis of total k-cochains.
    """
    couple = ext.couple if cpl is None else cpl
    n = ext.total.dim
    if not 0 <= k <= n:
        raise ContractViolationError("verify_sum_decomposition", f"degree {k} outside 0..{n}")
    constants = ext.total.constants if ext.total.mode == EXACT else ext.total.float_constants
    d_total = alternating_differential(constants, None, k, ext.total.mode)
    lhs = matmul(decomposition_matrix(ext, k + 1), d_total)
    rhs = matmul(bigraded_differential(couple, k), decomposition_matrix(ext, k))
    if lhs.dtype != object or rhs.dtype != object:
        lhs, rhs = to_float(lhs), to_float(rhs)
    residual = max_abs(lhs - rhs)
    logger.debug(f"[SPECTRAL] [DECOMPOSITION] degree {k}: residual {residual:.3e}")
    return residual


@dataclass
class RelationsReport:
    """Residuals of the five identities making delta01 + delta10 + delta21 square to zero"""
    residuals: Dict[str, float]
    tolerance: float = 0.0
    worst_bidegree: Dict[str, Tuple[int, int]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(value <= self.tolerance for value in self.residuals.values())

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "residuals": dict(self.residuals),
            "worst_bidegree": {name: list(pq) for name, pq in self.worst_bidegree.items()},
        }


def verify_relations(cpl: Couple, tol: Optional[float] = None) -> RelationsReport:
    """
    Check on every bidegree:

        delta01^2 = 0
        delta01 delta10 + delta10 delta01 = 0
        delta10^2 + delta01 delta21 + delta21 delta01 = 0
        delta10 delta21 + delta21 delta10 = 0
        delta21^2 = 0
    """
    cache: Dict[Tuple[str, int, int], np.ndarray] = {}
    builders: Dict[str, Callable[[Couple, int, int], np.ndarray]] = {
        "01": delta01_matrix,
        "10": delta10_matrix,
        "21": delta21_matrix,
    }

    def op(kind: str, p: int, q: int) -> np.ndarray:
        key = (kind, p, q)
        if key not in cache:
            cache[key] = builders[kind](cpl, p, q)
        return cache[key]

    def composite(p: int, q: int, *chains: Tuple[str, str]) -> np.ndarray:
        total = None
        for first, second in chains:
            shift = {"01": (0, 1), "10": (1, 0), "21": (2, -1)}[first]
            product = matmul(op(second, p + shift[0], q + shift[1]), op(first, p, q))
            total = product if total is None else total + product
        return total

    residuals = {name: 0.0 for name in RELATIONS}
    worst: Dict[str, Tuple[int, int]] = {}
    nb, nk = cpl.n_base, cpl.n_kernel
    for p in range(nb + 1):
        for q in range(nk + 1):
            if bidegree_dim(nb, nk, p, q) == 0:
                continue
            # (first applied, then second)
            checks = {
                "kernel_square": composite(p, q, ("01", "01")),
                "kernel_horizontal": composite(p, q, ("10", "01"), ("01", "10")),
                "horizontal_square": composite(p, q, ("10", "10"), ("21", "01"), ("01", "21")),
                "horizontal_omega": composite(p, q, ("21", "10"), ("10", "21")),
                "omega_square": composite(p, q, ("21", "21")),
            }
            for name, matrix in checks.items():
                value = max_abs(matrix)
                if value > residuals[name]:
                    residuals[name] = value
                    worst[name] = (p, q)
    threshold = 0.0 if cpl.mode == EXACT else (numerics().approx_tol if tol is None else tol)
    report = RelationsReport(residuals=residuals, tolerance=threshold, worst_bidegree=worst)
    if report.ok:
        logger.info(f"[SPECTRAL] [RELATIONS] {cpl.name or 'couple'}: all five identities hold")
    else:
        failing = [name for name, value in residuals.items() if value > threshold]
        logger.warning(f"[SPECTRAL] [RELATIONS] {cpl.name or 'couple'}: failing {failing}")
    return report
