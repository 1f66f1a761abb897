# services/liealg/flows.py
import logging
from typing import Any, Optional, Tuple

import numpy as np

from config_services import numerics
from exceptions import ContractViolationError, StructuralError
from services.liealg.algebra import LieAlgebra, derivation_residual
from utils.integrators import SampledField, rk4
from utils.linalg import to_float

logger = logging.getLogger(__name__)


def derivation_flow(algebra: LieAlgebra, derivations: Any, t0: float = 0.0, t1: float = 1.0,
                    steps: Optional[int] = None, domain: Tuple[float, float] = (0.0, 1.0),
                    tol: Optional[float] = None) -> np.ndarray:
    """
    Flow of a time-dependent derivation: Psi' = D(t) Psi, Psi(t0) = id.

    Args:
        algebra: algebra the derivations act on
        derivations: one n x n matrix (constant in time) or samples of shape
            (N+1, n, n) on a uniform grid over ``domain``
        t0, t1: integration interval
        steps: RK4 steps, configuration default when omitted
        tol: tolerance for the derivation check of the samples

    Returns:
        Psi(t1) as a float n x n matrix
    """
    settings = numerics()
    if steps is None:
        steps = settings.steps
    if steps < 1:
        raise ContractViolationError("derivation_flow", f"steps must be at least 1, got {steps}")
    n = algebra.dim
    samples = np.asarray(derivations)
    if samples.ndim == 2:
        samples = samples[None, ...]
    if samples.ndim != 3 or samples.shape[1:] != (n, n):
        raise StructuralError("derivation samples", f"(N+1, {n}, {n})", samples.shape)

    threshold = settings.approx_tol if tol is None else tol
    for index, sample in enumerate(samples):
        residual = derivation_residual(algebra, sample)
        if residual > threshold:
            raise ContractViolationError("derivation_flow", f"sample {index} is not a derivation "
                                                            f"(residual {residual:.3e})")

    field = SampledField(to_float(samples), *domain)
    if len(samples) == 1:
        generator = field.samples[0]
        psi = rk4(lambda t, y: generator @ y, np.eye(n), t0, t1, steps)
    else:
        psi = rk4(lambda t, y: field(t) @ y, np.eye(n), t0, t1, steps)
    logger.debug(f"[LIEALG] [FLOW] t0={t0} t1={t1} steps={steps}")
    return psi


def bracket_preservation_residual(algebra: LieAlgebra, psi: np.ndarray) -> float:
    """max over basis pairs of |Psi[e_i, e_j] - [Psi e_i, Psi e_j]|_inf"""
    c = algebra.float_constants
    psi = np.asarray(psi, dtype=float)
    image_of_bracket = np.einsum('ijk,ak->ija', c, psi)
    bracket_of_images = np.einsum('ai,bj,abk->ijk', psi, psi, c)
    return float(np.max(np.abs(image_of_bracket - bracket_of_images)))


def derivation_flow_path(derivations: np.ndarray, domain: Tuple[float, float] = (0.0, 1.0),
                         substeps: int = 1) -> np.ndarray:
    """
    Psi' = D(t) Psi, Psi(lo) = id, reported at every sample node.

    ``derivations`` has shape (N+1, ..., n, n); the middle axes are independent
    flows integrated together. No derivation check is made, callers pass ad
    matrices or the D of a couple.
    """
    samples = np.asarray(derivations, dtype=float)
    if samples.ndim < 3 or samples.shape[-1] != samples.shape[-2] or samples.shape[0] < 2:
        raise StructuralError("derivation samples", "(N+1, ..., n, n) with N >= 1", samples.shape)
    field = SampledField(samples, *domain)
    nodes = samples.shape[0] - 1
    start = np.broadcast_to(np.eye(samples.shape[-1]), samples.shape[1:]).copy()
    path = rk4(lambda t, y: np.matmul(field(t), y), start, domain[0], domain[1], nodes * substeps,
               return_path=True)
    return path[::substeps]
