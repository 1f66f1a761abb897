# services/holonomy/transport.py
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from config_services import numerics
from exceptions import ContractViolationError, StructuralError
from services.extension.couple import Couple
from services.liealg.algebra import LieRep
from services.liealg.flows import bracket_preservation_residual, derivation_flow_path
from services.paths.models import APath
from utils.integrators import SampledField, rk4

logger = logging.getLogger(__name__)


@dataclass
class Transport:
    """Parallel transport Phi_{t1, t0} of the kernel fiber"""
    matrix: np.ndarray
    t0: float
    t1: float
    morphism_residual: float

    def to_dict(self) -> dict:
        return {
            "t0": self.t0,
            "t1": self.t1,
            "matrix": self.matrix.tolist(),
            "morphism_residual": self.morphism_residual,
        }


def _check_base(cpl: Couple, samples: np.ndarray) -> np.ndarray:
    samples = np.asarray(samples, dtype=float)
    if samples.shape[-1] != cpl.n_base:
        raise StructuralError("base path samples", f"(..., {cpl.n_base})", samples.shape)
    return samples


def connection_matrices(cpl: Couple, samples: np.ndarray) -> np.ndarray:
    """D_{a} for stacked base vectors a: shape (..., nK, nK)."""
    return np.tensordot(_check_base(cpl, samples), cpl.float_D, axes=(-1, 0))


def parallel_transport(cpl: Couple, a_base: APath, t: float = 1.0, steps: Optional[int] = None) -> Transport:
    """Phi' = -D_{a(s)} Phi on [0, t], Phi(0) = id."""
    if not 0.0 <= t <= 1.0:
        raise ContractViolationError("parallel_transport", f"t={t} outside [0, 1]")
    steps = numerics().steps if steps is None else steps
    field = SampledField(connection_matrices(cpl, a_base.samples))
    identity = np.eye(cpl.n_kernel)
    if t == 0.0:
        matrix = identity
    else:
        matrix = rk4(lambda s, y: -field(s) @ y, identity, 0.0, t, steps)
    residual = bracket_preservation_residual(cpl.kernel, matrix)
    logger.debug(f"[HOLONOMY] [TRANSPORT] t={t} steps={steps} morphism residual {residual:.3e}")
    return Transport(matrix=matrix, t0=0.0, t1=t, morphism_residual=residual)


def transport_path(cpl: Couple, a_base: APath, substeps: int = 1) -> np.ndarray:
    """Phi_{t_i, 0} at every node of the path: shape (N+1, nK, nK)."""
    return derivation_flow_path(-connection_matrices(cpl, a_base.samples), substeps=substeps)


def transport_grid(cpl: Couple, a_base: np.ndarray, substeps: int = 1) -> np.ndarray:
    """Transports along every path a(., eps_j) of a (N+1, M+1, nB) grid: shape (N+1, M+1, nK, nK)."""
    return derivation_flow_path(-connection_matrices(cpl, a_base), substeps=substeps)


def group_element(kpath: APath, rep: LieRep, steps: Optional[int] = None) -> np.ndarray:
    """g(1) for g' = g rho(k(s)), g(0) = id."""
    if rep.algebra.dim != kpath.algebra.dim:
        raise StructuralError("representation", kpath.algebra.dim, rep.algebra.dim)
    if not rep.is_faithful():
        raise ContractViolationError("group_element", "representation is not faithful")
    steps = numerics().steps if steps is None else steps
    field = SampledField(rep.action(kpath.samples))
    return rk4(lambda s, g: g @ field(s), np.eye(rep.dim), 0.0, 1.0, steps)
