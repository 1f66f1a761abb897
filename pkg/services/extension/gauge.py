# services/extension/gauge.py
import logging
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from config_services import numerics
from exceptions import ContractViolationError, StructuralError
from services.extension.build import build_extension
from services.extension.couple import Couple, covariant_differential_matrix, kernel_ad, make_couple, omega_vector
from utils.linalg import APPROX, EXACT, as_array, backend_for, identity, literal_mode, max_abs, to_float

logger = logging.getLogger(__name__)

EQUIVALENT = "equivalent"
NOT_EQUIVALENT = "not_equivalent"
UNDECIDED = "undecided"


@dataclass(frozen=True, eq=False)
class GaugeTransform:
    """Linear map Delta: g_B -> K; column i is Delta(e_i)"""
    delta: np.ndarray

    @classmethod
    def from_values(cls, values: Any) -> 'GaugeTransform':
        raw = np.asarray(values, dtype=object)
        if raw.ndim != 2:
            raise StructuralError("gauge transform", "nK x nB matrix", raw.shape)
        return cls(delta=as_array(raw, literal_mode(raw.flat)))

    @classmethod
    def zero(cls, cpl: Couple) -> 'GaugeTransform':
        return cls.from_values(np.zeros((cpl.n_kernel, cpl.n_base), dtype=int))


def _delta_for(cpl: Couple, gauge: GaugeTransform) -> np.ndarray:
    if gauge.delta.shape != (cpl.n_kernel, cpl.n_base):
        raise StructuralError("gauge transform", (cpl.n_kernel, cpl.n_base), gauge.delta.shape)
    if cpl.mode == EXACT and gauge.delta.dtype == object:
        return gauge.delta
    return to_float(gauge.delta)


def apply_gauge(cpl: Couple, gauge: GaugeTransform) -> Couple:
    """
    D' = D + ad o Delta and
    omega'(a, b) = omega(a, b) + D_a Delta b - D_b Delta a - Delta[a, b] + [Delta a, Delta b].
    """
    delta = _delta_for(cpl, gauge)
    cb, ck, d, omega = cpl.arrays
    if delta.dtype != object:
        cb, ck, d, omega = (to_float(x) for x in (cb, ck, d, omega))
    ad_k = kernel_ad(cpl) if delta.dtype == object else to_float(kernel_ad(cpl))
    # ad_K(Delta e_i) for every base vector
    ad_delta = np.tensordot(delta.T, ad_k, axes=(1, 0))
    new_d = d + ad_delta
    # D_i Delta e_j, indexed (i, j, k)
    d_delta = np.matmul(d, delta).transpose(0, 2, 1)
    delta_bracket = np.tensordot(cb, delta, axes=(2, 1))
    bracket_of_deltas = np.tensordot(np.tensordot(delta, ck, axes=(0, 0)), delta, axes=(1, 0)).transpose(0, 2, 1)
    new_omega = omega + d_delta - d_delta.transpose(1, 0, 2) - delta_bracket + bracket_of_deltas
    result = make_couple(cpl.base, cpl.kernel, new_d, new_omega, name=f"{cpl.name}'" if cpl.name else "")
    logger.debug(f"[EXTENSION] [GAUGE] applied to {cpl.name or 'couple'} mode={result.mode}")
    return result


def shift_matrix(cpl: Couple, gauge: GaugeTransform) -> np.ndarray:
    """(kappa, alpha) -> (kappa + Delta alpha, alpha) in the kernel-first basis."""
    delta = _delta_for(cpl, gauge)
    mode = EXACT if delta.dtype == object else APPROX
    n = cpl.n_kernel + cpl.n_base
    psi = identity(n, mode)
    psi[:cpl.n_kernel, cpl.n_kernel:] = delta
    return psi


def shift_isomorphism_residual(cpl: Couple, gauge: GaugeTransform) -> float:
    """Bracket defect of the shift map from the gauged extension to the original one."""
    original = build_extension(cpl).total
    gauged = build_extension(apply_gauge(cpl, gauge)).total
    psi = shift_matrix(cpl, gauge)
    if psi.dtype == object and original.mode == gauged.mode == EXACT:
        c, c_new = original.constants, gauged.constants
    else:
        c, c_new, psi = original.float_constants, gauged.float_constants, to_float(psi)
    image_of_bracket = np.tensordot(c_new, psi, axes=(2, 1))
    bracket_of_images = np.tensordot(psi, np.tensordot(psi, c, axes=(0, 0)), axes=(0, 1)).transpose(1, 0, 2)
    return max_abs(image_of_bracket - bracket_of_images)


@dataclass
class EquivalenceDecision:
    status: str
    gauge: Optional[GaugeTransform] = None
    reason: str = ""

    @property
    def equivalent(self) -> bool:
        return self.status == EQUIVALENT

    def to_dict(self) -> dict:
        payload = {"status": self.status, "reason": self.reason}
        if self.gauge is not None:
            payload["delta"] = [[str(x) for x in row] for row in self.gauge.delta]
        return payload


def _same_algebra(first, second) -> bool:
    return first.dim == second.dim and max_abs(first.float_constants - second.float_constants) == 0.0


def _matches(cpl: Couple, other: Couple, tol: float) -> bool:
    if cpl.mode == other.mode == EXACT:
        return max_abs(cpl.D - other.D) == 0 and max_abs(cpl.omega - other.omega) == 0
    return max_abs(cpl.float_D - other.float_D) <= tol and max_abs(cpl.float_omega - other.float_omega) <= tol


def are_equivalent(first: Couple, second: Couple, candidate: Optional[GaugeTransform] = None,
                   tol: Optional[float] = None) -> EquivalenceDecision:
    """
    Decide whether two couples on the same algebras differ by a gauge transform.

    A candidate is verified against the transformation formulas. Otherwise
    the question is decided only for an abelian kernel with matching D,
    where it is the linear problem omega2 - omega1 = (covariant differential of Delta).
    """
    if not (_same_algebra(first.base, second.base) and _same_algebra(first.kernel, second.kernel)):
        raise ContractViolationError("are_equivalent", "couples are defined on different algebras")
    threshold = numerics().approx_tol if tol is None else tol

    if candidate is not None:
        if _matches(apply_gauge(first, candidate), second, threshold):
            return EquivalenceDecision(EQUIVALENT, candidate, "candidate verified")
        logger.info("[EXTENSION] [EQUIVALENCE] candidate gauge does not match, trying the linear decision")

    kernel_abelian = max_abs(first.kernel.constants) == 0
    if not kernel_abelian:
        return EquivalenceDecision(UNDECIDED, reason="undecided (verification-only mode)")
    same_d = (max_abs(first.D - second.D) == 0) if first.mode == second.mode == EXACT \
        else max_abs(first.float_D - second.float_D) <= threshold
    if not same_d:
        return EquivalenceDecision(NOT_EQUIVALENT, reason="D differs and ad vanishes on an abelian kernel")

    mode = EXACT if first.mode == second.mode == EXACT else APPROX
    matrix = covariant_differential_matrix(first, 1, first.arrays[2])
    rhs = omega_vector(second) - omega_vector(first)
    if mode == APPROX:
        matrix, rhs = to_float(matrix), to_float(rhs)
    solution = backend_for(mode).solve(matrix, rhs)
    if solution is None:
        return EquivalenceDecision(NOT_EQUIVALENT, reason="omega2 - omega1 is not a covariant coboundary")
    # Delta flattened base-major: entry i * nK + k is the k-th component of Delta(e_i)
    delta = solution.reshape(first.n_base, first.n_kernel).T
    return EquivalenceDecision(EQUIVALENT, GaugeTransform(delta=delta), "solved omega2 - omega1 = d Delta")
