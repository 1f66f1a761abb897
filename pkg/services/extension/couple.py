# services/extension/couple.py
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Optional, Tuple

import numpy as np

from config_services import numerics
from exceptions import ContractViolationError, StructuralError
from services.liealg.algebra import LieAlgebra, derivation_residual
from services.liealg.catalog import abelian
from services.liealg.cohomology import alternating_differential
from utils.exterior import exterior_power_derivation, subsets
from utils.linalg import APPROX, EXACT, as_array, literal_mode, max_abs, mode_of, to_float, zeros

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Couple:
    """
    Connection data (D, omega) of an extension of ``base`` by ``kernel``.

    ``D[i]`` is the derivation of the kernel attached to the i-th base vector
    and ``omega[i, j]`` the kernel vector omega(e_i, e_j). Admissibility is a
    checked property; only the derivation property and antisymmetry are
    required here.
    """
    base: LieAlgebra
    kernel: LieAlgebra
    D: np.ndarray
    omega: np.ndarray
    name: str = ""

    def __post_init__(self):
        nb, nk = self.base.dim, self.kernel.dim
        if self.D.shape != (nb, nk, nk):
            raise StructuralError("couple D", (nb, nk, nk), self.D.shape)
        if self.omega.shape != (nb, nb, nk):
            raise StructuralError("couple omega", (nb, nb, nk), self.omega.shape)
        tol = 0.0 if self.mode == EXACT else numerics().approx_tol
        if max_abs(self.omega + self.omega.transpose(1, 0, 2)) > tol:
            raise ContractViolationError("Couple", "omega is not antisymmetric")
        for i in range(nb):
            residual = derivation_residual(self.kernel, self.D[i])
            if residual > tol:
                raise ContractViolationError("Couple", f"D[{i + 1}] is not a derivation of the kernel "
                                                       f"(residual {residual:.3e})")

    @property
    def n_base(self) -> int:
        return self.base.dim

    @property
    def n_kernel(self) -> int:
        return self.kernel.dim

    @property
    def mode(self) -> str:
        exact = self.base.mode == self.kernel.mode == EXACT
        return EXACT if exact and mode_of(self.D) == mode_of(self.omega) == EXACT else APPROX

    @cached_property
    def arrays(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(base constants, kernel constants, D, omega) in the couple's arithmetic"""
        if self.mode == EXACT:
            return self.base.constants, self.kernel.constants, self.D, self.omega
        return self.base.float_constants, self.kernel.float_constants, to_float(self.D), to_float(self.omega)

    @cached_property
    def float_D(self) -> np.ndarray:
        return to_float(self.D)

    @cached_property
    def float_omega(self) -> np.ndarray:
        return to_float(self.omega)

    def __repr__(self) -> str:
        return f"<Couple {self.name or ''} base={self.base.dim} kernel={self.kernel.dim} mode={self.mode}>"


def make_couple(base: LieAlgebra, kernel: LieAlgebra, D: Any = None, omega: Any = None,
                name: str = "") -> Couple:
    """Couple from nested lists; missing D or omega are zero."""
    nb, nk = base.dim, kernel.dim
    raw_d = np.zeros((nb, nk, nk), dtype=int) if D is None else np.asarray(D, dtype=object)
    raw_omega = np.zeros((nb, nb, nk), dtype=int) if omega is None else np.asarray(omega, dtype=object)
    literals = list(np.asarray(raw_d, dtype=object).flat) + list(np.asarray(raw_omega, dtype=object).flat)
    exact = base.mode == kernel.mode == EXACT and literal_mode(literals) == EXACT
    mode = EXACT if exact else APPROX
    if raw_d.shape != (nb, nk, nk):
        raise StructuralError("couple D", (nb, nk, nk), raw_d.shape)
    if raw_omega.shape != (nb, nb, nk):
        raise StructuralError("couple omega", (nb, nb, nk), raw_omega.shape)
    return Couple(base=base, kernel=kernel, D=as_array(raw_d, mode), omega=as_array(raw_omega, mode), name=name)


def omega_vector(cpl: Couple) -> np.ndarray:
    """omega flattened as an element of Lambda^2 g_B* (x) K (Cochain layout)."""
    _, _, _, omega = cpl.arrays
    pairs = subsets(cpl.n_base, 2)
    if not pairs:
        return zeros(0, cpl.mode)
    return np.concatenate([omega[i, j] for i, j in pairs])


def kernel_ad(cpl: Couple) -> np.ndarray:
    """Stack of ad_K(e_k): shape (nK, nK, nK)."""
    _, ck, _, _ = cpl.arrays
    return ck.transpose(0, 2, 1)


def curv_D(cpl: Couple) -> np.ndarray:
    """Curv_D(e_i, e_j) = [D_i, D_j] - D_[e_i, e_j], shape (nB, nB, nK, nK)."""
    cb, _, d, _ = cpl.arrays
    products = np.matmul(d[:, None], d[None, :])
    commutators = products - products.transpose(1, 0, 2, 3)
    return commutators - np.tensordot(cb, d, axes=(2, 0))


def ad_omega(cpl: Couple) -> np.ndarray:
    """ad_K(omega(e_i, e_j)), shape (nB, nB, nK, nK)."""
    _, _, _, omega = cpl.arrays
    return np.tensordot(omega, kernel_ad(cpl), axes=(2, 0))


def covariant_differential_matrix(cpl: Couple, p: int, actions: np.ndarray) -> np.ndarray:
    """Matrix of the D-twisted differential on Lambda^p g_B* with values acted on by ``actions[i]``."""
    if not 0 <= p <= cpl.n_base:
        raise ContractViolationError("covariant_differential", f"base degree {p} outside 0..{cpl.n_base}")
    cb, _, _, _ = cpl.arrays
    return alternating_differential(cb, actions, p, cpl.mode)


def kernel_power_actions(cpl: Couple, degree: int) -> np.ndarray:
    """D acting on Lambda^degree K as a derivation, one matrix per base vector."""
    if not 0 <= degree <= cpl.n_kernel:
        raise ContractViolationError("covariant_differential", f"kernel degree {degree} outside 0..{cpl.n_kernel}")
    _, _, d, _ = cpl.arrays
    return np.stack([exterior_power_derivation(d[i], degree) for i in range(cpl.n_base)])


def covariant_differential(cpl: Couple, theta: Any, p: int, l: int = 1) -> np.ndarray:
    """
    The covariant differential of theta in Lambda^p g_B* (x) Lambda^l K.

    ``theta`` is flat in the Cochain layout (base subset major, Lambda^l K
    subset minor); the result lives in degree p + 1.
    """
    matrix = covariant_differential_matrix(cpl, p, kernel_power_actions(cpl, l))
    raw = np.asarray(theta, dtype=object)
    if cpl.mode == EXACT and literal_mode(raw.flat) == EXACT:
        vector = as_array(raw, EXACT)
    else:
        vector, matrix = to_float(raw), to_float(matrix)
    if vector.shape != (matrix.shape[1],):
        raise StructuralError("covariant differential argument", (matrix.shape[1],), vector.shape)
    return matrix.dot(vector)


@dataclass
class AdmissibilityReport:
    closure_ok: bool
    closure_residual: float
    curvature_ok: bool
    curvature_residual: float

    @property
    def ok(self) -> bool:
        return self.closure_ok and self.curvature_ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "closure": {"ok": self.closure_ok, "residual": self.closure_residual},
            "curvature_identity": {"ok": self.curvature_ok, "residual": self.curvature_residual},
        }


def is_admissible(cpl: Couple, tol: Optional[float] = None) -> AdmissibilityReport:
    """Closure of omega under the covariant differential and Curv_D = ad o omega."""
    threshold = 0.0 if cpl.mode == EXACT else (numerics().approx_tol if tol is None else tol)
    closure = covariant_differential_matrix(cpl, 2, cpl.arrays[2]).dot(omega_vector(cpl)) \
        if cpl.n_base >= 2 else np.zeros(0)
    closure_residual = max_abs(closure)
    curvature_residual = max_abs(curv_D(cpl) - ad_omega(cpl))
    report = AdmissibilityReport(
        closure_ok=closure_residual <= threshold,
        closure_residual=closure_residual,
        curvature_ok=curvature_residual <= threshold,
        curvature_residual=curvature_residual,
    )
    if not report.ok:
        logger.warning(f"[EXTENSION] [ADMISSIBLE] {cpl.name or 'couple'}: closure={closure_residual:.3e} "
                       f"curvature={curvature_residual:.3e}")
    return report


def semidirect(base: LieAlgebra, kernel: LieAlgebra, D: Any, name: str = "") -> Couple:
    """Couple with omega = 0; D must be flat (Curv_D = 0)."""
    cpl = make_couple(base, kernel, D, None, name=name)
    residual = max_abs(curv_D(cpl))
    tol = 0.0 if cpl.mode == EXACT else numerics().approx_tol
    if residual > tol:
        raise ContractViolationError("semidirect", f"Curv_D does not vanish (residual {residual:.3e})")
    return cpl


def central(base: LieAlgebra, n: int, omega: Any, name: str = "") -> Couple:
    """
    Central extension of ``base`` by R^n with trivial action.

    ``omega`` has shape (nB, nB, n), or (nB, nB) when n == 1; it must be
    closed for the trivial-coefficient differential.
    """
    raw = np.asarray(omega, dtype=object)
    if n == 1 and raw.ndim == 2:
        raw = raw[..., None]
    names = ["z"] if n == 1 else [f"z{i + 1}" for i in range(n)]
    kernel = abelian(n)
    kernel = LieAlgebra(dim=n, basis_names=tuple(names), constants=kernel.constants, name=f"R{n}")
    cpl = make_couple(base, kernel, None, raw, name=name)
    report = is_admissible(cpl)
    if not report.closure_ok:
        raise ContractViolationError("central", f"omega is not closed (residual {report.closure_residual:.3e})")
    return cpl
