# services/extension/build.py
import logging
from dataclasses import dataclass
from typing import Any

import numpy as np

from exceptions import StructuralError
from services.extension.couple import Couple
from services.liealg.algebra import LieAlgebra, bracket
from utils.linalg import APPROX, EXACT, as_array, max_abs, to_float, zeros

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ExtendedAlgebra:
    """
    Total algebra K + g_B built from a couple.

    Basis order: the kernel block (indices 0..nK-1) first, then the
    horizontal lifts h(e_1)..h(e_nB).
    """
    total: LieAlgebra
    couple: Couple

    @property
    def n_kernel(self) -> int:
        return self.couple.n_kernel

    @property
    def n_base(self) -> int:
        return self.couple.n_base

    @property
    def kernel_slice(self) -> slice:
        return slice(0, self.n_kernel)

    @property
    def base_slice(self) -> slice:
        return slice(self.n_kernel, self.n_kernel + self.n_base)


def _total_names(cpl: Couple):
    names = list(cpl.kernel.basis_names)
    for label in cpl.base.basis_names:
        names.append(label if label not in names else f"{label}'")
    return tuple(names)


def build_extension(cpl: Couple) -> ExtendedAlgebra:
    """
    Split brackets: [k1, k2] from K, [h(a), k] = D_a k,
    [h(a), h(b)] = h([a, b]) + omega(a, b).
    """
    cb, ck, d, omega = cpl.arrays
    nk, nb = cpl.n_kernel, cpl.n_base
    n = nk + nb
    constants = zeros((n, n, n), cpl.mode)
    constants[:nk, :nk, :nk] = ck
    for i in range(nb):
        # column a of D_i is D_i e_a
        constants[nk + i, :nk, :nk] = d[i].T
        constants[:nk, nk + i, :nk] = -d[i].T
        for j in range(nb):
            constants[nk + i, nk + j, nk:] = cb[i, j]
            constants[nk + i, nk + j, :nk] = omega[i, j]
    total = LieAlgebra(dim=n, basis_names=_total_names(cpl), constants=constants, mode=cpl.mode,
                       name=f"ext({cpl.name})" if cpl.name else "extension")
    logger.debug(f"[EXTENSION] [BUILD] {total.name} dim={n}")
    return ExtendedAlgebra(total=total, couple=cpl)


def _vector(ext: ExtendedAlgebra, values: Any, length: int, what: str) -> np.ndarray:
    raw = np.asarray(values)
    if raw.shape != (length,):
        raise StructuralError(what, (length,), raw.shape)
    if raw.dtype == object or raw.dtype.kind in "iub":
        return as_array(raw, ext.total.mode)
    return to_float(raw)


def project(ext: ExtendedAlgebra, v: Any) -> np.ndarray:
    """Base component of a total vector."""
    return _vector(ext, v, ext.total.dim, "total vector")[ext.base_slice]


def vertical_part(ext: ExtendedAlgebra, v: Any) -> np.ndarray:
    return _vector(ext, v, ext.total.dim, "total vector")[ext.kernel_slice]


def _zeros_like_mode(vector: np.ndarray, length: int) -> np.ndarray:
    return zeros(length, EXACT if vector.dtype == object else APPROX)


def inject(ext: ExtendedAlgebra, kappa: Any) -> np.ndarray:
    vector = _vector(ext, kappa, ext.n_kernel, "kernel vector")
    return np.concatenate([vector, _zeros_like_mode(vector, ext.n_base)])


def lift(ext: ExtendedAlgebra, alpha: Any) -> np.ndarray:
    """Horizontal lift h(alpha)."""
    vector = _vector(ext, alpha, ext.n_base, "base vector")
    return np.concatenate([_zeros_like_mode(vector, ext.n_kernel), vector])


def curvature_identity_residual(ext: ExtendedAlgebra) -> float:
    """max over base pairs of |[h e_i, h e_j] - h[e_i, e_j] - omega(e_i, e_j)|"""
    cpl = ext.couple
    _, _, _, omega = cpl.arrays
    worst = 0.0
    for i in range(ext.n_base):
        for j in range(i + 1, ext.n_base):
            ei, ej = cpl.base.basis_vector(i), cpl.base.basis_vector(j)
            lhs = bracket(ext.total, lift(ext, ei), lift(ext, ej))
            rhs = lift(ext, bracket(cpl.base, ei, ej)) + inject(ext, omega[i, j])
            worst = max(worst, max_abs(lhs - rhs))
    return worst
