# services/liealg/cohomology.py
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from exceptions import ContractViolationError, StructuralError
from services.liealg.algebra import LieAlgebra, LieRep, check_representation
from utils.exterior import insert_front, subset_index, subsets, Subset
from utils.linalg import APPROX, EXACT, backend_for, zeros

logger = logging.getLogger(__name__)


@dataclass
class Cochain:
    """
    Alternating k-form on an n-dimensional algebra with values in an m-dimensional space.

    ``coeffs`` is flat: entry idx(S) * m + b is the b-th component of the
    value on e_S, with S running over increasing k-subsets in canonical order.
    """
    degree: int
    algebra_dim: int
    coeffs: np.ndarray
    coefficient_dim: int = 1

    def __post_init__(self):
        expected = len(subsets(self.algebra_dim, self.degree)) * self.coefficient_dim
        if self.coeffs.shape != (expected,):
            raise StructuralError("cochain coefficients", (expected,), self.coeffs.shape)

    def value(self, subset: Subset, component: int = 0):
        index = subset_index(self.algebra_dim, self.degree)[tuple(subset)]
        return self.coeffs[index * self.coefficient_dim + component]


def alternating_differential(constants: np.ndarray, actions: Optional[np.ndarray], degree: int,
                             mode: str) -> np.ndarray:
    """
    Matrix of the Chevalley-Eilenberg differential C^k -> C^(k+1).

    (dc)(x_0..x_k) = sum_i (-1)^i rho(x_i) c(..x_i omitted..)
                     + sum_{i<j} (-1)^(i+j) c([x_i, x_j], ..both omitted..)

    ``actions`` has shape (n, m, m) and may be None for trivial scalar
    coefficients. Rows and columns follow the Cochain layout.
    """
    n = constants.shape[0]
    m = 1 if actions is None else actions.shape[1]
    source = subset_index(n, degree)
    target = subsets(n, degree + 1)
    result = zeros((len(target) * m, len(source) * m), mode)
    for row, subset in enumerate(target):
        r0 = row * m
        if actions is not None:
            for pos, t in enumerate(subset):
                col = source[subset[:pos] + subset[pos + 1:]]
                sign = -1 if pos % 2 else 1
                result[r0:r0 + m, col * m:(col + 1) * m] += sign * actions[t]
        for a in range(len(subset)):
            for b in range(a + 1, len(subset)):
                rest = subset[:a] + subset[a + 1:b] + subset[b + 1:]
                outer = -1 if (a + b) % 2 else 1
                for l in range(n):
                    coefficient = constants[subset[a], subset[b], l]
                    if coefficient == 0:
                        continue
                    inner, merged = insert_front(l, rest)
                    if inner == 0:
                        continue
                    col = source[merged]
                    for component in range(m):
                        result[r0 + component, col * m + component] += outer * inner * coefficient
    return result


def _validated(algebra: LieAlgebra, rep: Optional[LieRep]):
    if rep is None:
        return algebra.constants, None, algebra.mode
    if rep.algebra.dim != algebra.dim:
        raise StructuralError("representation", f"matrices for dim {algebra.dim}", rep.algebra.dim)
    report = check_representation(rep)
    if not report.ok:
        raise ContractViolationError("ce_differential", f"not a representation (residual {report.residual:.3e})")
    if algebra.mode == EXACT and rep.mode == EXACT:
        return algebra.constants, rep.matrices, EXACT
    return algebra.float_constants, rep.float_matrices, APPROX


def ce_differential(algebra: LieAlgebra, rep: Optional[LieRep] = None, degree: int = 0) -> np.ndarray:
    """d_A : C^k -> C^(k+1) with trivial coefficients or coefficients in ``rep``."""
    if not 0 <= degree <= algebra.dim:
        raise ContractViolationError("ce_differential", f"degree {degree} outside 0..{algebra.dim}")
    constants, actions, mode = _validated(algebra, rep)
    return alternating_differential(constants, actions, degree, mode)


def differential_complex(algebra: LieAlgebra, rep: Optional[LieRep] = None) -> List[np.ndarray]:
    """All differentials d_0 .. d_n (the last one maps into the zero space)."""
    constants, actions, mode = _validated(algebra, rep)
    return [alternating_differential(constants, actions, k, mode) for k in range(algebra.dim + 1)]


def betti_numbers(differentials: Sequence[np.ndarray], mode: str) -> List[int]:
    """Cohomology dimensions of a complex given by its consecutive differentials."""
    backend = backend_for(mode)
    ranks = [backend.rank(d) for d in differentials]
    dims = []
    for k, d in enumerate(differentials):
        previous = ranks[k - 1] if k > 0 else 0
        dims.append(d.shape[1] - ranks[k] - previous)
    return dims


def cohomology_dims(algebra: LieAlgebra, rep: Optional[LieRep] = None) -> List[int]:
    """Betti numbers b_0..b_n of the CE complex."""
    differentials = differential_complex(algebra, rep)
    mode = EXACT if all(d.dtype == object for d in differentials) else APPROX
    dims = betti_numbers(differentials, mode)
    logger.info(f"[LIEALG] [COHOMOLOGY] {algebra.name or 'algebra'}: {dims}")
    return dims


def euler_characteristic(dims: Sequence[int]) -> int:
    return sum((-1) ** k * b for k, b in enumerate(dims))
