# services/spectral/bigraded.py
import logging
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from exceptions import ContractViolationError, StructuralError
from services.extension.build import ExtendedAlgebra
from services.extension.couple import Couple
from services.liealg.cohomology import Cochain, alternating_differential
from utils.exterior import exterior_power_dual_action, insert_front, subset_index, subsets
from utils.linalg import APPROX, EXACT, as_array, literal_mode, to_float, zeros

logger = logging.getLogger(__name__)

Bidegree = Tuple[int, int]
CoupleLike = Union[Couple, ExtendedAlgebra]


def bidegree_dim(n_base: int, n_kernel: int, p: int, q: int) -> int:
    """dim Lambda^p g_B* (x) Lambda^q K*; zero outside the valid range."""
    return len(subsets(n_base, p)) * len(subsets(n_kernel, q))


@dataclass
class BigradedCochain:
    """
    Element of Lambda^p g_B* (x) Lambda^q K*.

    ``coeffs[I, J]`` is the value on (h e_I, e_J) with I a p-subset of base
    indices and J a q-subset of kernel indices, both in canonical order.
    """
    p: int
    q: int
    n_base: int
    n_kernel: int
    coeffs: np.ndarray

    def __post_init__(self):
        expected = (len(subsets(self.n_base, self.p)), len(subsets(self.n_kernel, self.q)))
        if self.coeffs.shape != expected:
            raise StructuralError(f"bigraded cochain ({self.p},{self.q})", expected, self.coeffs.shape)

    @property
    def bidegree(self) -> Bidegree:
        return self.p, self.q

    @property
    def degree(self) -> int:
        return self.p + self.q

    def flat(self) -> np.ndarray:
        """Base subset major, kernel subset minor."""
        return self.coeffs.reshape(-1)

    def value(self, base_subset: Iterable[int], kernel_subset: Iterable[int]):
        row = subset_index(self.n_base, self.p)[tuple(base_subset)]
        col = subset_index(self.n_kernel, self.q)[tuple(kernel_subset)]
        return self.coeffs[row, col]

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.coeffs.flat)


def make_bigraded(cpl: CoupleLike, p: int, q: int, coeffs: Any) -> BigradedCochain:
    """Bigraded cochain from nested lists; the shape is checked against (p, q)."""
    couple = _couple_of(cpl)
    raw = np.asarray(coeffs, dtype=object)
    mode = EXACT if couple.mode == EXACT and literal_mode(raw.flat) == EXACT else APPROX
    shape = (len(subsets(couple.n_base, p)), len(subsets(couple.n_kernel, q)))
    if raw.size != shape[0] * shape[1]:
        raise StructuralError(f"bigraded cochain ({p},{q})", shape, raw.shape)
    return BigradedCochain(p, q, couple.n_base, couple.n_kernel, as_array(raw.reshape(shape), mode))


def _couple_of(cpl: CoupleLike) -> Couple:
    return cpl.couple if isinstance(cpl, ExtendedAlgebra) else cpl


def degree_blocks(n_base: int, n_kernel: int, k: int) -> List[Bidegree]:
    """Non-empty bidegrees (p, k - p) of total degree k, in increasing p."""
    return [(p, k - p) for p in range(0, min(k, n_base) + 1) if 0 <= k - p <= n_kernel]


def block_offsets(n_base: int, n_kernel: int, k: int) -> Dict[Bidegree, int]:
    offsets, position = {}, 0
    for p, q in degree_blocks(n_base, n_kernel, k):
        offsets[(p, q)] = position
        position += bidegree_dim(n_base, n_kernel, p, q)
    return offsets


def decomposition_matrix(ext: ExtendedAlgebra, k: int) -> np.ndarray:
    """
    Signed permutation from total k-cochains to the concatenated bigraded blocks.

    With the kernel-first basis, theta^{p,q}[I][J] = (-1)^{pq} Theta[J u (I + nK)].
    """
    nb, nk, n = ext.n_base, ext.n_kernel, ext.total.dim
    total_index = subset_index(n, k)
    matrix = zeros((len(total_index), len(total_index)), ext.total.mode)
    one = 1 if ext.total.mode == EXACT else 1.0
    for (p, q), offset in block_offsets(nb, nk, k).items():
        sign = -one if (p * q) % 2 else one
        width = len(subsets(nk, q))
        for row_i, base_subset in enumerate(subsets(nb, p)):
            lifted = tuple(i + nk for i in base_subset)
            for col_j, kernel_subset in enumerate(subsets(nk, q)):
                matrix[offset + row_i * width + col_j, total_index[kernel_subset + lifted]] = sign
    return matrix


def decompose(ext: ExtendedAlgebra, theta: Cochain) -> Dict[Bidegree, BigradedCochain]:
    """Split a total cochain into its (p, q) components."""
    if theta.algebra_dim != ext.total.dim or theta.coefficient_dim != 1:
        raise StructuralError("cochain on the total algebra", f"scalar cochain on dim {ext.total.dim}",
                              f"dim {theta.algebra_dim} with {theta.coefficient_dim} components")
    if not 0 <= theta.degree <= ext.total.dim:
        raise ContractViolationError("decompose", f"degree {theta.degree} outside 0..{ext.total.dim}")
    nb, nk, k = ext.n_base, ext.n_kernel, theta.degree
    coeffs = theta.coeffs
    if ext.total.mode == APPROX or coeffs.dtype != object:
        coeffs = to_float(coeffs)
        matrix = to_float(decomposition_matrix(ext, k))
    else:
        matrix = decomposition_matrix(ext, k)
    stacked = matrix.dot(coeffs)
    pieces = {}
    for (p, q), offset in block_offsets(nb, nk, k).items():
        size = bidegree_dim(nb, nk, p, q)
        block = stacked[offset:offset + size].reshape(len(subsets(nb, p)), len(subsets(nk, q)))
        pieces[(p, q)] = BigradedCochain(p, q, nb, nk, block)
    return pieces


def recompose(ext: ExtendedAlgebra, pieces: Iterable[BigradedCochain], degree: Optional[int] = None) -> Cochain:
    """Inverse of decompose; missing components count as zero."""
    pieces = list(pieces)
    degrees = {piece.degree for piece in pieces}
    if degree is None:
        if len(degrees) != 1:
            raise ContractViolationError("recompose", f"components of mixed or missing degree {sorted(degrees)}")
        degree = degrees.pop()
    elif degrees - {degree}:
        raise ContractViolationError("recompose", f"components of degree {sorted(degrees)} given for {degree}")
    nb, nk = ext.n_base, ext.n_kernel
    exact = ext.total.mode == EXACT and all(piece.coeffs.dtype == object for piece in pieces)
    mode = EXACT if exact else APPROX
    offsets = block_offsets(nb, nk, degree)
    stacked = zeros(len(subsets(ext.total.dim, degree)), mode)
    for piece in pieces:
        if (piece.n_base, piece.n_kernel) != (nb, nk):
            raise StructuralError("bigraded cochain", (nb, nk), (piece.n_base, piece.n_kernel))
        offset = offsets[piece.bidegree]
        values = piece.flat() if exact else to_float(piece.flat())
        stacked[offset:offset + values.size] += values
    matrix = decomposition_matrix(ext, degree)
    coeffs = matrix.T.dot(stacked) if exact else to_float(matrix).T.dot(stacked)
    return Cochain(degree=degree, algebra_dim=ext.total.dim, coeffs=coeffs)


def delta01_matrix(cpl: CoupleLike, p: int, q: int) -> np.ndarray:
    """(-1)^p d_K on the kernel factor, (p, q) -> (p, q + 1)."""
    couple = _couple_of(cpl)
    nb, nk = couple.n_base, couple.n_kernel
    rows, cols = bidegree_dim(nb, nk, p, q + 1), bidegree_dim(nb, nk, p, q)
    result = zeros((rows, cols), couple.mode)
    if rows == 0 or cols == 0:
        return result
    _, ck, _, _ = couple.arrays
    d_kernel = alternating_differential(ck, None, q, couple.mode)
    if p % 2:
        d_kernel = -d_kernel
    height, width = d_kernel.shape
    for block in range(len(subsets(nb, p))):
        result[block * height:(block + 1) * height, block * width:(block + 1) * width] = d_kernel
    return result


def delta10_matrix(cpl: CoupleLike, p: int, q: int) -> np.ndarray:
    """Base differential with values in Lambda^q K* under the dual action of D, (p, q) -> (p + 1, q)."""
    couple = _couple_of(cpl)
    nb, nk = couple.n_base, couple.n_kernel
    rows, cols = bidegree_dim(nb, nk, p + 1, q), bidegree_dim(nb, nk, p, q)
    if rows == 0 or cols == 0:
        return zeros((rows, cols), couple.mode)
    cb, _, d, _ = couple.arrays
    actions = np.stack([exterior_power_dual_action(d[i], q) for i in range(nb)])
    return alternating_differential(cb, actions, p, couple.mode)


def delta21_matrix(cpl: CoupleLike, p: int, q: int) -> np.ndarray:
    """
    omega insertion, (p, q) -> (p + 2, q - 1):

        theta(a_0..a_{p+1}; J) -> (-1)^p sum_{a<b} (-1)^(a+b) theta(a_rest; omega(a_a, a_b), J)
    """
    couple = _couple_of(cpl)
    nb, nk = couple.n_base, couple.n_kernel
    rows, cols = bidegree_dim(nb, nk, p + 2, q - 1), bidegree_dim(nb, nk, p, q)
    result = zeros((rows, cols), couple.mode)
    if rows == 0 or cols == 0:
        return result
    _, _, _, omega = couple.arrays
    source_base = subset_index(nb, p)
    source_kernel = subset_index(nk, q)
    width_source = len(source_kernel)
    width_target = len(subsets(nk, q - 1))
    parity = -1 if p % 2 else 1
    for t, target in enumerate(subsets(nb, p + 2)):
        for j, kernel_subset in enumerate(subsets(nk, q - 1)):
            row = t * width_target + j
            for a in range(p + 2):
                for b in range(a + 1, p + 2):
                    rest = target[:a] + target[a + 1:b] + target[b + 1:]
                    outer = parity * (-1 if (a + b) % 2 else 1)
                    base_col = source_base[rest] * width_source
                    for l in range(nk):
                        weight = omega[target[a], target[b], l]
                        if weight == 0:
                            continue
                        inner, merged = insert_front(l, kernel_subset)
                        if inner == 0:
                            continue
                        result[row, base_col + source_kernel[merged]] += outer * inner * weight
    return result


def _apply(matrix: np.ndarray, theta: BigradedCochain, p: int, q: int, couple: Couple) -> BigradedCochain:
    if (theta.n_base, theta.n_kernel) != (couple.n_base, couple.n_kernel):
        raise StructuralError("bigraded cochain", (couple.n_base, couple.n_kernel), (theta.n_base, theta.n_kernel))
    values = theta.flat()
    if matrix.dtype != object or values.dtype != object:
        matrix, values = to_float(matrix), to_float(values)
    image = matrix.dot(values) if values.size else zeros(matrix.shape[0], EXACT if matrix.dtype == object else APPROX)
    shape = (len(subsets(couple.n_base, p)), len(subsets(couple.n_kernel, q)))
    return BigradedCochain(p, q, couple.n_base, couple.n_kernel, image.reshape(shape))


def delta01(cpl: CoupleLike, theta: BigradedCochain) -> BigradedCochain:
    couple = _couple_of(cpl)
    return _apply(delta01_matrix(couple, theta.p, theta.q), theta, theta.p, theta.q + 1, couple)


def delta10(cpl: CoupleLike, theta: BigradedCochain) -> BigradedCochain:
    couple = _couple_of(cpl)
    return _apply(delta10_matrix(couple, theta.p, theta.q), theta, theta.p + 1, theta.q, couple)


def delta21(cpl: CoupleLike, theta: BigradedCochain) -> BigradedCochain:
    couple = _couple_of(cpl)
    if theta.q < 1:
        raise ContractViolationError("delta21", f"kernel degree underflow: bidegree ({theta.p},{theta.q})")
    return _apply(delta21_matrix(couple, theta.p, theta.q), theta, theta.p + 2, theta.q - 1, couple)


def bigraded_differential(cpl: CoupleLike, k: int) -> np.ndarray:
    """delta01 + delta10 + delta21 as one block matrix between the concatenated bigraded blocks."""
    couple = _couple_of(cpl)
    nb, nk = couple.n_base, couple.n_kernel
    source = block_offsets(nb, nk, k)
    target = block_offsets(nb, nk, k + 1)
    rows = sum(bidegree_dim(nb, nk, p, q) for p, q in target)
    cols = sum(bidegree_dim(nb, nk, p, q) for p, q in source)
    result = zeros((rows, cols), couple.mode)
    builders = ((0, 1, delta01_matrix), (1, 0, delta10_matrix), (2, -1, delta21_matrix))
    for (p, q), col in source.items():
        width = bidegree_dim(nb, nk, p, q)
        for dp, dq, builder in builders:
            key = (p + dp, q + dq)
            if key not in target:
                continue
            block = builder(couple, p, q)
            row = target[key]
            result[row:row + block.shape[0], col:col + width] = block
    return result
