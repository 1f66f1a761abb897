# utils/linalg.py - Exact and floating point linear algebra backends
import logging
from fractions import Fraction
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from config_services import numerics
from exceptions import ContractViolationError
from interfaces import ILinearBackend

logger = logging.getLogger(__name__)

EXACT = "exact"
APPROX = "approx"
MODES = (EXACT, APPROX)

Scalar = Union[Fraction, float]


def parse_scalar(value: Any, mode: str = EXACT) -> Scalar:
    """
    Convert a literal to a scalar of the requested mode.

    Exact mode accepts ints, Fractions, "p/q" strings and decimal floats
    (taken at their printed decimal value); approx mode returns floats.
    """
    if mode not in MODES:
        raise ContractViolationError("parse_scalar", f"unknown mode {mode!r}")
    if mode == APPROX:
        if isinstance(value, str):
            return float(Fraction(value))
        return float(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    return Fraction(value)


def literal_mode(values: Iterable[Any]) -> str:
    """Exact unless some literal is a float."""
    return APPROX if any(isinstance(v, float) for v in values) else EXACT


def as_array(values: Any, mode: str) -> np.ndarray:
    """Numpy array of Fractions (object dtype) or float64 depending on the mode."""
    if mode == APPROX:
        return np.asarray(values, dtype=float)
    raw = np.asarray(values, dtype=object)
    result = np.empty(raw.shape, dtype=object)
    for idx, value in np.ndenumerate(raw):
        result[idx] = parse_scalar(value, EXACT)
    return result


def zeros(shape: Union[int, Tuple[int, ...]], mode: str) -> np.ndarray:
    if mode == APPROX:
        return np.zeros(shape, dtype=float)
    result = np.empty(shape, dtype=object)
    result.fill(Fraction(0))
    return result


def identity(n: int, mode: str) -> np.ndarray:
    result = zeros((n, n), mode)
    for i in range(n):
        result[i, i] = Fraction(1) if mode == EXACT else 1.0
    return result


def mode_of(array: np.ndarray) -> str:
    return EXACT if np.asarray(array).dtype == object else APPROX


def to_float(array: np.ndarray) -> np.ndarray:
    arr = np.asarray(array)
    if arr.dtype == object:
        return np.array([float(x) for x in arr.flat], dtype=float).reshape(arr.shape)
    return arr.astype(float)


def max_abs(array: np.ndarray) -> float:
    """Largest absolute entry as a float (0.0 for empty arrays)."""
    arr = np.asarray(array)
    if arr.size == 0:
        return 0.0
    return float(max(abs(x) for x in arr.flat)) if arr.dtype == object else float(np.max(np.abs(arr)))


def is_zero(array: np.ndarray, tol: float = 0.0) -> bool:
    """Exact zero test for Fraction arrays, thresholded test for floats."""
    arr = np.asarray(array)
    if arr.size == 0:
        return True
    if arr.dtype == object:
        return all(x == 0 for x in arr.flat)
    return float(np.max(np.abs(arr))) <= tol


def _to_domain(matrix: np.ndarray) -> DomainMatrix:
    rows = []
    for row in matrix:
        converted = []
        for x in row:
            f = Fraction(x)
            converted.append(QQ(f.numerator, f.denominator))
        rows.append(converted)
    return DomainMatrix(rows, matrix.shape, QQ)


def _from_domain_rows(rows: Sequence[Sequence[Any]]) -> List[List[Fraction]]:
    return [[Fraction(int(q.numerator), int(q.denominator)) for q in row] for row in rows]


class ExactBackend(ILinearBackend):
    """Rank, kernels and solves over QQ via sympy's DomainMatrix"""

    mode = EXACT

    def rank(self, matrix: np.ndarray) -> int:
        matrix = np.asarray(matrix, dtype=object)
        if matrix.size == 0:
            return 0
        return int(_to_domain(matrix).rank())

    def nullspace(self, matrix: np.ndarray) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=object)
        rows, cols = matrix.shape
        if cols == 0:
            return zeros((0, 0), EXACT)
        if rows == 0:
            return identity(cols, EXACT)
        basis_rows = _from_domain_rows(_to_domain(matrix).nullspace().to_list())
        if not basis_rows:
            return zeros((cols, 0), EXACT)
        return np.array(basis_rows, dtype=object).T

    def rref(self, matrix: np.ndarray) -> Tuple[np.ndarray, Tuple[int, ...]]:
        matrix = np.asarray(matrix, dtype=object)
        if matrix.size == 0:
            return matrix.copy(), ()
        reduced, pivots = _to_domain(matrix).rref()
        return np.array(_from_domain_rows(reduced.to_list()), dtype=object), tuple(pivots)

    def column_basis(self, matrix: np.ndarray) -> np.ndarray:
        """Pivot columns of ``matrix``: a basis of its column space made of its own columns."""
        matrix = np.asarray(matrix, dtype=object)
        if matrix.size == 0:
            return zeros((matrix.shape[0], 0), EXACT)
        _, pivots = self.rref(matrix)
        return matrix[:, list(pivots)]

    def solve(self, matrix: np.ndarray, rhs: np.ndarray) -> Optional[np.ndarray]:
        matrix = np.asarray(matrix, dtype=object)
        rhs = np.asarray(rhs, dtype=object)
        rows, cols = matrix.shape
        if rows == 0:
            return zeros(cols, EXACT)
        augmented = np.concatenate([matrix, rhs.reshape(rows, 1)], axis=1)
        reduced, pivots = self.rref(augmented)
        if cols in pivots:
            return None
        solution = zeros(cols, EXACT)
        for r, pivot in enumerate(pivots):
            solution[pivot] = reduced[r, cols]
        return solution


class ApproxBackend(ILinearBackend):
    """SVD based numerical rank with a relative singular value threshold"""

    mode = APPROX

    def __init__(self, rtol: float = 1e-10):
        self.rtol = rtol

    def _threshold(self, singular_values: np.ndarray) -> float:
        if singular_values.size == 0:
            return 0.0
        return self.rtol * float(singular_values[0])

    def rank(self, matrix: np.ndarray) -> int:
        matrix = np.asarray(matrix, dtype=float)
        if matrix.size == 0:
            return 0
        s = np.linalg.svd(matrix, compute_uv=False)
        if s[0] == 0.0:
            return 0
        return int(np.sum(s > self._threshold(s)))

    def nullspace(self, matrix: np.ndarray) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=float)
        rows, cols = matrix.shape
        if cols == 0:
            return np.zeros((0, 0))
        if rows == 0:
            return np.eye(cols)
        _, s, vt = np.linalg.svd(matrix)
        r = self.rank(matrix)
        return vt[r:].T.copy()

    def column_basis(self, matrix: np.ndarray) -> np.ndarray:
        matrix = np.asarray(matrix, dtype=float)
        chosen: List[int] = []
        for j in range(matrix.shape[1]):
            candidate = chosen + [j]
            if self.rank(matrix[:, candidate]) == len(candidate):
                chosen = candidate
        return matrix[:, chosen]

    def solve(self, matrix: np.ndarray, rhs: np.ndarray) -> Optional[np.ndarray]:
        matrix = np.asarray(matrix, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        if matrix.shape[0] == 0:
            return np.zeros(matrix.shape[1])
        solution, *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
        scale = max(1.0, float(np.max(np.abs(rhs))) if rhs.size else 1.0)
        if np.max(np.abs(matrix @ solution - rhs)) > 1e3 * self.rtol * scale * max(matrix.shape):
            return None
        return solution


_EXACT_BACKEND = ExactBackend()


def backend_for(mode: str, rtol: Optional[float] = None) -> ILinearBackend:
    """Backend matching a scalar mode; approx tolerance from configuration unless given."""
    if mode == EXACT:
        return _EXACT_BACKEND
    if mode == APPROX:
        if rtol is None:
            rtol = numerics().rank_rtol
        return ApproxBackend(rtol=rtol)
    raise ContractViolationError("backend_for", f"unknown mode {mode!r}")


def matmul(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Matrix product that also handles an empty inner dimension for Fraction arrays."""
    if left.shape[-1] == 0:
        mode = EXACT if left.dtype == object or right.dtype == object else APPROX
        return zeros(left.shape[:-1] + right.shape[1:], mode)
    return left.dot(right)
