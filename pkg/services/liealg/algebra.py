# services/liealg/algebra.py
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from config_services import numerics
from exceptions import ContractViolationError, StructuralError
from utils.linalg import (
    APPROX,
    EXACT,
    as_array,
    backend_for,
    literal_mode,
    max_abs,
    to_float,
    zeros,
)

logger = logging.getLogger(__name__)

Triple = Tuple[int, int, int]


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """
    Finite-dimensional Lie algebra given by structure constants.

    ``constants[i, j, k]`` is the coefficient of e_k in [e_i, e_j]. The
    constants are stored as given; antisymmetry and Jacobi are checked by
    ``check_jacobi`` rather than enforced here.
    """
    dim: int
    basis_names: Tuple[str, ...]
    constants: np.ndarray
    mode: str = EXACT
    name: str = ""

    def __post_init__(self):
        if self.dim < 1:
            raise StructuralError("algebra dimension", "positive integer", self.dim)
        if len(self.basis_names) != self.dim:
            raise StructuralError("basis names", self.dim, len(self.basis_names))
        expected = (self.dim,) * 3
        if tuple(self.constants.shape) != expected:
            raise StructuralError("structure constants", expected, tuple(self.constants.shape))

    @cached_property
    def float_constants(self) -> np.ndarray:
        return to_float(self.constants)

    def basis_vector(self, index: int) -> np.ndarray:
        vector = zeros(self.dim, self.mode)
        vector[index] = 1.0 if self.mode == APPROX else Fraction(1)
        return vector

    def __repr__(self) -> str:
        label = self.name or "LieAlgebra"
        return f"<{label} dim={self.dim} mode={self.mode}>"


def from_constants(constants: Any, basis_names: Optional[Sequence[str]] = None, mode: Optional[str] = None,
                   name: str = "") -> LieAlgebra:
    raw = np.asarray(constants, dtype=object)
    if raw.ndim != 3:
        raise StructuralError("structure constants", "rank-3 array", raw.shape)
    if mode is None:
        mode = literal_mode(raw.flat)
    n = raw.shape[0]
    names = tuple(basis_names) if basis_names is not None else tuple(f"e{i + 1}" for i in range(n))
    return LieAlgebra(dim=n, basis_names=names, constants=as_array(raw, mode), mode=mode, name=name)


def from_brackets(basis_names: Sequence[str], brackets: Iterable[Tuple[int, int, int, Any]],
                  mode: Optional[str] = None, name: str = "") -> LieAlgebra:
    """
    Assemble an algebra from nonzero brackets (i, j, k, value), 0-based.

    Each entry sets [e_i, e_j] += value e_k and [e_j, e_i] -= value e_k;
    entries not listed are zero.
    """
    entries = list(brackets)
    if mode is None:
        mode = literal_mode(v for *_, v in entries)
    n = len(basis_names)
    constants = zeros((n, n, n), mode)
    for i, j, k, value in entries:
        for index in (i, j, k):
            if not 0 <= index < n:
                raise StructuralError("bracket index", f"0..{n - 1}", index)
        if i == j:
            raise ContractViolationError("from_brackets", f"[e{i + 1}, e{i + 1}] must vanish")
        scalar = as_array([value], mode)[0]
        constants[i, j, k] += scalar
        constants[j, i, k] -= scalar
    return LieAlgebra(dim=n, basis_names=tuple(basis_names), constants=constants, mode=mode, name=name)


def _is_exact_input(array: np.ndarray) -> bool:
    return array.dtype == object or array.dtype.kind in "iub"


def coerce(algebra: LieAlgebra, *arrays: Any) -> Tuple[np.ndarray, List[np.ndarray]]:
    """
    Structure constants and operands in a common arithmetic.

    Exact when the algebra is exact and no operand carries floats,
    float64 otherwise.
    """
    converted = [np.asarray(a) for a in arrays]
    if algebra.mode == EXACT and all(_is_exact_input(a) for a in converted):
        return algebra.constants, [as_array(a, EXACT) for a in converted]
    return algebra.float_constants, [to_float(a) for a in converted]


def _check_vector(algebra: LieAlgebra, vector: np.ndarray, what: str) -> None:
    if vector.shape != (algebra.dim,):
        raise StructuralError(what, (algebra.dim,), vector.shape)


def bracket(algebra: LieAlgebra, x: Any, y: Any) -> np.ndarray:
    """[x, y] for coefficient vectors x and y."""
    c, (xv, yv) = coerce(algebra, x, y)
    _check_vector(algebra, xv, "bracket operand")
    _check_vector(algebra, yv, "bracket operand")
    return np.tensordot(yv, np.tensordot(xv, c, axes=(0, 0)), axes=(0, 0))


def batch_bracket(algebra: LieAlgebra, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Float brackets of stacked vectors, broadcasting over leading axes."""
    return np.einsum('...i,...j,ijk->...k', np.asarray(x, dtype=float), np.asarray(y, dtype=float),
                     algebra.float_constants)


def ad(algebra: LieAlgebra, x: Any) -> np.ndarray:
    """Matrix of y -> [x, y]; column j is [x, e_j]."""
    c, (xv,) = coerce(algebra, x)
    _check_vector(algebra, xv, "ad argument")
    return np.tensordot(xv, c, axes=(0, 0)).T


def batch_ad(algebra: LieAlgebra, x: np.ndarray) -> np.ndarray:
    """Float ad matrices of stacked vectors: shape (..., n, n)."""
    return np.einsum('...i,ijk->...kj', np.asarray(x, dtype=float), algebra.float_constants)


@dataclass
class JacobiReport:
    """Outcome of check_jacobi; triples are 1-based"""
    ok: bool
    antisymmetry_violations: List[Tuple[Triple, float]] = field(default_factory=list)
    jacobi_violations: List[Tuple[Triple, float]] = field(default_factory=list)
    max_residual: float = 0.0

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "antisymmetry_violations": [{"triple": list(t), "residual": r} for t, r in self.antisymmetry_violations],
            "jacobi_violations": [{"triple": list(t), "residual": r} for t, r in self.jacobi_violations],
            "max_residual": self.max_residual,
        }


def _tolerance(mode: str, tol: Optional[float]) -> float:
    if mode == EXACT:
        return 0.0
    if tol is not None:
        return tol
    return numerics().approx_tol


def check_jacobi(algebra: Union[LieAlgebra, np.ndarray], tol: Optional[float] = None) -> JacobiReport:
    """
    Antisymmetry and Jacobi identity on every basis triple.

    Accepts a LieAlgebra or a raw constants array (so malformed input
    reaches the shape check).
    """
    if isinstance(algebra, LieAlgebra):
        c, mode = algebra.constants, algebra.mode
    else:
        raw = np.asarray(algebra, dtype=object)
        if raw.ndim != 3 or len(set(raw.shape)) != 1:
            raise StructuralError("structure constants", "n x n x n", raw.shape)
        mode = literal_mode(raw.flat)
        c = as_array(raw, mode)
    n = c.shape[0]
    threshold = _tolerance(mode, tol)

    antisymmetry: List[Tuple[Triple, float]] = []
    for i in range(n):
        for j in range(i, n):
            for k in range(n):
                residual = abs(c[i, j, k] + c[j, i, k])
                if float(residual) > threshold:
                    antisymmetry.append(((i + 1, j + 1, k + 1), float(residual)))

    # T[i, j, k, m] = coefficient of e_m in [[e_i, e_j], e_k]
    nested = np.tensordot(c, c, axes=(2, 0))
    if antisymmetry:
        triples = [(i, j, k) for i in range(n) for j in range(n) for k in range(n)]
    else:
        triples = [(i, j, k) for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)]
    jacobi: List[Tuple[Triple, float]] = []
    for i, j, k in triples:
        cyclic = nested[i, j, k] + nested[j, k, i] + nested[k, i, j]
        residual = max_abs(cyclic)
        if residual > threshold:
            jacobi.append(((i + 1, j + 1, k + 1), residual))

    residuals = [r for _, r in antisymmetry + jacobi]
    report = JacobiReport(
        ok=not antisymmetry and not jacobi,
        antisymmetry_violations=antisymmetry,
        jacobi_violations=jacobi,
        max_residual=max(residuals) if residuals else 0.0,
    )
    if not report.ok:
        logger.warning(f"[LIEALG] [JACOBI] {len(antisymmetry)} antisymmetry and {len(jacobi)} Jacobi violations")
    else:
        logger.debug(f"[LIEALG] [JACOBI] dim={n} ok")
    return report


def derivation_residual(algebra: LieAlgebra, matrix: Any) -> float:
    """max over basis pairs of |M[e_i, e_j] - [M e_i, e_j] - [e_i, M e_j]|"""
    c, (m,) = coerce(algebra, matrix)
    n = algebra.dim
    if m.shape != (n, n):
        raise StructuralError("derivation matrix", (n, n), m.shape)
    image_of_bracket = np.tensordot(c, m, axes=(2, 1))
    left = np.tensordot(m, c, axes=(0, 0))
    right = np.tensordot(c, m, axes=(1, 0)).transpose(0, 2, 1)
    return max_abs(image_of_bracket - left - right)


def is_derivation(algebra: LieAlgebra, matrix: Any, tol: Optional[float] = None) -> bool:
    c, (m,) = coerce(algebra, matrix)
    mode = EXACT if m.dtype == object else APPROX
    return derivation_residual(algebra, m) <= _tolerance(mode, tol)


def center(algebra: LieAlgebra) -> np.ndarray:
    """Basis of the center, as columns."""
    n = algebra.dim
    # row (j, k), column i: coefficient of e_k in [e_i, e_j]
    stacked = algebra.constants.transpose(1, 2, 0).reshape(n * n, n)
    basis = backend_for(algebra.mode).nullspace(stacked)
    logger.debug(f"[LIEALG] [CENTER] dim={basis.shape[1]}")
    return basis


@dataclass(frozen=True, eq=False)
class LieRep:
    """Matrix representation: ``matrices[i]`` is rho(e_i), acting on column vectors"""
    algebra: LieAlgebra
    matrices: np.ndarray
    name: str = ""

    def __post_init__(self):
        if self.matrices.ndim != 3 or self.matrices.shape[0] != self.algebra.dim \
                or self.matrices.shape[1] != self.matrices.shape[2]:
            raise StructuralError("representation matrices", f"({self.algebra.dim}, m, m)", self.matrices.shape)

    @property
    def dim(self) -> int:
        return self.matrices.shape[1]

    @property
    def mode(self) -> str:
        return EXACT if self.matrices.dtype == object else APPROX

    @cached_property
    def float_matrices(self) -> np.ndarray:
        return to_float(self.matrices)

    def action(self, x: Any) -> np.ndarray:
        """rho(x) for a coefficient vector, or stacked vectors (..., n) in floats."""
        xv = np.asarray(x)
        if xv.ndim == 1 and _is_exact_input(xv) and self.mode == EXACT:
            return np.tensordot(as_array(xv, EXACT), self.matrices, axes=(0, 0))
        return np.tensordot(to_float(xv), self.float_matrices, axes=(-1, 0))

    def is_faithful(self) -> bool:
        stacked = self.matrices.reshape(self.algebra.dim, -1)
        return backend_for(self.mode).rank(stacked) == self.algebra.dim

    def inverse_action(self, matrix: np.ndarray) -> np.ndarray:
        """Coefficients x with rho(x) closest to ``matrix`` (least squares, floats)."""
        flat = np.asarray(matrix, dtype=float).reshape(*np.shape(matrix)[:-2], -1)
        basis = self.float_matrices.reshape(self.algebra.dim, -1).T
        solution, *_ = np.linalg.lstsq(basis, flat.reshape(-1, basis.shape[0]).T, rcond=None)
        return solution.T.reshape(*np.shape(matrix)[:-2], self.algebra.dim)


def make_rep(algebra: LieAlgebra, matrices: Any, name: str = "") -> LieRep:
    raw = np.asarray(matrices, dtype=object)
    mode = APPROX if algebra.mode == APPROX else literal_mode(raw.flat)
    return LieRep(algebra=algebra, matrices=as_array(raw, mode), name=name)


@dataclass
class RepresentationReport:
    ok: bool
    residual: float
    violations: List[Tuple[Tuple[int, int], float]] = field(default_factory=list)


def check_representation(rep: LieRep, tol: Optional[float] = None) -> RepresentationReport:
    """rho[e_i, e_j] = [rho e_i, rho e_j] on all basis pairs (pairs 1-based)."""
    algebra = rep.algebra
    if rep.mode == EXACT and algebra.mode == EXACT:
        c, rho, mode = algebra.constants, rep.matrices, EXACT
    else:
        c, rho, mode = algebra.float_constants, rep.float_matrices, APPROX
    threshold = _tolerance(mode, tol)
    violations: List[Tuple[Tuple[int, int], float]] = []
    worst = 0.0
    for i in range(algebra.dim):
        for j in range(i + 1, algebra.dim):
            image = np.tensordot(c[i, j], rho, axes=(0, 0))
            commutator = rho[i].dot(rho[j]) - rho[j].dot(rho[i])
            residual = max_abs(image - commutator)
            worst = max(worst, residual)
            if residual > threshold:
                violations.append(((i + 1, j + 1), residual))
    if violations:
        logger.warning(f"[LIEALG] [REP] {rep.name or 'representation'} fails on {len(violations)} pairs")
    return RepresentationReport(ok=not violations, residual=worst, violations=violations)
