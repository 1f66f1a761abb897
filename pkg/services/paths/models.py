# services/paths/models.py
import logging
from dataclasses import dataclass
from typing import Any, Callable, Optional

import numpy as np

from config_services import numerics
from exceptions import ContractViolationError, StructuralError
from services.liealg.algebra import LieAlgebra, batch_bracket
from utils.integrators import SampledField, finite_difference, uniform_times

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class APath:
    """Uniform samples a(t_i), t_i = i / N, of a path in a Lie algebra"""
    algebra: LieAlgebra
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        n = self.algebra.dim
        if self.samples.ndim != 2 or self.samples.shape[1] != n:
            raise StructuralError("path samples", f"(N+1, {n})", self.samples.shape)
        if self.samples.shape[0] < 2:
            raise StructuralError("path samples", "N >= 1", self.samples.shape[0] - 1)

    @property
    def N(self) -> int:
        return self.samples.shape[0] - 1

    @property
    def spacing(self) -> float:
        return 1.0 / self.N

    @property
    def times(self) -> np.ndarray:
        return uniform_times(self.N + 1)

    @property
    def field(self) -> SampledField:
        return SampledField(self.samples)

    def __call__(self, t: float) -> np.ndarray:
        return self.field(t)

    @classmethod
    def zero(cls, algebra: LieAlgebra, N: int) -> 'APath':
        return cls(algebra, np.zeros((N + 1, algebra.dim)))

    @classmethod
    def from_function(cls, algebra: LieAlgebra, f: Callable[[float], Any], N: int) -> 'APath':
        return cls(algebra, np.stack([np.asarray(f(t), dtype=float) for t in uniform_times(N + 1)]))


@dataclass(eq=False)
class HomotopyGrid:
    """
    h = a dt + b deps sampled on a uniform (N+1) x (M+1) grid.

    ``a[i, j]`` and ``b[i, j]`` are the values at (t_i, eps_j). ``b`` may be
    left out when only the family of paths a(., eps) is known.

    Construction checks shapes only. A given ``b`` is not tested against the
    morphism condition until ``check_morphism`` (or ``morphism_residual``) runs.
    """
    algebra: LieAlgebra
    a: np.ndarray
    b: Optional[np.ndarray] = None

    def __post_init__(self):
        self.a = np.asarray(self.a, dtype=float)
        n = self.algebra.dim
        if self.a.ndim != 3 or self.a.shape[2] != n:
            raise StructuralError("homotopy grid a", f"(N+1, M+1, {n})", self.a.shape)
        if self.a.shape[0] < 2 or self.a.shape[1] < 2:
            raise StructuralError("homotopy grid a", "N >= 1 and M >= 1", self.a.shape)
        if self.b is not None:
            self.b = np.asarray(self.b, dtype=float)
            if self.b.shape != self.a.shape:
                raise StructuralError("homotopy grid b", self.a.shape, self.b.shape)

    @property
    def N(self) -> int:
        return self.a.shape[0] - 1

    @property
    def M(self) -> int:
        return self.a.shape[1] - 1

    @property
    def spacing(self) -> float:
        """Coarsest of the two grid spacings"""
        return max(1.0 / self.N, 1.0 / self.M)

    def path(self, j: int) -> APath:
        """The A-path a(., eps_j)."""
        return APath(self.algebra, self.a[:, j])

    def transverse(self, i: int) -> APath:
        """eps -> b(t_i, eps)."""
        if self.b is None:
            raise ContractViolationError("HomotopyGrid.transverse", "the grid carries no b component")
        return APath(self.algebra, self.b[i])

    def check_morphism(self, tol: Optional[float] = None) -> 'HomotopyGrid':
        """Raise ContractViolationError unless the morphism residual is within tol_grid."""
        residual = morphism_residual(self)
        threshold = grid_tolerance(self) if tol is None else tol
        if residual > threshold:
            raise ContractViolationError("HomotopyGrid", f"b does not match a: morphism residual "
                                                         f"{residual:.3e} > {threshold:.1e}")
        return self

    @classmethod
    def constant(cls, path: APath, M: int) -> 'HomotopyGrid':
        """a(t, eps) = a(t), b = 0."""
        a = np.repeat(path.samples[:, None, :], M + 1, axis=1)
        return cls(path.algebra, a, np.zeros_like(a))


def morphism_residual(grid: HomotopyGrid) -> float:
    """max over interior nodes of |d_eps a - d_t b - [a, b]|"""
    if grid.b is None:
        raise ContractViolationError("morphism_residual", "the grid carries no b component")
    da_deps = finite_difference(grid.a, 1.0 / grid.M, axis=1)
    db_dt = finite_difference(grid.b, 1.0 / grid.N, axis=0)
    defect = da_deps - db_dt - batch_bracket(grid.algebra, grid.a, grid.b)
    interior = defect[1:-1, 1:-1]
    return float(np.max(np.abs(interior))) if interior.size else 0.0


def grid_tolerance(grid: HomotopyGrid) -> float:
    return numerics().tol_grid(grid.spacing)


def _boundary_defect(values: np.ndarray) -> float:
    return float(np.max(np.abs(values))) if values.size else 0.0


@dataclass(eq=False)
class ASphere:
    """
    A homotopy grid with a(., eps=0) = a(., eps=1) = 0 and b(t=0, .) = b(t=1, .) = 0.

    Boundary values within the approximation tolerance are set to exact zeros.
    """
    grid: HomotopyGrid

    def __post_init__(self):
        if self.grid.b is None:
            raise ContractViolationError("ASphere", "a sphere needs both a and b")
        tol = numerics().approx_tol
        defect = max(_boundary_defect(self.grid.a[:, 0]), _boundary_defect(self.grid.a[:, -1]),
                     _boundary_defect(self.grid.b[0]), _boundary_defect(self.grid.b[-1]))
        if defect > tol:
            raise ContractViolationError("ASphere", f"boundary values do not vanish (max {defect:.3e})")
        self.grid.a[:, 0] = 0.0
        self.grid.a[:, -1] = 0.0
        self.grid.b[0] = 0.0
        self.grid.b[-1] = 0.0

    @property
    def algebra(self) -> LieAlgebra:
        return self.grid.algebra

    @property
    def a(self) -> np.ndarray:
        return self.grid.a

    @property
    def b(self) -> np.ndarray:
        return self.grid.b


@dataclass(eq=False)
class SphereFamily:
    """
    Spheres indexed by u on a uniform (N+1) x (M+1) x (U+1) grid; axes are (t, eps, u).

    Only ``b`` is required. ``a`` and ``c`` are the dt and du components when
    they are known in closed form.
    """
    algebra: LieAlgebra
    b: np.ndarray
    a: Optional[np.ndarray] = None
    c: Optional[np.ndarray] = None

    def __post_init__(self):
        self.b = np.array(self.b, dtype=float)
        n = self.algebra.dim
        if self.b.ndim != 4 or self.b.shape[3] != n or min(self.b.shape[:3]) < 2:
            raise StructuralError("sphere family b", f"(N+1, M+1, U+1, {n}) with N, M, U >= 1", self.b.shape)
        for label in ("a", "c"):
            value = getattr(self, label)
            if value is None:
                continue
            value = np.array(value, dtype=float)
            if value.shape != self.b.shape:
                raise StructuralError(f"sphere family {label}", self.b.shape, value.shape)
            setattr(self, label, value)
        defect = max(_boundary_defect(self.b[0]), _boundary_defect(self.b[-1]))
        if self.a is not None:
            defect = max(defect, _boundary_defect(self.a[:, 0]), _boundary_defect(self.a[:, -1]))
        if defect > numerics().approx_tol:
            raise ContractViolationError("SphereFamily", f"boundary values do not vanish (max {defect:.3e})")
        self.b[0] = 0.0
        self.b[-1] = 0.0
        if self.a is not None:
            self.a[:, 0] = 0.0
            self.a[:, -1] = 0.0

    @property
    def shape(self):
        return self.b.shape[:3]

    def sphere(self, k: int) -> ASphere:
        if self.a is None:
            raise ContractViolationError("SphereFamily.sphere", "the family carries no a component")
        return ASphere(HomotopyGrid(self.algebra, self.a[:, :, k].copy(), self.b[:, :, k].copy()))
