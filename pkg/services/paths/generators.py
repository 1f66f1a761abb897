# services/paths/generators.py
"""
Homotopies and spheres built from group-valued potentials.

For a potential X(t, eps, u) in the algebra and a faithful representation rho,
g = exp(rho(X)) and the components a = rho^-1(-g_t g^-1), b = rho^-1(-g_eps g^-1),
c = rho^-1(-g_u g^-1) satisfy every morphism equation d_x y - d_y x = [x, y]
exactly, so they serve as reference data for the numerical routines.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm

from exceptions import ContractViolationError, StructuralError
from services.liealg.algebra import LieRep
from services.paths.models import ASphere, HomotopyGrid, SphereFamily
from utils.integrators import uniform_times

logger = logging.getLogger(__name__)

Mode = Tuple[int, int, np.ndarray]


@dataclass
class SinePotential:
    """
    X = scale * sum_k (1 + u w_k) sin(p_k pi t) sin(q_k pi eps) v_k
        + t * drift + eps sin(pi t) * bend

    The mode terms vanish on the whole boundary of the square, so without
    ``drift`` and ``bend`` the potential generates spheres. ``drift`` makes the
    edge paths nonzero, ``bend`` makes the two edge paths differ.
    """
    modes: Sequence[Mode]
    scale: float = 1.0
    weights: Optional[Sequence[float]] = None
    drift: Optional[np.ndarray] = None
    bend: Optional[np.ndarray] = None
    dim: int = field(init=False, default=0)

    def __post_init__(self):
        if not self.modes:
            raise ContractViolationError("SinePotential", "at least one mode is required")
        self.modes = [(int(p), int(q), np.asarray(v, dtype=float)) for p, q, v in self.modes]
        self.dim = self.modes[0][2].shape[0]
        if self.weights is None:
            self.weights = [0.0] * len(self.modes)
        if len(self.weights) != len(self.modes):
            raise StructuralError("potential weights", len(self.modes), len(self.weights))
        for label in ("drift", "bend"):
            value = getattr(self, label)
            if value is not None:
                setattr(self, label, np.asarray(value, dtype=float))

    @property
    def generates_spheres(self) -> bool:
        return self.drift is None and self.bend is None

    @classmethod
    def random(cls, dim: int, rng: np.random.Generator, count: int = 2, scale: float = 0.5,
               max_frequency: int = 2, weight: float = 0.0, drift: bool = False,
               bend: bool = False) -> 'SinePotential':
        modes = [(int(rng.integers(1, max_frequency + 1)), int(rng.integers(1, max_frequency + 1)),
                  rng.normal(size=dim)) for _ in range(count)]
        weights = list(weight * rng.uniform(-1.0, 1.0, size=count))
        return cls(modes=modes, scale=scale, weights=weights,
                   drift=0.5 * rng.normal(size=dim) if drift else None,
                   bend=0.5 * rng.normal(size=dim) if bend else None)

    def values(self, t: np.ndarray, eps: np.ndarray, u: np.ndarray = 0.0) -> List[np.ndarray]:
        """X and its t, eps and u derivatives on broadcast coordinate arrays."""
        t, eps, u = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(eps, dtype=float),
                                        np.asarray(u, dtype=float))
        shape = t.shape + (self.dim,)
        X, X_t, X_eps, X_u = (np.zeros(shape) for _ in range(4))
        for (p, q, vector), w in zip(self.modes, self.weights):
            amplitude = self.scale * (1.0 + u * w)
            st, se = np.sin(p * np.pi * t), np.sin(q * np.pi * eps)
            dt, de = p * np.pi * np.cos(p * np.pi * t), q * np.pi * np.cos(q * np.pi * eps)
            X += (amplitude * st * se)[..., None] * vector
            X_t += (amplitude * dt * se)[..., None] * vector
            X_eps += (amplitude * st * de)[..., None] * vector
            X_u += (self.scale * w * st * se)[..., None] * vector
        if self.drift is not None:
            X += t[..., None] * self.drift
            X_t += np.ones_like(t)[..., None] * self.drift
        if self.bend is not None:
            X += (eps * np.sin(np.pi * t))[..., None] * self.bend
            X_t += (eps * np.pi * np.cos(np.pi * t))[..., None] * self.bend
            X_eps += np.sin(np.pi * t)[..., None] * self.bend
        return [X, X_t, X_eps, X_u]


def _checked(rep: LieRep, potential: SinePotential) -> None:
    if rep.algebra.dim != potential.dim:
        raise StructuralError("potential vectors", rep.algebra.dim, potential.dim)
    if not rep.is_faithful():
        raise ContractViolationError("potential generator", "representation is not faithful")


def exp_derivative(generator: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Derivative of expm at ``generator`` along ``direction``, batched over leading axes."""
    m = generator.shape[-1]
    block = np.zeros(generator.shape[:-2] + (2 * m, 2 * m))
    block[..., :m, :m] = generator
    block[..., m:, m:] = generator
    block[..., :m, m:] = direction
    return expm(block)[..., :m, m:]


def log_derivatives(rep: LieRep, X: np.ndarray, derivatives: Sequence[np.ndarray]) -> List[np.ndarray]:
    """rho^-1(-dg g^-1) for g = exp(rho(X)) and each derivative of X."""
    generator = rep.action(X)
    inverse = expm(-generator)
    return [rep.inverse_action(-np.matmul(exp_derivative(generator, rep.action(d)), inverse))
            for d in derivatives]


def group_values(rep: LieRep, potential: SinePotential, t, eps, u=0.0) -> np.ndarray:
    X = potential.values(t, eps, u)[0]
    return expm(rep.action(X))


def homotopy_from_potential(rep: LieRep, potential: SinePotential, N: int, M: int) -> HomotopyGrid:
    _checked(rep, potential)
    t, eps = np.meshgrid(uniform_times(N + 1), uniform_times(M + 1), indexing='ij')
    X, X_t, X_eps, _ = potential.values(t, eps)
    a, b = log_derivatives(rep, X, [X_t, X_eps])
    logger.debug(f"[PATHS] [GENERATOR] homotopy on {N + 1}x{M + 1} grid")
    return HomotopyGrid(rep.algebra, a, b)


def sphere_from_potential(rep: LieRep, potential: SinePotential, N: int, M: int) -> ASphere:
    if not potential.generates_spheres:
        raise ContractViolationError("sphere_from_potential", "drift and bend terms do not vanish on the boundary")
    return ASphere(homotopy_from_potential(rep, potential, N, M))


def sphere_family_from_potential(rep: LieRep, potential: SinePotential, N: int, M: int, U: int) -> SphereFamily:
    if not potential.generates_spheres:
        raise ContractViolationError("sphere_family_from_potential",
                                     "drift and bend terms do not vanish on the boundary")
    _checked(rep, potential)
    t, eps, u = np.meshgrid(uniform_times(N + 1), uniform_times(M + 1), uniform_times(U + 1), indexing='ij')
    X, X_t, X_eps, X_u = potential.values(t, eps, u)
    a, b, c = log_derivatives(rep, X, [X_t, X_eps, X_u])
    logger.debug(f"[PATHS] [GENERATOR] sphere family on {N + 1}x{M + 1}x{U + 1} grid")
    return SphereFamily(rep.algebra, b, a, c)
