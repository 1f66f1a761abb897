# services/paths/operations.py
import logging
from typing import Callable, Optional, Tuple

import numpy as np

from config_services import numerics
from exceptions import ContractViolationError
from services.paths.models import APath, HomotopyGrid
from utils.integrators import SampledField, integrate, uniform_times

logger = logging.getLogger(__name__)

Reparametrization = Tuple[Callable[[np.ndarray], np.ndarray], Callable[[np.ndarray], np.ndarray]]


def flatten(t):
    """Endpoint-fixing map with vanishing derivative at both ends."""
    return t - np.sin(2.0 * np.pi * t) / (2.0 * np.pi)


def flatten_rate(t):
    return 1.0 - np.cos(2.0 * np.pi * t)


FLATTENING: Reparametrization = (flatten, flatten_rate)


def _same_algebra(first, second, operation: str) -> None:
    if first.algebra is second.algebra:
        return
    if first.algebra.dim != second.algebra.dim or \
            not np.array_equal(first.algebra.float_constants, second.algebra.float_constants):
        raise ContractViolationError(operation, "paths live in different algebras")


def _half(path: APath, s: np.ndarray) -> np.ndarray:
    field = path.field
    values = np.stack([field(x) for x in flatten(s)])
    return 2.0 * flatten_rate(s)[:, None] * values


def concatenate(first: APath, second: APath) -> APath:
    """
    ``first`` followed by ``second``, each half run through the flattening map so the
    glued path is smooth at t = 1/2.
    """
    _same_algebra(first, second, "concatenate")
    N = 2 * max(first.N, second.N)
    times = uniform_times(N + 1)
    samples = np.empty((N + 1, first.algebra.dim))
    lower = times <= 0.5
    samples[lower] = _half(first, 2.0 * times[lower])
    samples[~lower] = _half(second, 2.0 * times[~lower] - 1.0)
    return APath(first.algebra, samples)


def reverse(path: APath) -> APath:
    """t -> -a(1 - t)"""
    return APath(path.algebra, -path.samples[::-1].copy())


def path_integral(path: APath) -> np.ndarray:
    """Simpson quadrature of the samples; the class of the path when the algebra is abelian."""
    return integrate(path.samples, path.spacing)


def reparametrization_homotopy(path: APath, M: Optional[int] = None,
                               reparametrization: Reparametrization = FLATTENING) -> HomotopyGrid:
    """
    Homotopy from ``path`` to its reparametrization by an endpoint-fixing map s.

    With s_eps = (1 - eps) t + eps s(t): a = s_eps' a(s_eps) and b = (s(t) - t) a(s_eps),
    which satisfies the morphism equation exactly.
    """
    mapping, rate = reparametrization
    M = M or path.N
    times = uniform_times(path.N + 1)
    eps = uniform_times(M + 1)
    field = path.field
    shift = mapping(times) - times
    a = np.empty((path.N + 1, M + 1, path.algebra.dim))
    b = np.empty_like(a)
    for j, e in enumerate(eps):
        moved = (1.0 - e) * times + e * mapping(times)
        values = np.stack([field(min(max(s, 0.0), 1.0)) for s in moved])
        a[:, j] = ((1.0 - e) + e * rate(times))[:, None] * values
        b[:, j] = shift[:, None] * values
    return HomotopyGrid(path.algebra, a, b)


def _resample_eps(values: np.ndarray, points: np.ndarray) -> np.ndarray:
    field = SampledField(np.moveaxis(values, 1, 0))
    return np.moveaxis(np.stack([field(p) for p in points]), 0, 1)


def concatenate_homotopies(first: HomotopyGrid, second: HomotopyGrid, tol: Optional[float] = None) -> HomotopyGrid:
    """
    ``first`` followed by ``second`` along eps, flattened like path concatenation.

    The final path of ``first`` must be the initial path of ``second`` on the same t-grid.
    """
    _same_algebra(first, second, "concatenate_homotopies")
    if first.N != second.N:
        raise ContractViolationError("concatenate_homotopies", f"t-grids differ ({first.N} vs {second.N} steps)")
    threshold = numerics().approx_tol if tol is None else tol
    gap = float(np.max(np.abs(first.a[:, -1] - second.a[:, 0])))
    if gap > threshold:
        raise ContractViolationError("concatenate_homotopies", f"homotopies are not composable (gap {gap:.3e})")

    M = 2 * max(first.M, second.M)
    eps = uniform_times(M + 1)
    lower = eps <= 0.5
    s_low, s_high = 2.0 * eps[lower], 2.0 * eps[~lower] - 1.0
    a = np.concatenate([_resample_eps(first.a, flatten(s_low)), _resample_eps(second.a, flatten(s_high))], axis=1)
    b = None
    if first.b is not None and second.b is not None:
        b = np.concatenate([
            2.0 * flatten_rate(s_low)[None, :, None] * _resample_eps(first.b, flatten(s_low)),
            2.0 * flatten_rate(s_high)[None, :, None] * _resample_eps(second.b, flatten(s_high)),
        ], axis=1)
    logger.debug(f"[PATHS] [CONCAT] homotopies glued into {first.N + 1}x{M + 1} grid")
    return HomotopyGrid(first.algebra, a, b)
