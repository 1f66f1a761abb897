# utils/integrators.py - Fixed-step integration and interpolation of sampled data
import logging
import math
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson

from exceptions import ContractViolationError, StructuralError

logger = logging.getLogger(__name__)

# node tolerance, in units of the sample spacing
_NODE_EPS = 1e-9


def _lagrange_weights(s: float, nodes: np.ndarray) -> np.ndarray:
    weights = np.ones(len(nodes))
    for m, xm in enumerate(nodes):
        for l, xl in enumerate(nodes):
            if l != m:
                weights[m] *= (s - xl) / (xm - xl)
    return weights


class SampledField:
    """
    Uniform samples of a time-dependent quantity on [lo, hi].

    Between nodes the field is the cubic through the four nearest samples
    (linear with fewer than four samples, constant with one).
    """

    def __init__(self, samples: np.ndarray, lo: float = 0.0, hi: float = 1.0):
        self.samples = np.asarray(samples, dtype=float)
        if self.samples.ndim == 0 or self.samples.shape[0] < 1:
            raise StructuralError("sampled field", "at least one sample", self.samples.shape)
        self.lo = float(lo)
        self.hi = float(hi)
        self.count = self.samples.shape[0]
        self.spacing = (self.hi - self.lo) / (self.count - 1) if self.count > 1 else 0.0

    @classmethod
    def constant(cls, value: np.ndarray) -> 'SampledField':
        return cls(np.asarray(value, dtype=float)[None, ...])

    def __call__(self, t: float) -> np.ndarray:
        if self.count == 1:
            return self.samples[0]
        s = (t - self.lo) / self.spacing
        last = self.count - 1
        if s < -_NODE_EPS or s > last + _NODE_EPS:
            raise ContractViolationError("SampledField", f"t={t} outside [{self.lo}, {self.hi}]")
        nearest = int(round(s))
        if abs(s - nearest) <= _NODE_EPS:
            return self.samples[min(max(nearest, 0), last)]
        i = min(int(math.floor(s)), last - 1)
        if self.count < 4:
            w = s - i
            return (1.0 - w) * self.samples[i] + w * self.samples[i + 1]
        start = min(max(i - 1, 0), self.count - 4)
        nodes = np.arange(start, start + 4, dtype=float)
        weights = _lagrange_weights(s, nodes)
        return np.tensordot(weights, self.samples[start:start + 4], axes=(0, 0))

    def midpoints(self) -> np.ndarray:
        """Values at the centre of every cell, same rule as __call__."""
        f = self.samples
        if self.count == 1:
            return f[:0]
        if self.count < 4:
            return 0.5 * (f[:-1] + f[1:])
        mids = np.empty((self.count - 1,) + f.shape[1:])
        mids[1:-1] = (-f[:-3] + 9.0 * f[1:-2] + 9.0 * f[2:-1] - f[3:]) / 16.0
        mids[0] = (5.0 * f[0] + 15.0 * f[1] - 5.0 * f[2] + f[3]) / 16.0
        mids[-1] = (f[-4] - 5.0 * f[-3] + 15.0 * f[-2] + 5.0 * f[-1]) / 16.0
        return mids

    def resample(self, times: Sequence[float]) -> np.ndarray:
        return np.stack([self(t) for t in times])


def rk4(rhs: Callable[[float, np.ndarray], np.ndarray], y0: np.ndarray, t0: float, t1: float,
        steps: int, return_path: bool = False) -> np.ndarray:
    """
    Classical fixed-step 4th-order Runge-Kutta for y' = rhs(t, y).

    Args:
        rhs: right-hand side, called with (t, y) for arrays of any shape
        y0: initial value at t0
        t0, t1: integration interval (t1 < t0 integrates backwards)
        steps: number of steps
        return_path: also return the value after every step

    Returns:
        y(t1), or the array of steps+1 values when return_path is set
    """
    if steps < 1:
        raise ContractViolationError("rk4", f"steps must be at least 1, got {steps}")
    h = (t1 - t0) / steps
    y = np.array(y0, dtype=float)
    path = [y.copy()] if return_path else None
    for i in range(steps):
        t = t0 + i * h
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if path is not None:
            path.append(y.copy())
    if path is not None:
        return np.stack(path)
    return y


def finite_difference(samples: np.ndarray, spacing: float, axis: int = 0) -> np.ndarray:
    """Derivative along ``axis``: 5-point stencils, one-sided at the two boundary nodes."""
    f = np.moveaxis(np.asarray(samples, dtype=float), axis, 0)
    m = f.shape[0]
    if m < 2:
        return np.zeros_like(np.moveaxis(f, 0, axis))
    if m < 5:
        d = np.gradient(f, spacing, axis=0, edge_order=2 if m >= 3 else 1)
        return np.moveaxis(d, 0, axis)
    d = np.empty_like(f)
    d[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * spacing)
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * spacing)
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / (12.0 * spacing)
    d[-1] = (25.0 * f[-1] - 48.0 * f[-2] + 36.0 * f[-3] - 16.0 * f[-4] + 3.0 * f[-5]) / (12.0 * spacing)
    d[-2] = (3.0 * f[-1] + 10.0 * f[-2] - 18.0 * f[-3] + 6.0 * f[-4] - f[-5]) / (12.0 * spacing)
    return np.moveaxis(d, 0, axis)


def cumulative_simpson(samples: np.ndarray, spacing: float) -> np.ndarray:
    """Running integral along axis 0; Simpson on each cell with the interpolated midpoint."""
    f = np.asarray(samples, dtype=float)
    out = np.zeros_like(f)
    if f.shape[0] < 2:
        return out
    mids = SampledField(f).midpoints()
    increments = (spacing / 6.0) * (f[:-1] + 4.0 * mids + f[1:])
    out[1:] = np.cumsum(increments, axis=0)
    return out


def integrate(samples: np.ndarray, spacing: float) -> np.ndarray:
    """Composite Simpson over axis 0."""
    f = np.asarray(samples, dtype=float)
    if f.shape[0] < 2:
        return np.zeros(f.shape[1:])
    return simpson(f, dx=spacing, axis=0)


def uniform_times(count: int, lo: float = 0.0, hi: float = 1.0) -> np.ndarray:
    if count < 1:
        raise StructuralError("uniform grid", "at least one node", count)
    if count == 1:
        return np.array([lo])
    return np.linspace(lo, hi, count)
