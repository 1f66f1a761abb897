# interfaces.py - Base interfaces and abstractions for the Lie extension toolkit
from abc import ABC, abstractmethod
from typing import Any, Optional, Tuple

import numpy as np


class ILinearBackend(ABC):
    """Interface for rank / kernel / solve over a scalar mode"""

    mode: str

    @abstractmethod
    def rank(self, matrix: np.ndarray) -> int:
        """Rank of a matrix"""
        pass

    @abstractmethod
    def nullspace(self, matrix: np.ndarray) -> np.ndarray:
        """Basis of the kernel, as columns"""
        pass

    @abstractmethod
    def column_basis(self, matrix: np.ndarray) -> np.ndarray:
        """Independent columns of the matrix spanning its column space"""
        pass

    @abstractmethod
    def solve(self, matrix: np.ndarray, rhs: np.ndarray) -> Optional[np.ndarray]:
        """One solution of matrix @ x = rhs, or None when inconsistent"""
        pass


class IEvolutionSolver(ABC):
    """Interface for solvers of d_eps alpha - d_t beta = [alpha, beta]"""

    name: str

    @abstractmethod
    def solve(self, algebra: Any, alpha: np.ndarray, beta0: np.ndarray) -> np.ndarray:
        """
        Solve for beta on the (t, eps) grid of alpha.

        Args:
            algebra: LieAlgebra carrying the bracket
            alpha: samples of shape (N+1, M+1, n), or (N+1, M+1, ..., n) for
                a batch of independent grids
            beta0: initial values beta(t=0, eps), shaped like alpha[0]

        Returns:
            beta samples shaped like alpha
        """
        pass


class IManifestLoader(ABC):
    """Interface for loading named algebras, couples, paths and grids"""

    @abstractmethod
    def load(self, path: str) -> Any:
        """Read and validate a manifest file"""
        pass

    @abstractmethod
    def resolve(self, manifest: Any, kind: str, name: str, seed: Optional[int] = None) -> Tuple[str, Any]:
        """
        Build the domain object named ``name``.

        ``kind`` is one of algebra, representation, couple, path, grid or any;
        the kind actually found is returned with the object. ``seed`` feeds
        grids generated from random potentials.
        """
        pass

    @abstractmethod
    def couple_parts(self, manifest: Any, name: str) -> Tuple[Any, Any, np.ndarray, np.ndarray]:
        """Base, kernel, D and omega of a couple before any check runs"""
        pass
