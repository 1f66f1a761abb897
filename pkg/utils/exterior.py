# utils/exterior.py - Canonical indexing of exterior powers
import logging
from functools import lru_cache
from itertools import combinations
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

Subset = Tuple[int, ...]


@lru_cache(maxsize=None)
def subsets(n: int, k: int) -> Tuple[Subset, ...]:
    """Strictly increasing k-subsets of range(n) in lexicographic order."""
    if k < 0 or k > n:
        return ()
    return tuple(combinations(range(n), k))


@lru_cache(maxsize=None)
def subset_index(n: int, k: int) -> Dict[Subset, int]:
    """Position of each k-subset in the canonical order."""
    return {s: i for i, s in enumerate(subsets(n, k))}


def sort_sign(indices: Sequence[int]) -> Tuple[int, Optional[Subset]]:
    """
    Sign of the permutation sorting ``indices`` and the sorted tuple.

    Returns (0, None) when an index repeats, since the wedge then vanishes.
    """
    items = list(indices)
    if len(set(items)) != len(items):
        return 0, None
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(items)


def insert_front(index: int, rest: Subset) -> Tuple[int, Optional[Subset]]:
    """Sign and sorted subset for the ordered tuple (index, *rest) with ``rest`` sorted."""
    if index in rest:
        return 0, None
    position = sum(1 for r in rest if r < index)
    merged = rest[:position] + (index,) + rest[position:]
    return (-1 if position % 2 else 1), merged


def exterior_power_derivation(matrix: np.ndarray, degree: int) -> np.ndarray:
    """
    Matrix of the derivation extension of ``matrix`` to the ``degree``-th exterior power.

    Column J is the image of e_J = e_{j1} ^ ... ^ e_{jl}, i.e. the sum over slots of
    e_{j1} ^ ... ^ M e_{jr} ^ ... ^ e_{jl}. Entries keep the dtype of ``matrix``.
    """
    n = matrix.shape[0]
    basis = subsets(n, degree)
    index = subset_index(n, degree)
    result = np.zeros((len(basis), len(basis)), dtype=matrix.dtype)
    for col, subset in enumerate(basis):
        for slot, j in enumerate(subset):
            for i in range(n):
                entry = matrix[i, j]
                if entry == 0:
                    continue
                replaced = subset[:slot] + (i,) + subset[slot + 1:]
                sign, target = sort_sign(replaced)
                if sign == 0:
                    continue
                result[index[target], col] += sign * entry
    return result


def exterior_power_dual_action(matrix: np.ndarray, degree: int) -> np.ndarray:
    """Action of a derivation on degree-forms: (D.mu)(w) = -mu(D w), i.e. -(D^(l))^T."""
    return -exterior_power_derivation(matrix, degree).T
