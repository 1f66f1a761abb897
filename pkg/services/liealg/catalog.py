# services/liealg/catalog.py
from typing import Callable, Dict

import numpy as np

from exceptions import ManifestReferenceError
from services.liealg.algebra import LieAlgebra, LieRep, ad, from_brackets, make_rep
from utils.linalg import APPROX, EXACT, as_array, zeros


def abelian(n: int, name: str = "") -> LieAlgebra:
    return from_brackets([f"e{i + 1}" for i in range(n)], [], mode=EXACT, name=name or f"abelian{n}")


def so3() -> LieAlgebra:
    # [e1,e2]=e3 cyclic
    return from_brackets(["e1", "e2", "e3"], [(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)], name="so3")


def sl2() -> LieAlgebra:
    return from_brackets(["h", "e", "f"], [(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)], name="sl2")


def heisenberg() -> LieAlgebra:
    return from_brackets(["x", "y", "z"], [(0, 1, 2, 1)], name="heisenberg")


def aff1() -> LieAlgebra:
    return from_brackets(["x", "y"], [(0, 1, 1, 1)], name="aff1")


def direct_sum(first: LieAlgebra, second: LieAlgebra, name: str = "") -> LieAlgebra:
    """first + second with the two blocks commuting; names are suffixed when they clash."""
    n1, n2 = first.dim, second.dim
    mode = EXACT if first.mode == second.mode == EXACT else APPROX
    constants = zeros((n1 + n2,) * 3, mode)
    constants[:n1, :n1, :n1] = first.constants if mode == EXACT else first.float_constants
    constants[n1:, n1:, n1:] = second.constants if mode == EXACT else second.float_constants
    names = list(first.basis_names)
    for label in second.basis_names:
        names.append(label if label not in names else f"{label}'")
    return LieAlgebra(dim=n1 + n2, basis_names=tuple(names), constants=constants, mode=mode,
                      name=name or f"{first.name}+{second.name}")


def adjoint_rep(algebra: LieAlgebra) -> LieRep:
    matrices = np.stack([ad(algebra, algebra.basis_vector(i)) for i in range(algebra.dim)])
    return LieRep(algebra=algebra, matrices=matrices, name=f"ad({algebra.name})")


def trivial_rep(algebra: LieAlgebra, m: int = 1) -> LieRep:
    return LieRep(algebra=algebra, matrices=zeros((algebra.dim, m, m), algebra.mode), name="trivial")


def _units(m: int, entries) -> np.ndarray:
    matrix = np.zeros((m, m), dtype=int)
    for (r, c), v in entries:
        matrix[r, c] = v
    return matrix


def heisenberg_matrix_rep(algebra: LieAlgebra) -> LieRep:
    """Strictly upper triangular 3x3 matrices: x -> E12, y -> E23, z -> E13."""
    matrices = [_units(3, [((0, 1), 1)]), _units(3, [((1, 2), 1)]), _units(3, [((0, 2), 1)])]
    return make_rep(algebra, matrices, name="heisenberg-matrix")


def sl2_standard_rep(algebra: LieAlgebra) -> LieRep:
    matrices = [_units(2, [((0, 0), 1), ((1, 1), -1)]), _units(2, [((0, 1), 1)]), _units(2, [((1, 0), 1)])]
    return make_rep(algebra, matrices, name="sl2-standard")


def aff1_rep(algebra: LieAlgebra) -> LieRep:
    """x -> diag(1, 0), y -> E12; also a derivation action of aff(1) on R^2."""
    matrices = [_units(2, [((0, 0), 1)]), _units(2, [((0, 1), 1)])]
    return make_rep(algebra, matrices, name="aff1-affine")


def abelian_unipotent_rep(algebra: LieAlgebra) -> LieRep:
    """
    Faithful rep of R^n by (n+1) x (n+1) nilpotent matrices e_i -> E_{0,i}.

    Its group elements are I + sum_i s_i E_{0,i}, so products add the s_i.
    """
    n = algebra.dim
    matrices = np.stack([_units(n + 1, [((0, i + 1), 1)]) for i in range(n)])
    return LieRep(algebra=algebra, matrices=as_array(matrices, algebra.mode), name="unipotent")


ALGEBRAS: Dict[str, Callable[[], LieAlgebra]] = {
    "so3": so3,
    "sl2": sl2,
    "heisenberg": heisenberg,
    "aff1": aff1,
    "abelian1": lambda: abelian(1),
    "abelian2": lambda: abelian(2),
    "abelian3": lambda: abelian(3),
}

REPRESENTATIONS: Dict[str, Callable[[LieAlgebra], LieRep]] = {
    "adjoint": adjoint_rep,
    "heisenberg-matrix": heisenberg_matrix_rep,
    "sl2-standard": sl2_standard_rep,
    "aff1-affine": aff1_rep,
    "unipotent": abelian_unipotent_rep,
}


def builtin_algebra(name: str) -> LieAlgebra:
    if name in ALGEBRAS:
        return ALGEBRAS[name]()
    if name.startswith("abelian") and name[len("abelian"):].isdigit():
        return abelian(int(name[len("abelian"):]))
    raise ManifestReferenceError("builtin algebra", name)


def builtin_rep(name: str, algebra: LieAlgebra) -> LieRep:
    if name not in REPRESENTATIONS:
        raise ManifestReferenceError("builtin representation", name)
    return REPRESENTATIONS[name](algebra)
