# services/extension/standard.py
from services.extension.couple import Couple, central, make_couple, semidirect
from services.liealg.algebra import ad
from services.liealg.catalog import abelian, adjoint_rep, so3


def heisenberg_couple() -> Couple:
    """Central extension of R^2 by R with omega(e1, e2) = z; builds h3."""
    return central(abelian(2), 1, [[0, 1], [-1, 0]], name="heisenberg")


def so3_kernel_couple(with_omega: bool = True) -> Couple:
    """
    Base R^2 acting on so(3) through (ad e1, ad e2).

    Curv_D(e1, e2) = ad e3, so omega(e1, e2) = e3 makes the couple admissible;
    dropping omega breaks the curvature identity.
    """
    kernel = so3()
    d = [ad(kernel, [1, 0, 0]), ad(kernel, [0, 1, 0])]
    omega = [[[0, 0, 0], [0, 0, 1 if with_omega else 0]],
             [[0, 0, -1 if with_omega else 0], [0, 0, 0]]]
    return make_couple(abelian(2), kernel, d, omega, name="so3-kernel" if with_omega else "so3-kernel-flat")


def so3_semidirect_couple() -> Couple:
    """so(3) acting on R^3 by the adjoint matrices."""
    base = so3()
    return semidirect(base, abelian(3), adjoint_rep(base).matrices, name="so3-semidirect")


def so3_central_couple() -> Couple:
    """Central extension of so(3) by R with omega = e^1 ^ e^2 (exact, hence trivial)."""
    omega = [[0, 1, 0], [-1, 0, 0], [0, 0, 0]]
    return central(so3(), 1, omega, name="so3-central")


STANDARD_COUPLES = {
    "heisenberg": heisenberg_couple,
    "so3-kernel": so3_kernel_couple,
    "so3-kernel-flat": lambda: so3_kernel_couple(with_omega=False),
    "so3-semidirect": so3_semidirect_couple,
    "so3-central": so3_central_couple,
}
