# tests/test_extension.py
from fractions import Fraction

import numpy as np
import pytest

from exceptions import ContractViolationError, StructuralError
from services.extension import (
    EQUIVALENT,
    NOT_EQUIVALENT,
    UNDECIDED,
    GaugeTransform,
    apply_gauge,
    are_equivalent,
    build_extension,
    central,
    covariant_differential,
    curv_D,
    curvature_identity_residual,
    inject,
    is_admissible,
    lift,
    make_couple,
    project,
    semidirect,
    shift_isomorphism_residual,
)
from services.extension.standard import (
    heisenberg_couple,
    so3_central_couple,
    so3_kernel_couple,
    so3_semidirect_couple,
)
from services.liealg import ad, check_jacobi, cohomology_dims
from services.liealg.catalog import (
    abelian,
    adjoint_rep,
    aff1,
    aff1_rep,
    direct_sum,
    heisenberg,
    heisenberg_matrix_rep,
    sl2,
    sl2_standard_rep,
    so3,
)
from utils.linalg import APPROX


def _random_int_matrix(rng, shape, low=-2, high=3):
    return rng.integers(low, high, size=shape).astype(object)


def _random_gauge(rng, cpl):
    return GaugeTransform.from_values(_random_int_matrix(rng, (cpl.n_kernel, cpl.n_base)))


def _admissible_couple(rng, kind):
    """One admissible couple of the given construction kind, dims <= 3 + 4"""
    if kind == 0:
        choices = [
            (so3, adjoint_rep),
            (heisenberg, heisenberg_matrix_rep),
            (sl2, sl2_standard_rep),
            (aff1, aff1_rep),
        ]
        base_factory, rep_factory = choices[rng.integers(len(choices))]
        base = base_factory()
        rep = rep_factory(base)
        return semidirect(base, abelian(rep.dim), rep.matrices)
    if kind == 1:
        base = [abelian(2), aff1(), so3(), heisenberg(), sl2()][rng.integers(5)]
        m = int(rng.integers(1, 3))
        # exact part: omega(a, b) = -lambda([a, b])
        lam = _random_int_matrix(rng, (m, base.dim))
        omega = -np.tensordot(base.constants, lam, axes=(2, 1))
        if base.dim == 2 and max(abs(x) for x in base.constants.flat) == 0:
            extra = _random_int_matrix(rng, (m,))
            omega[0, 1] += extra
            omega[1, 0] -= extra
        return make_couple(base, abelian(m), None, omega)
    if kind == 2:
        base = [abelian(1), abelian(2), aff1(), so3(), heisenberg()][rng.integers(5)]
        kernel = [so3(), heisenberg(), aff1(), sl2(), direct_sum(aff1(), abelian(2))][rng.integers(5)]
        trivial = make_couple(base, kernel)
        return apply_gauge(trivial, _random_gauge(rng, trivial))
    # commuting flat D on an abelian base
    m = int(rng.integers(1, 4))
    generator = _random_int_matrix(rng, (m, m))
    scales = rng.integers(-2, 3, size=2)
    cpl = semidirect(abelian(2), abelian(m), [int(scales[0]) * generator, int(scales[1]) * generator])
    return apply_gauge(cpl, _random_gauge(rng, cpl))


def _perturbed(rng, cpl):
    """Break omega or D while keeping the Couple invariants"""
    omega = np.array(cpl.omega, dtype=object)
    d = np.array(cpl.D, dtype=object)
    if cpl.n_base >= 2 and rng.integers(2) == 0:
        i, j = 0, 1
        k = int(rng.integers(cpl.n_kernel))
        bump = Fraction(int(rng.integers(1, 3)))
        omega[i, j, k] += bump
        omega[j, i, k] -= bump
    else:
        kernel = cpl.kernel
        if max(abs(x) for x in kernel.constants.flat) == 0:
            d[0] = d[0] + _random_int_matrix(rng, d[0].shape, 1, 3)
        else:
            kappa = _random_int_matrix(rng, (kernel.dim,), 1, 3)
            d[0] = d[0] + ad(kernel, kappa)
    return make_couple(cpl.base, cpl.kernel, d, omega)


class TestCurvature:
    """Test Curv_D"""

    def test_commuting_representation(self):
        cpl = semidirect(abelian(2), abelian(2), [[[1, 0], [0, 2]], [[3, 0], [0, 1]]])
        assert all(x == 0 for x in curv_D(cpl).flat)

    def test_so3_kernel(self):
        cpl = so3_kernel_couple()
        curvature = curv_D(cpl)
        assert np.array_equal(curvature[0, 1], ad(so3(), [0, 0, 1]))
        assert np.array_equal(curvature[1, 0], -ad(so3(), [0, 0, 1]))

    def test_line_base(self):
        cpl = make_couple(abelian(1), so3(), [ad(so3(), [1, 0, 0])])
        assert all(x == 0 for x in curv_D(cpl).flat)


class TestCovariantDifferential:
    """Test the covariant differential"""

    def test_zero_action_abelian_base(self):
        cpl = make_couple(abelian(2), abelian(1))
        result = covariant_differential(cpl, [1, 2], p=1)
        assert all(x == 0 for x in result)

    def test_heisenberg_omega(self):
        cpl = heisenberg_couple()
        assert covariant_differential(cpl, [1], p=2).shape == (0,)

    def test_so3_base_trivial_kernel(self):
        cpl = make_couple(so3(), abelian(1))
        result = covariant_differential(cpl, [1, 0, 0], p=1)
        # (e1,e2), (e1,e3), (e2,e3)
        assert result[2] == -1
        assert result[0] == 0 and result[1] == 0

    def test_degree_overflow(self):
        with pytest.raises(ContractViolationError):
            covariant_differential(heisenberg_couple(), [1], p=3)

    def test_argument_shape(self):
        with pytest.raises(StructuralError):
            covariant_differential(heisenberg_couple(), [1, 2, 3], p=1)


class TestAdmissibility:
    """Test the two admissibility conditions"""

    def test_semidirect(self):
        assert is_admissible(so3_semidirect_couple()).ok

    def test_heisenberg(self):
        assert is_admissible(heisenberg_couple()).ok

    def test_so3_kernel_needs_omega(self):
        flat = is_admissible(so3_kernel_couple(with_omega=False))
        assert flat.closure_ok
        assert not flat.curvature_ok
        assert flat.curvature_residual == 1.0
        assert is_admissible(so3_kernel_couple()).ok

    def test_non_derivation_rejected_at_construction(self):
        with pytest.raises(ContractViolationError):
            make_couple(abelian(1), so3(), [np.eye(3, dtype=int)])

    def test_omega_must_be_antisymmetric(self):
        with pytest.raises(ContractViolationError):
            make_couple(abelian(2), abelian(1), None, [[[0], [1]], [[1], [0]]])


class TestBuildExtension:
    """Test the assembled total algebra"""

    def test_heisenberg(self):
        ext = build_extension(heisenberg_couple())
        c = ext.total.constants
        nonzero = {idx: value for idx, value in np.ndenumerate(c) if value != 0}
        assert nonzero == {(1, 2, 0): 1, (2, 1, 0): -1}
        assert check_jacobi(ext.total).ok
        assert cohomology_dims(ext.total) == [1, 2, 2, 1]

    def test_split_abelian(self):
        ext = build_extension(make_couple(abelian(2), abelian(1)))
        assert all(x == 0 for x in ext.total.constants.flat)

    def test_so3_kernel_is_lie(self):
        ext = build_extension(so3_kernel_couple())
        assert ext.total.dim == 5
        assert check_jacobi(ext.total).ok

    def test_so3_kernel_without_omega_fails_jacobi(self):
        assert not check_jacobi(build_extension(so3_kernel_couple(with_omega=False)).total).ok

    def test_kernel_block_restricts(self):
        ext = build_extension(so3_kernel_couple())
        assert np.array_equal(ext.total.constants[:3, :3, :3], so3().constants)

    def test_semidirect_dimension(self):
        ext = build_extension(so3_semidirect_couple())
        assert ext.total.dim == 6
        assert check_jacobi(ext.total).ok

    @pytest.mark.parametrize("factory", [heisenberg_couple, so3_kernel_couple, so3_semidirect_couple])
    def test_curvature_identity(self, factory):
        assert curvature_identity_residual(build_extension(factory())) == 0


class TestProjections:
    """Test project, inject and lift"""

    def test_project_lift(self):
        ext = build_extension(so3_kernel_couple())
        alpha = [Fraction(1, 2), -3]
        assert list(project(ext, lift(ext, alpha))) == alpha

    def test_project_inject(self):
        ext = build_extension(so3_kernel_couple())
        assert list(project(ext, inject(ext, [1, 2, 3]))) == [0, 0]

    def test_lift_index(self):
        ext = build_extension(heisenberg_couple())
        assert list(lift(ext, [1, 0])) == [0, 1, 0]

    def test_span(self):
        ext = build_extension(so3_kernel_couple())
        columns = [inject(ext, row) for row in np.eye(3, dtype=int)] + [lift(ext, row) for row in np.eye(2, dtype=int)]
        assert np.array_equal(np.stack(columns), np.eye(5, dtype=int))


class TestGauge:
    """Test gauge transformations"""

    def test_zero_gauge(self):
        cpl = so3_kernel_couple()
        gauged = apply_gauge(cpl, GaugeTransform.zero(cpl))
        assert np.array_equal(gauged.D, cpl.D)
        assert np.array_equal(gauged.omega, cpl.omega)

    def test_heisenberg_omega_unchanged(self):
        cpl = heisenberg_couple()
        gauged = apply_gauge(cpl, GaugeTransform.from_values([[3, -5]]))
        assert np.array_equal(gauged.omega, cpl.omega)
        assert all(x == 0 for x in gauged.D.flat)

    def test_so3_kernel_shift(self):
        cpl = so3_kernel_couple()
        gauge = GaugeTransform.from_values([[1, 0], [0, 0], [0, 0]])
        gauged = apply_gauge(cpl, gauge)
        assert is_admissible(gauged).ok
        assert shift_isomorphism_residual(cpl, gauge) == 0

    def test_random_pairs_preserve_admissibility(self):
        rng = np.random.default_rng(11)
        for trial in range(60):
            cpl = _admissible_couple(rng, trial % 4)
            gauge = _random_gauge(rng, cpl)
            assert is_admissible(apply_gauge(cpl, gauge)).ok
            assert shift_isomorphism_residual(cpl, gauge) == 0

    def test_group_action_on_abelian_kernel(self):
        rng = np.random.default_rng(5)
        cpl = semidirect(so3(), abelian(3), adjoint_rep(so3()).matrices)
        first, second = _random_gauge(rng, cpl), _random_gauge(rng, cpl)
        twice = apply_gauge(apply_gauge(cpl, first), second)
        once = apply_gauge(cpl, GaugeTransform(delta=first.delta + second.delta))
        assert np.array_equal(twice.D, once.D)
        assert np.array_equal(twice.omega, once.omega)

    def test_float_gauge(self):
        cpl = so3_kernel_couple()
        gauge = GaugeTransform.from_values([[0.5, 0.0], [0.0, 0.25], [0.0, 0.0]])
        gauged = apply_gauge(cpl, gauge)
        assert gauged.mode == APPROX
        assert is_admissible(gauged).ok
        assert shift_isomorphism_residual(cpl, gauge) < 1e-12


class TestEquivalence:
    """Test are_equivalent"""

    def test_self_with_zero_candidate(self):
        cpl = so3_kernel_couple()
        assert are_equivalent(cpl, cpl, GaugeTransform.zero(cpl)).status == EQUIVALENT

    def test_scaled_heisenberg_not_equivalent(self):
        first = heisenberg_couple()
        second = central(abelian(2), 1, [[0, 2], [-2, 0]])
        assert are_equivalent(first, second).status == NOT_EQUIVALENT

    def test_so3_central_equivalent_to_trivial(self):
        first = so3_central_couple()
        second = central(so3(), 1, np.zeros((3, 3), dtype=int))
        decision = are_equivalent(first, second)
        assert decision.status == EQUIVALENT
        assert are_equivalent(first, second, decision.gauge).status == EQUIVALENT

    def test_different_d_on_abelian_kernel(self):
        first = so3_semidirect_couple()
        second = make_couple(so3(), abelian(3))
        assert are_equivalent(first, second).status == NOT_EQUIVALENT

    def test_non_abelian_kernel_undecided(self):
        cpl = so3_kernel_couple()
        other = apply_gauge(cpl, GaugeTransform.from_values([[1, 0], [0, 0], [0, 0]]))
        assert are_equivalent(cpl, other).status == UNDECIDED
        candidate = GaugeTransform.from_values([[1, 0], [0, 0], [0, 0]])
        assert are_equivalent(cpl, other, candidate).status == EQUIVALENT

    def test_mismatched_algebras(self):
        with pytest.raises(ContractViolationError):
            are_equivalent(heisenberg_couple(), so3_central_couple())


class TestSpecialCouples:
    """Test semidirect and central constructors"""

    def test_semidirect_so3(self):
        cpl = so3_semidirect_couple()
        assert is_admissible(cpl).ok

    def test_semidirect_rejects_curved_d(self):
        with pytest.raises(ContractViolationError):
            semidirect(abelian(2), so3(), [ad(so3(), [1, 0, 0]), ad(so3(), [0, 1, 0])])

    def test_central_heisenberg(self):
        cpl = heisenberg_couple()
        assert cpl.kernel.basis_names == ("z",)
        assert list(cpl.omega[0, 1]) == [1]

    def test_central_rejects_open_form_on_aff1_plus_line(self):
        """omega = y* ^ w* has d omega = -x* ^ y* ^ w*"""
        base = direct_sum(aff1(), abelian(1))
        omega = np.zeros((3, 3), dtype=int)
        omega[1, 2], omega[2, 1] = 1, -1
        with pytest.raises(ContractViolationError):
            central(base, 1, omega)

    def test_central_rejects_open_form_on_sl2_plus_line(self):
        """omega = h* ^ w* has d omega = -e* ^ f* ^ w*"""
        base = direct_sum(sl2(), abelian(1))
        omega = np.zeros((4, 4), dtype=int)
        omega[0, 3], omega[3, 0] = 1, -1
        with pytest.raises(ContractViolationError):
            central(base, 1, omega)

    def test_central_on_so3_always_closed(self):
        rng = np.random.default_rng(3)
        raw = _random_int_matrix(rng, (3, 3))
        omega = raw - raw.T
        assert is_admissible(central(so3(), 1, omega)).ok


class TestJacobiAdmissibilityEquivalence:
    """Jacobi of the built algebra holds exactly when the couple is admissible"""

    def test_random_couples(self):
        rng = np.random.default_rng(2024)
        outcomes = {True: 0, False: 0}
        for trial in range(200):
            cpl = _admissible_couple(rng, trial % 4)
            if trial % 2:
                cpl = _perturbed(rng, cpl)
            else:
                assert is_admissible(cpl).ok
            admissible = is_admissible(cpl).ok
            assert check_jacobi(build_extension(cpl).total).ok == admissible
            outcomes[admissible] += 1
        assert outcomes[True] >= 100
        assert outcomes[False] >= 25
