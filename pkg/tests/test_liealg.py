# tests/test_liealg.py
from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import expm

from config_services import reset_config
from exceptions import ContractViolationError, StructuralError
from services.liealg import (
    ad,
    bracket,
    bracket_preservation_residual,
    ce_differential,
    center,
    check_jacobi,
    check_representation,
    cohomology_dims,
    derivation_flow,
    euler_characteristic,
    from_brackets,
    is_derivation,
    make_rep,
)
from services.liealg.catalog import (
    abelian,
    abelian_unipotent_rep,
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


class TestCheckJacobi:
    """Test antisymmetry and Jacobi validation"""

    def test_abelian_ok(self):
        assert check_jacobi(abelian(2)).ok

    @pytest.mark.parametrize("factory", [so3, sl2, heisenberg, aff1])
    def test_standard_algebras_ok(self, factory):
        report = check_jacobi(factory())
        assert report.ok
        assert report.max_residual == 0.0

    def test_raw_constant_changed_reports_triple(self):
        """Editing c[1][2][3] alone breaks antisymmetry at (1,2,3)"""
        c = np.array(so3().constants, dtype=object)
        c[0, 1, 2] = Fraction(2)
        report = check_jacobi(c)
        assert not report.ok
        triples = [t for t, _ in report.antisymmetry_violations]
        assert (1, 2, 3) in triples

    def test_genuine_jacobi_failure(self):
        """[e1,e2]=e3 and [e1,e3]=e1 is antisymmetric but not Lie"""
        algebra = from_brackets(["e1", "e2", "e3"], [(0, 1, 2, 1), (0, 2, 0, 1)])
        report = check_jacobi(algebra)
        assert not report.ok
        assert report.antisymmetry_violations == []
        assert [t for t, _ in report.jacobi_violations] == [(1, 2, 3)]

    def test_shape_mismatch(self):
        with pytest.raises(StructuralError):
            check_jacobi(np.zeros((2, 2, 3)))

    def test_approx_mode_uses_tolerance(self):
        c = so3().float_constants.copy()
        c[0, 1, 2] += 1e-13
        c[1, 0, 2] -= 1e-13
        assert check_jacobi(c, tol=1e-9).ok


class TestBracket:
    """Test the bracket and the adjoint map"""

    def test_so3_basis(self):
        assert list(bracket(so3(), [1, 0, 0], [0, 1, 0])) == [0, 0, 1]

    def test_self_bracket_vanishes(self):
        x = [Fraction(1, 2), 3, -2]
        assert list(bracket(sl2(), x, x)) == [0, 0, 0]

    def test_abelian(self):
        assert list(bracket(abelian(2), [1, 0], [0, 1])) == [0, 0]

    def test_float_operands(self):
        result = bracket(so3(), np.array([1.0, 0.0, 0.0]), np.array([0.0, 2.0, 0.0]))
        assert result.dtype == float
        np.testing.assert_allclose(result, [0.0, 0.0, 2.0])

    def test_length_mismatch(self):
        with pytest.raises(StructuralError):
            bracket(so3(), [1, 0], [0, 1, 0])

    def test_ad_e3_is_rotation_generator(self):
        expected = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]])
        assert np.array_equal(ad(so3(), [0, 0, 1]), expected)

    def test_ad_abelian_zero(self):
        assert np.array_equal(ad(abelian(2), [3, 4]), np.zeros((2, 2)))

    def test_ad_is_homomorphism(self):
        algebra = sl2()
        x, y = [1, 2, 0], [0, Fraction(1, 3), 5]
        left = ad(algebra, bracket(algebra, x, y))
        ax, ay = ad(algebra, x), ad(algebra, y)
        assert np.array_equal(left, ax.dot(ay) - ay.dot(ax))


class TestDerivations:
    """Test the Leibniz check"""

    def test_zero_matrix(self):
        assert is_derivation(so3(), np.zeros((3, 3), dtype=int))

    def test_inner_derivation(self):
        algebra = so3()
        assert is_derivation(algebra, ad(algebra, [0, 0, 1]))

    def test_identity_is_not_derivation(self):
        assert not is_derivation(so3(), np.eye(3, dtype=int))

    def test_outer_derivation_of_heisenberg(self):
        """x -> x, z -> z is a derivation of h3 that is not inner"""
        matrix = np.diag([1, 0, 1])
        assert is_derivation(heisenberg(), matrix)

    def test_shape_mismatch(self):
        with pytest.raises(StructuralError):
            is_derivation(so3(), np.zeros((2, 2), dtype=int))


class TestCenter:
    """Test the center computation"""

    def test_abelian(self):
        assert center(abelian(2)).shape == (2, 2)

    def test_so3(self):
        assert center(so3()).shape[1] == 0

    def test_heisenberg(self):
        basis = center(heisenberg())
        assert basis.shape == (3, 1)
        assert basis[0, 0] == 0 and basis[1, 0] == 0 and basis[2, 0] != 0

    def test_direct_sum_adds_center(self):
        assert center(direct_sum(so3(), abelian(1))).shape[1] == 1


class TestCeDifferential:
    """Test the Chevalley-Eilenberg differential"""

    def test_abelian_vanishes(self):
        for k in range(3):
            d = ce_differential(abelian(2), degree=k)
            assert all(x == 0 for x in d.flat)

    def test_so3_degree_one(self):
        """(d e^1)(e2, e3) = -e^1([e2, e3]) = -1"""
        d = ce_differential(so3(), degree=1)
        # rows: (e1,e2), (e1,e3), (e2,e3); columns: e1, e2, e3
        assert d[2, 0] == -1
        assert d[0, 2] == -1
        assert d[1, 1] == 1

    def test_top_degree_maps_to_zero_space(self):
        d = ce_differential(so3(), degree=3)
        assert d.shape == (0, 1)

    @pytest.mark.parametrize("factory", [so3, sl2, heisenberg, aff1])
    def test_square_zero(self, factory):
        algebra = factory()
        for k in range(algebra.dim - 1):
            first = ce_differential(algebra, degree=k)
            second = ce_differential(algebra, degree=k + 1)
            assert all(x == 0 for x in second.dot(first).flat)

    def test_square_zero_with_coefficients(self):
        algebra = so3()
        rep = adjoint_rep(algebra)
        for k in range(2):
            product = ce_differential(algebra, rep, k + 1).dot(ce_differential(algebra, rep, k))
            assert all(x == 0 for x in product.flat)

    def test_degree_overflow(self):
        with pytest.raises(ContractViolationError):
            ce_differential(so3(), degree=4)

    def test_non_representation_rejected(self):
        algebra = so3()
        rep = make_rep(algebra, [np.eye(2, dtype=int)] * 3)
        with pytest.raises(ContractViolationError):
            ce_differential(algebra, rep, 1)


class TestCohomology:
    """Test Betti numbers"""

    def test_abelian(self):
        assert cohomology_dims(abelian(2)) == [1, 2, 1]

    def test_so3(self):
        assert cohomology_dims(so3()) == [1, 0, 0, 1]

    def test_heisenberg(self):
        assert cohomology_dims(heisenberg()) == [1, 2, 2, 1]

    def test_so3_adjoint_coefficients_vanish(self):
        algebra = so3()
        assert cohomology_dims(algebra, adjoint_rep(algebra)) == [0, 0, 0, 0]

    @pytest.mark.parametrize("factory", [so3, sl2, heisenberg, aff1])
    def test_euler_characteristic(self, factory):
        assert euler_characteristic(cohomology_dims(factory())) == 0

    def test_approx_mode_matches_exact(self):
        algebra = heisenberg()
        approx = from_brackets(list(algebra.basis_names), [(0, 1, 2, 1.0)])
        assert cohomology_dims(approx) == cohomology_dims(algebra)


class TestRepresentations:
    """Test the catalog representations"""

    @pytest.mark.parametrize("factory,rep_factory", [
        (so3, adjoint_rep),
        (heisenberg, heisenberg_matrix_rep),
        (sl2, sl2_standard_rep),
        (aff1, aff1_rep),
        (lambda: abelian(2), abelian_unipotent_rep),
    ])
    def test_is_representation_and_faithful(self, factory, rep_factory):
        rep = rep_factory(factory())
        assert check_representation(rep).ok
        assert rep.is_faithful()

    def test_adjoint_of_heisenberg_not_faithful(self):
        assert not adjoint_rep(heisenberg()).is_faithful()

    def test_inverse_action(self):
        rep = sl2_standard_rep(sl2())
        x = np.array([0.5, -1.0, 2.0])
        np.testing.assert_allclose(rep.inverse_action(rep.action(x)), x, atol=1e-12)


class TestDerivationFlow:
    """Test flows of time-dependent derivations"""

    def test_zero_derivation(self):
        psi = derivation_flow(so3(), np.zeros((3, 3)), 0.0, 1.0, steps=16)
        np.testing.assert_allclose(psi, np.eye(3), atol=1e-15)

    def test_rotation(self):
        algebra = so3()
        generator = ad(algebra, [0, 0, 1])
        theta = 0.7
        psi = derivation_flow(algebra, generator, 0.0, theta, steps=512)
        np.testing.assert_allclose(psi, expm(theta * np.array(generator, dtype=float)), atol=1e-9)
        assert bracket_preservation_residual(algebra, psi) < 1e-9

    def test_reversibility(self):
        algebra = sl2()
        generator = np.array(ad(algebra, [1, 1, 0]), dtype=float)
        forward = derivation_flow(algebra, generator, 0.0, 1.0, steps=512)
        backward = derivation_flow(algebra, generator, 1.0, 0.0, steps=512)
        np.testing.assert_allclose(backward @ forward, np.eye(3), atol=1e-8)

    def test_time_dependent_samples(self):
        algebra = so3()
        times = np.linspace(0.0, 1.0, 33)
        samples = np.stack([np.array(ad(algebra, [np.sin(t), t, 1.0]), dtype=float) for t in times])
        psi = derivation_flow(algebra, samples, 0.0, 1.0, steps=256)
        assert bracket_preservation_residual(algebra, psi) < 1e-8

    def test_non_derivation_rejected(self):
        with pytest.raises(ContractViolationError):
            derivation_flow(so3(), np.eye(3), 0.0, 1.0, steps=8)

    @pytest.mark.parametrize("steps", [0, -3])
    def test_step_count_must_be_positive(self, steps):
        with pytest.raises(ContractViolationError):
            derivation_flow(so3(), np.zeros((3, 3)), 0.0, 1.0, steps=steps)

    def test_default_step_count(self, monkeypatch):
        monkeypatch.setenv("DEFAULT_STEPS", "8")
        reset_config()
        try:
            psi = derivation_flow(so3(), np.zeros((3, 3)))
        finally:
            reset_config()
        np.testing.assert_allclose(psi, np.eye(3), atol=1e-15)
