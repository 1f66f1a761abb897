# tests/test_paths.py
import numpy as np
import pytest
from scipy.linalg import expm, expm_frechet

from exceptions import ContractViolationError, StructuralError
from services.liealg.catalog import (
    abelian,
    abelian_unipotent_rep,
    adjoint_rep,
    heisenberg,
    heisenberg_matrix_rep,
    sl2,
    so3,
)
from services.paths import (
    APath,
    ASphere,
    HomotopyGrid,
    IntegralEvolutionSolver,
    SinePotential,
    SphereFamily,
    SteppingEvolutionSolver,
    concatenate,
    concatenate_homotopies,
    flatten,
    flatten_rate,
    homotopy_from_potential,
    is_homotopy,
    morphism_residual,
    path_integral,
    reparametrization_homotopy,
    reverse,
    solve_evolution,
    sphere_family_from_potential,
    sphere_from_potential,
    sphere_theta,
    verify_hgeom,
)
from utils.integrators import uniform_times

SOLVERS = [SteppingEvolutionSolver(), IntegralEvolutionSolver()]


def _grid(N, M):
    return np.meshgrid(uniform_times(N + 1), uniform_times(M + 1), indexing='ij')


def _quadratic_path(algebra, N):
    return APath.from_function(algebra, lambda t: [0.8, 0.5 * t - 0.2, t * t - 0.3], N)


def _first_half(t):
    return flatten(np.minimum(2.0 * t, 1.0))


def _first_half_rate(t):
    return np.where(t <= 0.5, 2.0 * flatten_rate(np.minimum(2.0 * t, 1.0)), 0.0)


class TestModels:
    """Test path, grid and sphere containers"""

    def test_path_shape_checked(self):
        with pytest.raises(StructuralError):
            APath(so3(), np.zeros((5, 2)))

    def test_path_needs_two_samples(self):
        with pytest.raises(StructuralError):
            APath(so3(), np.zeros((1, 3)))

    def test_path_interpolates_nodes(self):
        path = _quadratic_path(so3(), 8)
        assert np.allclose(path(0.5), [0.8, 0.05, -0.05])
        assert np.allclose(path(0.3), [0.8, -0.05, -0.21])

    def test_grid_b_shape_checked(self):
        with pytest.raises(StructuralError):
            HomotopyGrid(so3(), np.zeros((5, 4, 3)), np.zeros((5, 5, 3)))

    def test_transverse_needs_b(self):
        grid = HomotopyGrid(so3(), np.zeros((5, 4, 3)))
        with pytest.raises(ContractViolationError):
            grid.transverse(0)

    def test_constant_grid_is_a_morphism(self):
        grid = HomotopyGrid.constant(_quadratic_path(so3(), 8), 6)
        assert grid.M == 6
        assert morphism_residual(grid) == 0.0
        assert grid.check_morphism() is grid

    def test_inconsistent_b_detected_on_check(self):
        t, eps = _grid(16, 4)
        a = np.zeros((17, 5, 3))
        b = np.stack([t * (1 - t), 0 * t, 0 * t], axis=-1)
        grid = HomotopyGrid(so3(), a, b)
        assert morphism_residual(grid) > 0.5
        with pytest.raises(ContractViolationError):
            grid.check_morphism()
        assert grid.check_morphism(tol=1.5) is grid

    def test_sphere_boundary_enforced(self):
        a = np.zeros((5, 5, 3))
        b = np.zeros((5, 5, 3))
        b[0, 2, 0] = 1.0
        with pytest.raises(ContractViolationError):
            ASphere(HomotopyGrid(so3(), a, b))

    def test_sphere_boundary_snapped_to_zero(self):
        a = np.zeros((5, 5, 3))
        b = np.zeros((5, 5, 3))
        a[2, 0, 1] = 1e-12
        sphere = ASphere(HomotopyGrid(so3(), a, b))
        assert sphere.a[2, 0, 1] == 0.0

    def test_sphere_family_shape(self):
        family = SphereFamily(abelian(2), np.zeros((5, 6, 3, 2)))
        assert family.shape == (5, 6, 3)
        with pytest.raises(ContractViolationError):
            family.sphere(0)


class TestEvolution:
    """Test both solvers of d_eps a - d_t b = [a, b]"""

    @pytest.mark.parametrize("solver", SOLVERS)
    def test_zero_input(self, solver):
        beta = solve_evolution(HomotopyGrid(so3(), np.zeros((9, 5, 3))), solver=solver)
        assert beta.shape == (9, 5, 3)
        assert not beta.any()

    @pytest.mark.parametrize("solver", SOLVERS)
    def test_abelian_closed_form(self, solver):
        t, eps = _grid(8, 8)
        alpha = np.stack([eps ** 2 * t, eps ** 2 * t * t], axis=-1)
        beta0 = np.stack([uniform_times(9), np.zeros(9)], axis=-1)
        beta = solve_evolution(HomotopyGrid(abelian(2), alpha), beta0, solver)
        expected = np.stack([eps + eps * t * t, 2.0 * eps * t ** 3 / 3.0], axis=-1)
        assert np.allclose(beta, expected, atol=1e-12)

    @pytest.mark.parametrize("solver", SOLVERS)
    def test_batch_axes_match_separate_solves(self, solver):
        rng = np.random.default_rng(2)
        alpha = 0.3 * rng.normal(size=(9, 5, 3, 3))
        beta0 = 0.1 * rng.normal(size=(5, 3, 3))
        batched = solver.solve(so3(), alpha, beta0)
        assert batched.shape == alpha.shape
        for k in range(3):
            single = solver.solve(so3(), alpha[:, :, k], beta0[:, k])
            np.testing.assert_allclose(batched[:, :, k], single, atol=1e-13)

    def test_shape_errors(self):
        solver = SteppingEvolutionSolver()
        with pytest.raises(StructuralError):
            solver.solve(so3(), np.zeros((9, 5, 2)), np.zeros((5, 2)))
        with pytest.raises(StructuralError):
            solver.solve(so3(), np.zeros((9, 5, 3)), np.zeros((4, 3)))

    def test_recovers_exact_b(self):
        rng = np.random.default_rng(3)
        rep = adjoint_rep(so3())
        potential = SinePotential.random(3, rng, scale=0.2, max_frequency=1, drift=True, bend=True)
        grid = homotopy_from_potential(rep, potential, 128, 128)
        for solver in SOLVERS:
            beta = solve_evolution(HomotopyGrid(grid.algebra, grid.a), solver=solver)
            assert np.max(np.abs(beta - grid.b)) < 1e-4

    def test_solvers_agree(self):
        rep = adjoint_rep(so3())
        potential = SinePotential(modes=[(1, 1, [1.0, 0.0, 0.5]), (1, 2, [0.0, 1.0, -0.5])], scale=0.1)
        grid = HomotopyGrid(so3(), homotopy_from_potential(rep, potential, 256, 256).a)
        stepping = solve_evolution(grid, solver=SteppingEvolutionSolver())
        integral = solve_evolution(grid, solver=IntegralEvolutionSolver())
        assert np.max(np.abs(stepping - integral)) <= 1e-8

    def test_solvers_agree_on_linear_family(self):
        """alpha = eps t e1 gives beta = t^2 / 2 e1"""
        t, eps = _grid(256, 256)
        alpha = np.stack([eps * t, 0 * t, 0 * t], axis=-1)
        grid = HomotopyGrid(so3(), alpha)
        stepping = solve_evolution(grid, solver=SteppingEvolutionSolver())
        integral = solve_evolution(grid, solver=IntegralEvolutionSolver())
        assert np.max(np.abs(stepping - integral)) <= 1e-8
        expected = np.stack([t * t / 2, 0 * t, 0 * t], axis=-1)
        np.testing.assert_allclose(stepping, expected, atol=1e-12)

    def test_fourth_order_in_t(self):
        rng = np.random.default_rng(5)
        rep = adjoint_rep(so3())
        potential = SinePotential.random(3, rng, scale=0.3, max_frequency=1, drift=True, bend=True)
        solver = SteppingEvolutionSolver()

        def terminal(N):
            grid = HomotopyGrid(so3(), homotopy_from_potential(rep, potential, N, 8).a)
            return solve_evolution(grid, solver=solver)[-1]

        reference = terminal(512)
        coarse = np.max(np.abs(terminal(32) - reference))
        fine = np.max(np.abs(terminal(64) - reference))
        assert coarse / fine >= 12


class TestIsHomotopy:
    """Test detection of A-homotopies"""

    def test_constant_family(self):
        report = is_homotopy(HomotopyGrid.constant(_quadratic_path(so3(), 16), 8))
        assert report.ok
        assert report.residual == 0.0

    def test_reparametrization_family(self):
        grid = reparametrization_homotopy(_quadratic_path(so3(), 256), M=16)
        assert morphism_residual(grid) < 1e-5
        report = is_homotopy(grid, tol=1e-5)
        assert report.ok, report.residual

    def test_abelian_shrinking_family_fails(self):
        t, eps = _grid(16, 8)
        alpha = np.stack([(1 - eps) * 1.0, (1 - eps) * 2.0 * t], axis=-1)
        report = is_homotopy(HomotopyGrid(abelian(2), alpha))
        assert not report.ok
        assert report.residual == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(report.terminal, -1.0, atol=1e-12)

    def test_potential_homotopy(self):
        rng = np.random.default_rng(2)
        potential = SinePotential.random(3, rng, scale=0.2, max_frequency=1, drift=True, bend=True)
        grid = homotopy_from_potential(adjoint_rep(so3()), potential, 128, 128)
        assert is_homotopy(grid, tol=1e-4).ok

    def test_pushed_family_fails(self):
        rng = np.random.default_rng(2)
        potential = SinePotential.random(3, rng, scale=0.2, max_frequency=1, drift=True)
        grid = homotopy_from_potential(adjoint_rep(so3()), potential, 64, 64)
        _, eps = _grid(64, 64)
        pushed = HomotopyGrid(grid.algebra, grid.a + 0.1 * eps[..., None] * np.array([1.0, 0.0, 0.0]))
        report = is_homotopy(pushed, tol=1e-4)
        assert not report.ok
        assert report.residual > 1e-2

    def test_report_to_dict(self):
        payload = is_homotopy(HomotopyGrid.constant(_quadratic_path(so3(), 8), 4)).to_dict()
        assert set(payload) == {"ok", "residual", "tolerance"}


class TestOperations:
    """Test concatenation, reversal and reparametrization"""

    def test_reverse_twice_is_identity(self):
        path = _quadratic_path(so3(), 16)
        assert np.array_equal(reverse(reverse(path)).samples, path.samples)

    def test_reverse_values(self):
        path = _quadratic_path(so3(), 16)
        assert np.array_equal(reverse(path).samples[0], -path.samples[-1])

    def test_concatenation_grid(self):
        algebra = so3()
        glued = concatenate(_quadratic_path(algebra, 8), _quadratic_path(algebra, 16))
        assert glued.N == 32
        for index in (0, 16, 32):
            assert np.allclose(glued.samples[index], 0.0, atol=1e-14)

    def test_concatenation_rejects_other_algebra(self):
        with pytest.raises(ContractViolationError):
            concatenate(APath.zero(so3(), 4), APath.zero(heisenberg(), 4))

    def test_abelian_integrals_add(self):
        algebra = abelian(2)
        first = APath.from_function(algebra, lambda t: [np.cos(t), t * t], 128)
        second = APath.from_function(algebra, lambda t: [1.0, np.sin(np.pi * t)], 128)
        total = path_integral(concatenate(first, second))
        assert np.allclose(total, path_integral(first) + path_integral(second), atol=1e-6)

    def test_reparametrization_endpoints(self):
        path = _quadratic_path(so3(), 32)
        grid = reparametrization_homotopy(path, M=8)
        assert np.array_equal(grid.a[:, 0], path.samples)
        assert np.allclose(grid.b[0], 0.0, atol=1e-15)
        assert np.allclose(grid.b[-1], 0.0, atol=1e-15)

    def test_concatenation_with_zero_is_homotopic(self):
        path = _quadratic_path(so3(), 256)
        glued = concatenate(path, APath.zero(so3(), 64))
        grid = reparametrization_homotopy(path, M=16, reparametrization=(_first_half, _first_half_rate))
        assert np.allclose(grid.a[:, -1], glued.samples[::2], atol=1e-12)
        assert is_homotopy(grid, tol=1e-5).ok


class TestConcatenateHomotopies:
    """Test gluing homotopies along eps"""

    @staticmethod
    def _abelian_pair():
        algebra = abelian(2)
        t, eps = _grid(64, 8)
        wave = np.sin(2 * np.pi * t)
        bump = (1 - np.cos(2 * np.pi * t)) / (2 * np.pi)
        first = HomotopyGrid(algebra, np.stack([1 + eps * wave, 2 * t], axis=-1),
                             np.stack([bump, 0 * t], axis=-1))
        second = HomotopyGrid(algebra, np.stack([1 + wave, 2 * t + eps * wave], axis=-1),
                              np.stack([0 * t, bump], axis=-1))
        return first, second

    def test_endpoints_and_integrals(self):
        first, second = self._abelian_pair()
        glued = concatenate_homotopies(first, second)
        assert glued.M == 16
        assert np.allclose(glued.a[:, 0], first.a[:, 0], atol=1e-14)
        assert np.allclose(glued.a[:, -1], second.a[:, -1], atol=1e-14)
        for j in range(glued.M + 1):
            assert np.allclose(path_integral(glued.path(j)), [1.0, 1.0], atol=1e-12)

    def test_transverse_component_rescaled(self):
        first, second = self._abelian_pair()
        glued = concatenate_homotopies(first, second)
        # eps = 1/4 maps to the middle of the first homotopy, where the flattening rate is 2
        assert np.allclose(glued.b[:, 4], 4.0 * first.b[:, 0], atol=1e-12)

    def test_not_composable(self):
        first, second = self._abelian_pair()
        with pytest.raises(ContractViolationError):
            concatenate_homotopies(second, first)

    def test_t_grids_must_match(self):
        first, _ = self._abelian_pair()
        other = HomotopyGrid(first.algebra, np.zeros((33, 9, 2)))
        with pytest.raises(ContractViolationError):
            concatenate_homotopies(first, other)


class TestGenerators:
    """Test homotopies and spheres built from potentials"""

    def test_log_derivative_matches_frechet(self):
        rng = np.random.default_rng(4)
        rep = adjoint_rep(so3())
        potential = SinePotential.random(3, rng, drift=True, bend=True)
        grid = homotopy_from_potential(rep, potential, 8, 8)
        t, eps = 3 / 8, 5 / 8
        X, X_t, _, _ = potential.values(t, eps)
        g, dg = expm_frechet(rep.action(X), rep.action(X_t))
        expected = rep.inverse_action(-dg @ np.linalg.inv(g))
        assert np.allclose(grid.a[3, 5], expected, atol=1e-10)

    def test_sphere_boundary(self):
        rng = np.random.default_rng(6)
        sphere = sphere_from_potential(adjoint_rep(so3()), SinePotential.random(3, rng), 16, 16)
        assert not sphere.a[:, 0].any() and not sphere.a[:, -1].any()
        assert not sphere.b[0].any() and not sphere.b[-1].any()

    def test_drift_is_not_a_sphere(self):
        rng = np.random.default_rng(6)
        with pytest.raises(ContractViolationError):
            sphere_from_potential(adjoint_rep(so3()), SinePotential.random(3, rng, drift=True), 8, 8)

    def test_non_faithful_rep_rejected(self):
        rng = np.random.default_rng(6)
        with pytest.raises(ContractViolationError):
            homotopy_from_potential(adjoint_rep(heisenberg()), SinePotential.random(3, rng), 8, 8)

    def test_edge_paths(self):
        drift = np.array([0.3, -0.2, 0.1])
        potential = SinePotential(modes=[(1, 1, np.array([1.0, 0.0, 0.0]))], scale=0.4, drift=drift)
        grid = homotopy_from_potential(adjoint_rep(so3()), potential, 8, 8)
        assert np.allclose(grid.a[:, 0], -drift, atol=1e-12)
        assert np.allclose(grid.a[:, -1], -drift, atol=1e-12)


class TestHgeom:
    """Test commutation of flows around the square"""

    def test_constant_family(self):
        path = APath.from_function(sl2(), lambda t: [t, 0.5, -0.2 * t], 16)
        report = verify_hgeom(HomotopyGrid.constant(path, 4), adjoint_rep(sl2()), steps=64)
        assert report.residual == 0.0
        assert report.ok

    def test_non_faithful_rep(self):
        grid = HomotopyGrid.constant(APath.zero(heisenberg(), 4), 4)
        with pytest.raises(ContractViolationError):
            verify_hgeom(grid, adjoint_rep(heisenberg()))

    def test_needs_b(self):
        with pytest.raises(ContractViolationError):
            verify_hgeom(HomotopyGrid(sl2(), np.zeros((5, 5, 3))), adjoint_rep(sl2()))

    def test_abelian_morphism(self):
        algebra = abelian(2)
        t, eps = _grid(64, 64)
        a = np.stack([eps ** 3 / 3 + 1.0, eps * np.pi * np.cos(np.pi * t) + t], axis=-1)
        b = np.stack([t * eps ** 2, np.sin(np.pi * t)], axis=-1)
        report = verify_hgeom(HomotopyGrid(algebra, a, b), abelian_unipotent_rep(algebra))
        assert report.residual < 1e-6

    def test_sl2_potential(self):
        rng = np.random.default_rng(9)
        rep = adjoint_rep(sl2())
        potential = SinePotential.random(3, rng, scale=0.3, max_frequency=1, drift=True, bend=True)
        grid = homotopy_from_potential(rep, potential, 64, 64)
        report = verify_hgeom(grid, rep)
        assert report.residual < 1e-5
        assert report.morphism_residual < 1e-3

    def test_sl2_with_solved_beta(self):
        rng = np.random.default_rng(9)
        rep = adjoint_rep(sl2())
        potential = SinePotential.random(3, rng, scale=0.3, max_frequency=1, drift=True, bend=True)
        grid = homotopy_from_potential(rep, potential, 64, 128)
        beta = solve_evolution(HomotopyGrid(grid.algebra, grid.a))
        report = verify_hgeom(HomotopyGrid(grid.algebra, grid.a, beta), rep)
        assert report.residual < 1e-4


class TestSphereTheta:
    """Test the du-component of sphere families"""

    def test_zero_family(self):
        report = sphere_theta(SphereFamily(abelian(2), np.zeros((5, 5, 5, 2))))
        assert not report.theta.any()
        assert report.pde_residual == 0.0
        assert report.ok

    def test_abelian_closed_form(self):
        N = 8
        t, eps, u = np.meshgrid(*(uniform_times(N + 1),) * 3, indexing='ij')
        b = (t * (1 - t) * u * eps ** 2)[..., None]
        report = sphere_theta(SphereFamily(abelian(1), b))
        expected = (t * (1 - t) * eps ** 3 / 3)[..., None]
        assert np.allclose(report.theta, expected, atol=1e-12)
        assert np.allclose(report.alpha, ((1 - 2 * t) * u * eps ** 3 / 3)[..., None], atol=1e-12)
        assert report.boundary_residual == 0.0
        assert report.pde_residual < 1e-12

    @pytest.mark.parametrize("seed", range(10))
    @pytest.mark.parametrize("algebra_factory,rep_factory", [(so3, adjoint_rep), (heisenberg, heisenberg_matrix_rep)])
    def test_potential_families(self, algebra_factory, rep_factory, seed):
        rng = np.random.default_rng(seed)
        rep = rep_factory(algebra_factory())
        potential = SinePotential.random(3, rng, scale=0.08, max_frequency=1, weight=0.2)
        family = sphere_family_from_potential(rep, potential, 256, 256, 4)
        report = sphere_theta(family)
        assert report.boundary_residual <= 1e-7
        assert report.pde_residual <= 1e-4 * (1.0 / 256) ** 2
        assert report.ok
        assert np.max(np.abs(report.theta - family.c)) < 1e-8
        assert report.terminal_residual < 1e-8

    def test_report_to_dict(self):
        payload = sphere_theta(SphereFamily(abelian(1), np.zeros((5, 5, 5, 1)))).to_dict()
        assert payload["boundary_residual"] == 0.0
        assert "pde_tolerance" in payload
