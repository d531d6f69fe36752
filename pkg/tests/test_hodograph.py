import math

import numpy as np
import pytest

from eulerhodo.expr import Box, VectorFunction
from eulerhodo.hodograph import (
    HodographSystem,
    NoConvergence,
    SingularNearBlowup,
    build_M,
    charpoly,
    pde_residual,
    real_branches,
    solve_u,
)
from eulerhodo.problems import builtin_problem

SQRT2 = math.sqrt(2.0)


def linear_system(A, box=None):
    n = A.shape[0]
    names = [f"u{i + 1}" for i in range(n)]
    comps = []
    for row in A:
        comps.append(" + ".join(f"({float(a)!r})*{x}" for a, x in zip(row, names)))
    return HodographSystem(
        f=VectorFunction.parse(comps, names),
        domain=box or Box(lower=(-3.0,) * n, upper=(3.0,) * n),
    )


def det3_by_cofactors(A, t):
    """Hand cofactor expansion of det(A + t I) for 3x3 (independent oracle)."""
    a = A + t * np.eye(3)
    return (
        a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
        - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
        + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
    )


class TestBuildM:
    def test_coupled_atanh_data_at_catastrophe_time(self):
        sys_ = builtin_problem("ex61").system
        M = build_M(sys_, (0.0, 0.0), 1.0 + SQRT2)
        assert np.allclose(M, [[SQRT2, 2.0], [1.0, SQRT2]], atol=1e-12)

    def test_t_zero_is_jacobian(self):
        sys_ = builtin_problem("ex61").system
        u = (0.3, -0.4)
        assert np.array_equal(build_M(sys_, u, 0.0), sys_.f.jacobian(u))

    def test_linear_map(self, rng):
        A = rng.normal(size=(3, 3))
        sys_ = linear_system(A)
        for _ in range(5):
            u = rng.uniform(-1, 1, size=3)
            t = float(rng.normal())
            assert np.allclose(build_M(sys_, u, t), A + t * np.eye(3), atol=1e-12)

    def test_time_derivative_is_identity(self, rng):
        # M(u, t + d) - M(u, t) = d I, exactly up to rounding of t + d.
        sys_ = builtin_problem("ex61").system
        u = rng.uniform(-0.5, 0.5, size=2)
        t, d = 0.25, 0.5  # exactly representable
        diff = build_M(sys_, u, t + d) - build_M(sys_, u, t)
        assert np.array_equal(diff, d * np.eye(2))


class TestCharpoly:
    def test_coupled_atanh_data_at_origin(self):
        poly = charpoly(builtin_problem("ex61").system, (0.0, 0.0))
        assert poly.coeffs == pytest.approx((-1.0, -2.0), abs=1e-12)

    def test_zero_map(self):
        sys_ = HodographSystem(
            f=VectorFunction.parse(["0", "0"], ["u", "v"]),
            domain=Box(lower=(-1.0, -1.0), upper=(1.0, 1.0)),
        )
        poly = charpoly(sys_, (0.2, 0.2))
        assert poly.coeffs == (0.0, 0.0)
        assert poly(3.0) == 9.0

    def test_matches_cofactor_expansion_for_linear_3d(self, rng):
        for _ in range(50):
            A = rng.normal(size=(3, 3))
            poly = charpoly(linear_system(A), rng.uniform(-1, 1, size=3))
            for t in rng.normal(size=4):
                oracle = det3_by_cofactors(A, t)
                assert poly(t) == pytest.approx(oracle, rel=1e-10, abs=1e-10)

    def test_constant_coefficient_is_det_jacobian(self, rng):
        sys_ = builtin_problem("ex61").system
        lo, hi = sys_.domain.inner_bounds()
        for u in np.linspace(lo[0], hi[0], 20):
            for v in np.linspace(lo[1], hi[1], 20):
                det = np.linalg.det(sys_.f.jacobian((u, v)))
                a0 = charpoly(sys_, (u, v)).coeffs[0]
                assert abs(a0 - det) <= 1e-10 * (1.0 + abs(det))


class TestRealBranches:
    def test_coupled_atanh_data(self):
        branches = real_branches(builtin_problem("ex61").system, (0.0, 0.0))
        assert branches.values() == pytest.approx([1.0 - SQRT2, 1.0 + SQRT2], abs=1e-12)
        assert branches.min_positive() == pytest.approx(1.0 + SQRT2, abs=1e-12)
        assert branches.max_negative() == pytest.approx(1.0 - SQRT2, abs=1e-12)

    def test_rotation_has_no_real_branches(self):
        sys_ = HodographSystem(
            f=VectorFunction.parse(["-v", "u"], ["u", "v"]),
            domain=Box(lower=(-1.0, -1.0), upper=(1.0, 1.0)),
        )
        assert real_branches(sys_, (0.1, 0.8)).values() == []

    def test_cyclic_3d_kinks_have_one_real_root(self):
        branches = real_branches(builtin_problem("ex81").system, (0.5, 0.5, 0.5))
        assert len(branches) == 1
        assert branches.values()[0] == pytest.approx(2.0, abs=1e-10)

    def test_single_branch_in_1d_is_minus_derivative(self, rng):
        sys_ = HodographSystem(
            f=VectorFunction.parse(["u^3/3 + u"], ["u"]),
            domain=Box(lower=(-2.0,), upper=(2.0,)),
        )
        for u in rng.uniform(-1.5, 1.5, size=20):
            branches = real_branches(sys_, (u,))
            assert branches.values() == pytest.approx([-(u * u + 1.0)], rel=1e-12)

    def test_roots_annihilate_det(self, rng):
        sys_ = builtin_problem("ex61").system
        for point in sys_.domain.sample(rng, 50):
            J = sys_.f.jacobian(point)
            bound = 1e-8 * (1.0 + np.linalg.norm(J) ** sys_.n)
            for t in real_branches(sys_, point).values():
                assert abs(np.linalg.det(build_M(sys_, point, t))) <= bound

    def test_double_root_multiplicity(self):
        # Shear with a double eigenvalue 1: branch t = -1 with multiplicity 2.
        sys_ = HodographSystem(
            f=VectorFunction.parse(["u + v", "v"], ["u", "v"]),
            domain=Box(lower=(-2.0, -2.0), upper=(2.0, 2.0)),
        )
        branches = real_branches(sys_, (0.3, 0.1))
        assert branches.roots == ((-1.0, 2),)


class TestSolveU:
    def test_t_zero_inverts_f(self):
        sys_ = builtin_problem("ex61").system
        u_star = np.array([0.3, -0.2])
        x = sys_.f(u_star)
        sample = solve_u(sys_, x, 0.0, guess=(0.1, 0.1))
        assert np.allclose(sample.u, u_star, atol=1e-10)
        assert sample.residual <= 1e-10 * (1.0 + np.linalg.norm(x))

    def test_fold_system_quadratic_root(self):
        from eulerhodo.mappings import catalog

        sys_ = catalog()["fold2d"].system
        sample = solve_u(sys_, (2.0, 0.0), 1.0, guess=(0.8, 0.3))
        # x1 = u1^2 + u1 t: at (2, 0, 1) the root is u1 = 1 (u1^2 + u1 - 2 = 0)
        assert np.allclose(sample.u, [1.0, 0.0], atol=1e-10)

    def test_derivatives_are_inverse_of_M(self):
        sys_ = builtin_problem("ex61").system
        sample = solve_u(sys_, (0.15, -0.1), 0.5, guess=(0.0, 0.0))
        M = build_M(sys_, sample.u, 0.5)
        assert np.allclose(M @ sample.dudx, np.eye(2), atol=1e-12)
        assert np.allclose(M @ sample.dudt, -sample.u, atol=1e-12)

    def test_gaussian_bump_fixed_point_oracle(self):
        # Independent oracle: contraction u <- u0(x - u t) on the initial data.
        problem = builtin_problem("ex64")
        sys_, field = problem.system, problem.field
        u_star = np.array([0.706, 0.572])  # near the catastrophe velocity
        t = 0.5
        x = u_star * t + sys_.f(u_star)
        sample = solve_u(sys_, x, t, guess=(0.72, 0.60))
        u = np.array([0.69, 0.59])
        for _ in range(400):
            u = field.u0(x - u * t)
        assert np.allclose(sample.u, u, atol=1e-9)
        assert np.allclose(sample.u, u_star, atol=1e-9)
        assert sample.residual <= 1e-10 * (1.0 + np.linalg.norm(x))

    def test_initial_data_roundtrip(self, rng):
        # u0(x - u t) must reproduce u wherever both routes are defined.
        problem = builtin_problem("ex61")
        sys_, field = problem.system, problem.field
        for _ in range(10):
            u_star = rng.uniform(-0.5, 0.5, size=2)
            t = float(rng.uniform(0.0, 0.8))
            x = u_star * t + sys_.f(u_star)
            sample = solve_u(sys_, x, t, guess=u_star + rng.normal(scale=0.02, size=2))
            assert np.allclose(field.u0(x - sample.u * t), sample.u, atol=1e-8)

    def test_singular_near_blowup(self):
        sys_ = builtin_problem("ex61").system
        t = 1.0 + SQRT2  # exactly on the blow-up branch over u = 0
        x = np.zeros(2)
        with pytest.raises(SingularNearBlowup):
            solve_u(sys_, x, t, guess=(0.0, 0.0))

    def test_no_convergence_reports(self):
        # Far-away target that the box cannot reach.
        sys_ = builtin_problem("ex61").system
        with pytest.raises((NoConvergence, Exception)):
            solve_u(sys_, (50.0, 50.0), 0.1, guess=(0.0, 0.0))


class TestDerivativeMatrixIdentities:
    def test_material_derivative_of_dudx(self):
        # Along the flow, U = du/dx obeys dU/dt + U^2 = 0 (identity check
        # by finite differences; the relation is not used as an integrator).
        sys_ = builtin_problem("ex61").system
        x = np.array([0.15, -0.05])
        t, h = 0.4, 1e-5
        base = solve_u(sys_, x, t, guess=(0.0, 0.0))
        u0 = base.u
        Ut_p = solve_u(sys_, x, t + h, u0).dudx
        Ut_m = solve_u(sys_, x, t - h, u0).dudx
        dU = (Ut_p - Ut_m) / (2 * h)
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            Up = solve_u(sys_, x + e, t, u0).dudx
            Um = solve_u(sys_, x - e, t, u0).dudx
            dU = dU + u0[k] * (Up - Um) / (2 * h)
        assert np.max(np.abs(dU + base.dudx @ base.dudx)) <= 1e-6


class TestPdeResidual:
    def test_coupled_atanh_data(self):
        sys_ = builtin_problem("ex61").system
        res = pde_residual(sys_, (0.1, 0.2), 0.3, h=1e-5)
        assert res <= 1e-6

    def test_linear_solution_is_smooth(self, rng):
        A = np.array([[0.5, 0.2], [-0.1, 0.8]])
        sys_ = linear_system(A)
        res = pde_residual(sys_, (0.2, -0.3), 0.4, h=1e-5)
        assert res <= 1e-8

    def test_near_blowup_propagates(self):
        sys_ = builtin_problem("ex61").system
        with pytest.raises(SingularNearBlowup):
            pde_residual(sys_, (0.0, 0.0), 1.0 + SQRT2, h=1e-5, guess=(0.0, 0.0))
