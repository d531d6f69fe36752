import math

import numpy as np
import pytest

from eulerhodo.blowup import (
    NoBranch,
    NotSingular,
    adjugate,
    bounded_combination_check,
    branch_objective,
    catastrophe_search,
    normal_form,
    null_space,
)
from eulerhodo.expr import Box, VectorFunction
from eulerhodo.hodograph import HodographSystem, build_M
from eulerhodo.mappings import catalog
from eulerhodo.problems import builtin_problem

SQRT2 = math.sqrt(2.0)


def collinear(a, b, atol=1e-9):
    a = np.asarray(a, dtype=float).ravel()
    b = np.asarray(b, dtype=float).ravel()
    cos = abs(a @ b) / (np.linalg.norm(a) * np.linalg.norm(b))
    return abs(cos - 1.0) <= atol


class TestCatastropheSearch:
    def test_coupled_atanh_data(self):
        sys_ = builtin_problem("ex61").system
        report = catastrophe_search(sys_, n_starts=24, seed=3)
        assert report.t_c == pytest.approx(1.0 + SQRT2, abs=1e-9)
        assert np.allclose(report.u_c, 0.0, atol=1e-6)
        assert np.allclose(report.x_c, 0.0, atol=1e-6)
        assert report.branch_kind == "GC"
        assert not report.boundary

    def test_cross_coupling_above_one(self):
        sys_ = builtin_problem("ex62", eps=2.0).system
        report = catastrophe_search(sys_, n_starts=16, seed=1)
        assert report.t_c == pytest.approx(1.0, abs=1e-8)
        assert np.allclose(report.u_c, 0.0, atol=1e-5)

    def test_cross_coupling_below_one_has_no_positive_branch(self):
        sys_ = builtin_problem("ex62", eps=0.5).system
        with pytest.raises(NoBranch):
            catastrophe_search(sys_, n_starts=12, seed=1)
        report = catastrophe_search(sys_, want_positive=False, n_starts=12, seed=1)
        assert report.t_c == pytest.approx(-1.0 / 1.5, abs=1e-8)
        assert report.branch_kind == "blowup"

    def test_cyclic_3d_negative_coupling(self):
        sys_ = builtin_problem("ex82", eps=-2.0).system
        report = catastrophe_search(sys_, n_starts=16, seed=5)
        assert report.t_c == pytest.approx(1.0, abs=1e-8)
        assert np.allclose(report.u_c, 0.0, atol=1e-5)

    def test_reported_point_annihilates_det(self):
        sys_ = builtin_problem("ex61").system
        report = catastrophe_search(sys_, n_starts=16, seed=2)
        M = build_M(sys_, report.u_c, report.t_c)
        scale = max(1.0, np.linalg.norm(M, np.inf)) ** sys_.n
        assert abs(np.linalg.det(M)) <= 1e-8 * scale

    def test_interior_optimum_has_flat_branch_surface(self):
        sys_ = builtin_problem("ex61").system
        report = catastrophe_search(sys_, n_starts=16, seed=2)
        phi = branch_objective(sys_, want_positive=True)
        h = 1e-5
        grad = []
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            grad.append((phi(report.u_c + e) - phi(report.u_c - e)) / (2 * h))
        assert np.linalg.norm(grad) <= 1e-4

    def test_t_c_is_global_minimum_of_sampled_branches(self, rng):
        sys_ = builtin_problem("ex61").system
        report = catastrophe_search(sys_, n_starts=16, seed=2)
        phi = branch_objective(sys_, want_positive=True)
        sampled = min(phi(p) for p in sys_.domain.sample(rng, 400))
        assert report.t_c <= sampled + 1e-9


class TestNullSpace:
    def test_coupled_atanh_data_at_catastrophe(self):
        sys_ = builtin_problem("ex61").system
        data = null_space(sys_, (0.0, 0.0), 1.0 + SQRT2)
        assert data.rank == 1
        assert collinear(data.right[:, 0], (-SQRT2, 1.0))
        assert collinear(data.left[:, 0], (1.0, -SQRT2))
        assert collinear(data.right_adj[:, 0], (SQRT2, 1.0))
        assert collinear(data.left_adj[:, 0], (1.0, SQRT2))
        assert data.a1 == pytest.approx(2.0 * SQRT2, abs=1e-9)
        assert np.allclose(data.adjugate, [[SQRT2, -2.0], [-1.0, SQRT2]], atol=1e-9)

    def test_diagonal_rank_one(self):
        sys_ = HodographSystem(
            f=VectorFunction.parse(["0", "v"], ["u", "v"]),
            domain=Box(lower=(-1.0, -1.0), upper=(1.0, 1.0)),
        )
        data = null_space(sys_, (0.2, 0.3), 0.0)  # M = diag(0, 1)
        assert data.rank == 1
        assert collinear(data.right[:, 0], (1.0, 0.0))
        assert collinear(data.left[:, 0], (1.0, 0.0))

    def test_fold_on_singular_line(self):
        sys_ = catalog()["fold2d"].system
        t = 0.6
        data = null_space(sys_, (-t / 2.0, 0.1), t)
        # det M = (1+t)(2 u1 + t) by hand, so adj M = diag(1+t, 0) there.
        assert data.rank == 1
        assert data.a1 == pytest.approx(1.0 + t, abs=1e-12)

    def test_null_vectors_annihilate(self):
        sys_ = builtin_problem("ex61").system
        data = null_space(sys_, (0.0, 0.0), 1.0 + SQRT2)
        M = build_M(sys_, (0.0, 0.0), 1.0 + SQRT2)
        assert np.linalg.norm(M @ data.right) <= 1e-9
        assert np.linalg.norm(data.left.T @ M) <= 1e-9
        assert np.linalg.norm(data.adjugate @ data.right_adj) <= 1e-9
        assert np.linalg.norm(data.left_adj.T @ data.adjugate) <= 1e-9

    def test_not_singular(self):
        sys_ = builtin_problem("ex61").system
        with pytest.raises(NotSingular):
            null_space(sys_, (0.0, 0.0), 0.5)


class TestAdjugate:
    def test_identity_on_random_matrices(self, rng):
        for n in (1, 2, 3, 4):
            M = rng.normal(size=(n, n))
            adj = adjugate(M)
            assert np.allclose(adj @ M, np.linalg.det(M) * np.eye(n), atol=1e-10)

    def test_det_time_derivative_is_adjugate_trace(self, rng):
        # d det(M)/dt = tr(adj M) along M = J_f + t I.
        sys_ = builtin_problem("ex61").system
        for point in sys_.domain.sample(rng, 20):
            t = float(rng.uniform(-2.0, 2.0))
            M = build_M(sys_, point, t)
            h = 1e-6
            fd = (
                np.linalg.det(build_M(sys_, point, t + h))
                - np.linalg.det(build_M(sys_, point, t - h))
            ) / (2.0 * h)
            tr = np.trace(adjugate(M))
            assert abs(fd - tr) <= 1e-8 * (1.0 + abs(tr))


class TestBoundedCombinations:
    def test_coupled_atanh_scalings(self):
        sys_ = builtin_problem("ex61").system
        report = bounded_combination_check(sys_, (0.0, 0.0), 1.0 + SQRT2)
        assert report.norm_slope == pytest.approx(-1.0, abs=0.1)
        assert report.right_slope == pytest.approx(0.0, abs=0.1)
        assert report.left_slope == pytest.approx(0.0, abs=0.1)

    def test_against_direct_inverse(self):
        # Oracle: invert M at the probe offsets with plain numpy and refit.
        sys_ = builtin_problem("ex61").system
        t0 = 1.0 + SQRT2
        eps = (1e-2, 1e-3, 1e-4)
        report = bounded_combination_check(sys_, (0.0, 0.0), t0, eps)
        direct = [
            np.linalg.norm(np.linalg.inv(build_M(sys_, (0.0, 0.0), t0 + e)))
            for e in eps
        ]
        assert report.dudx_norms == pytest.approx(direct, rel=1e-12)

    def test_decoupled_blowup_is_confined_to_one_entry(self):
        sys_ = HodographSystem(
            f=VectorFunction.parse(["u^2/2", "v^2/2"], ["u", "v"]),
            domain=Box(lower=(-3.0, -3.0), upper=(3.0, 3.0)),
        )
        u0 = (1.0, 2.0)
        t0 = -1.0  # branch of the first component
        for eps in (1e-2, 1e-3, 1e-4):
            dudx = np.linalg.inv(build_M(sys_, u0, t0 + eps))
            assert abs(dudx[0, 0]) == pytest.approx(1.0 / eps, rel=1e-9)
            assert abs(dudx[1, 1]) <= 1.2
            assert abs(dudx[0, 1]) == 0.0 and abs(dudx[1, 0]) == 0.0

    def test_double_root_scales_like_inverse_square(self):
        # Shear: J_f = [[1, 1], [0, 1]], double eigenvalue, tr adj M = 0
        # at t0 = -1, so the growth steepens to 1/eps^2.
        sys_ = HodographSystem(
            f=VectorFunction.parse(["u + v", "v"], ["u", "v"]),
            domain=Box(lower=(-2.0, -2.0), upper=(2.0, 2.0)),
        )
        report = bounded_combination_check(sys_, (0.1, 0.2), -1.0)
        assert report.a1 == pytest.approx(0.0, abs=1e-12)
        assert report.norm_slope == pytest.approx(-2.0, abs=0.1)


class TestNormalForm:
    def test_coupled_atanh_data_is_degenerate_at_catastrophe(self):
        sys_ = builtin_problem("ex61").system
        data = normal_form(sys_, (0.0, 0.0), 1.0 + SQRT2)
        assert data.degenerate

    def test_fold_quadratic_form(self):
        sys_ = catalog()["fold2d"].system
        t = 0.5
        data = normal_form(sys_, (-t / 2.0, 0.0), t)
        assert not data.degenerate
        # Left null vector is e1 (up to sign); the only second derivative is
        # d2 x1/du1^2 = 2, so lhat = (1/2) * 2 * (+-1) at the (1,1) slot.
        assert abs(data.lhat[0, 0, 0]) == pytest.approx(1.0, abs=1e-9)
        assert np.allclose(np.abs(data.lhat[0]), [[1.0, 0.0], [0.0, 0.0]], atol=1e-9)
        assert data.lhat[0] == pytest.approx(data.lhat[0].T)

    def test_linear_map_has_zero_forms(self):
        sys_ = HodographSystem(
            f=VectorFunction.parse(["u + v", "v"], ["u", "v"]),
            domain=Box(lower=(-2.0, -2.0), upper=(2.0, 2.0)),
        )
        data = normal_form(sys_, (0.0, 0.0), -1.0)
        assert data.degenerate
        assert np.allclose(data.lhat, 0.0)
        assert np.allclose(data.pair, 0.0)
