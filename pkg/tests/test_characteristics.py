import math

import numpy as np
import pytest

from eulerhodo.blowup import NoBranch
from eulerhodo.characteristics import (
    InitialField,
    direct_catastrophe,
    eigentimes,
    evolve,
    fold_region,
)
from eulerhodo.expr import Box, VectorFunction
from eulerhodo.hodograph import real_branches
from eulerhodo.problems import builtin_problem

SQRT2 = math.sqrt(2.0)

# Lagrangian point of the first catastrophe of the Gaussian-bump data,
# located independently with scipy on the closed-form crossing-time surface.
BUMP_X0C = (0.3721106, 0.45806094)
BUMP_TC = 0.7281359


def field_2d(texts, box=((-2.0, -2.0), (2.0, 2.0))):
    return InitialField(
        u0=VectorFunction.parse(texts, ("x", "y")),
        sample_box=Box(lower=box[0], upper=box[1]),
    )


class TestEigentimes:
    def test_gaussian_bump_at_catastrophe_label(self):
        field = builtin_problem("ex64").field
        times = [t for t, _ in eigentimes(field, BUMP_X0C) if t > 0]
        assert min(times) == pytest.approx(BUMP_TC, abs=1e-4)

    def test_linear_contraction_1d(self):
        field = InitialField(
            u0=VectorFunction.parse(["-x"], ["x"]),
            sample_box=Box(lower=(-1.0,), upper=(1.0,)),
        )
        times = eigentimes(field, (0.3,))
        assert len(times) == 1
        assert times[0][0] == pytest.approx(1.0, abs=1e-12)

    def test_rotational_field_has_no_real_times(self):
        field = field_2d(["-y", "x"])
        assert eigentimes(field, (0.4, -0.7)) == []

    def test_crossing_direction_is_null_vector(self):
        field = builtin_problem("ex64").field
        A = field.u0.jacobian(BUMP_X0C)
        for t, h0 in eigentimes(field, BUMP_X0C):
            assert np.linalg.norm((np.eye(2) + t * A) @ h0) <= 1e-8


class TestDirectCatastrophe:
    def test_gaussian_bump(self):
        field = builtin_problem("ex64").field
        report = direct_catastrophe(field, n_starts=24, seed=7)
        assert report.t_c == pytest.approx(BUMP_TC, abs=1e-4)
        assert report.u_c[0] == pytest.approx(0.705897, abs=2e-3)
        assert report.u_c[1] == pytest.approx(0.572292, abs=2e-3)
        assert report.x_c[0] == pytest.approx(0.886099, abs=2e-3)
        assert report.x_c[1] == pytest.approx(0.874767, abs=2e-3)
        assert report.x0 is not None

    def test_cyclic_3d_kinks(self):
        field = builtin_problem("ex81").field
        report = direct_catastrophe(field, n_starts=16, seed=2)
        assert report.t_c == pytest.approx(2.0, abs=1e-7)
        assert np.allclose(report.x_c, 1.0, atol=1e-5)
        assert np.allclose(report.u_c, 0.5, atol=1e-5)

    def test_agrees_with_hodograph_route(self):
        field = builtin_problem("ex61").field
        report = direct_catastrophe(field, n_starts=16, seed=2)
        assert report.t_c == pytest.approx(1.0 + SQRT2, abs=1e-7)

    def test_no_positive_time(self):
        field = field_2d(["-y", "x"])  # rotation: never crosses
        with pytest.raises(NoBranch):
            direct_catastrophe(field, n_starts=8, seed=0)


class TestEvolve:
    def test_t_zero_is_identity(self):
        field = builtin_problem("ex61").field
        result = evolve(field, 21, 0.0)
        grids = np.meshgrid(*result.axes, indexing="ij")
        assert np.allclose(result.positions, np.stack(grids))
        assert np.allclose(result.dets, 1.0)

    def test_linear_field_has_uniform_det(self, rng):
        field = field_2d(["0.5*x - 0.2*y", "0.3*x + 0.1*y"])
        A = np.array([[0.5, -0.2], [0.3, 0.1]])
        t = 0.7
        result = evolve(field, 15, t)
        expected = np.linalg.det(np.eye(2) + A * t)
        assert np.allclose(result.dets, expected, atol=1e-12)

    def test_coupled_atanh_det_touches_zero_at_catastrophe(self):
        field = builtin_problem("ex61").field
        t_c = 1.0 + SQRT2
        # oracle: the crossing time at the catastrophe label x0 = 0 is t_c
        times = [t for t, _ in eigentimes(field, (0.0, 0.0)) if t > 0]
        assert min(times) == pytest.approx(t_c, abs=1e-12)
        center = evolve(field, 201, t_c)
        assert abs(center.dets.min()) <= 5e-3  # lattice nearly touches zero
        before = evolve(field, 201, t_c - 0.05)
        assert before.dets.min() > 0.0
        after = evolve(field, 201, t_c + 0.05)
        assert after.dets.min() < 0.0

    def test_free_streaming_composition(self):
        field = builtin_problem("ex61").field
        t1, t2 = 0.6, 0.9
        first = evolve(field, 31, t1)
        combined = evolve(field, 31, t1 + t2)
        grids = np.meshgrid(*first.axes, indexing="ij")
        u0 = field.u0.eval_grid(grids)
        assert np.allclose(combined.positions, first.positions + u0 * t2, rtol=1e-14, atol=1e-14)


class TestFoldRegion:
    def test_empty_before_catastrophe(self):
        field = builtin_problem("ex61").field
        region = fold_region(field, 200, 2.0)  # t_c = 1 + sqrt(2) ~ 2.414
        assert region.empty
        assert region.boundary == []

    def test_closed_curve_after_catastrophe(self):
        field = builtin_problem("ex61").field
        region = fold_region(field, 200, 2.8)
        assert not region.empty
        assert len(region.boundary) >= 1
        main = max(region.boundary, key=len)
        assert np.allclose(main[0], main[-1])  # closed loop
        assert region.contains((0.0, 0.0))  # catastrophe position x_c = 0
        # refined boundary sits on the zero set in label space
        from eulerhodo.characteristics import crossing_dets

        for poly in region.boundary_lagrangian:
            for p in poly[:: max(1, len(poly) // 17)]:
                assert abs(float(crossing_dets(field, list(p), 2.8))) <= 1e-6

    def test_uniform_collapse_has_zero_det_everywhere(self):
        tau = 2.0
        field = field_2d([f"-x/{tau!r}", f"-y/{tau!r}"])
        result = evolve(field, 31, tau)
        assert np.allclose(result.dets, 0.0, atol=1e-14)
        # no sign change anywhere: the collapse is global, not a fold
        region = fold_region(field, 31, tau)
        assert region.empty

    def test_3d_cells_appear_after_catastrophe(self):
        field = builtin_problem("ex81").field
        assert fold_region(field, 40, 1.9).empty
        assert not fold_region(field, 40, 2.1).empty


class TestDuality:
    def test_eigentimes_match_hodograph_branches(self, rng):
        # Crossing times at x0 equal blow-up branch values at u = u0(x0).
        for name in ("ex61", "ex62", "ex81"):
            problem = builtin_problem(name)
            for _ in range(10):
                x0 = problem.field.sample_box.sample(rng, 1)[0] * 0.4
                u = problem.field.u0(x0)
                if not problem.system.domain.contains(u):
                    continue
                direct = sorted(t for t, _ in eigentimes(problem.field, x0))
                hodo = sorted(real_branches(problem.system, u).values())
                assert len(direct) == len(hodo)
                for a, b in zip(direct, hodo):
                    assert a == pytest.approx(b, rel=1e-8, abs=1e-8)
