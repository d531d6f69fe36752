"""Free-streaming characteristics: the independent route to blow-up times.

Particles move as x = x0 + u0(x0) t.  Two characteristics that start
infinitesimally close cross when det(I + U0(x0) t) = 0 with U0 the initial
velocity Jacobian, i.e. at the times t = -1/lambda for real eigenvalues
lambda of U0(x0).  Minimizing the smallest positive such time over x0
locates the first gradient catastrophe without ever inverting the initial
data, which makes this module the cross-check oracle for the hodograph
route (their branch values coincide through the inverse function theorem).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._search import BIG, multistart_minimize
from .blowup import CatastropheReport, NoBranch
from .expr import Box, EvalDomainError, VectorFunction
from .isoline import det_stack, marching_squares, point_in_polylines, sign_change_cells_3d


@dataclass(frozen=True)
class InitialField:
    """Initial velocity data u0 over a sampling box in x-space."""

    u0: VectorFunction
    sample_box: Box

    def __post_init__(self):
        if self.u0.arity != self.sample_box.n:
            raise ValueError("field arity and sampling box dimension differ")

    @property
    def n(self) -> int:
        return self.sample_box.n


@dataclass(frozen=True)
class EvolveResult:
    """Pushed particle positions and per-node det(I + U0 t)."""

    t: float
    axes: list
    positions: np.ndarray  # (n,) + lattice shape
    dets: np.ndarray  # lattice shape


@dataclass(frozen=True)
class FoldRegion:
    """Where the push-forward map has folded at time t.

    ``cells`` are lattice cells with a det(I + U0 t) sign change (their
    index tuples); ``boundary`` holds the fold boundary as polylines in
    physical x-space (2D only), ``boundary_lagrangian`` the same curves in
    particle-label space, where each refined vertex satisfies
    |det(I + U0 t)| <= 1e-6.
    """

    t: float
    cells: list
    boundary: list
    boundary_lagrangian: list

    @property
    def empty(self) -> bool:
        return len(self.cells) == 0

    def contains(self, point) -> bool:
        """Even-odd test of a physical-space point against the boundary."""
        return point_in_polylines(point, self.boundary)


def eigentimes(field: InitialField, x0) -> list:
    """Crossing times at x0: (t, h0) for each real eigenvalue of U0(x0).

    t = -1/lambda and h0 is the crossing direction, the eigenvector
    spanning the null space of I + t U0.  Sorted by t; empty when all
    eigenvalues are complex or zero.
    """
    lam, vecs = np.linalg.eig(field.u0.jacobian(x0))
    out = []
    for k in range(lam.size):
        l = lam[k]
        if abs(l.imag) <= 1e-9 * (1.0 + abs(l.real)) and abs(l.real) > 1e-12:
            h = np.real(vecs[:, k])
            norm = np.linalg.norm(h)
            if norm == 0.0:  # purely imaginary eigenvector paired elsewhere
                continue
            out.append((-1.0 / float(l.real), h / norm))
    out.sort(key=lambda pair: pair[0])
    return out


def direct_catastrophe(field: InitialField, n_starts: int = 64, seed: int = 0) -> CatastropheReport:
    """First catastrophe by minimizing the smallest positive crossing time."""

    def psi(x0):
        try:
            times = [t for t, _ in eigentimes(field, x0) if t > 0.0]
        except EvalDomainError:
            return BIG
        return min(times) if times else BIG

    outcome = multistart_minimize(psi, field.sample_box, n_starts, seed)
    if outcome is None:
        raise NoBranch(f"no positive crossing time found from {n_starts} starts")
    x0c = outcome.point
    t_c = outcome.value
    u_c = field.u0(x0c)
    return CatastropheReport(
        t_c=float(t_c),
        u_c=np.asarray(u_c, dtype=float),
        x_c=x0c + u_c * t_c,
        branch_kind="GC",
        n_starts=n_starts,
        converged_fraction=outcome.converged_fraction,
        boundary=outcome.boundary,
        x0=x0c,
    )


def _as_axes(field: InitialField, grid) -> list:
    if np.isscalar(grid):
        return field.sample_box.axes(int(grid))
    return [np.asarray(a, dtype=float) for a in grid]


def crossing_dets(field: InitialField, coords, t: float) -> np.ndarray:
    """det(I + U0 t) on coordinate arrays of a common broadcast shape."""
    J = field.u0.jacobian_grid(coords)
    A = t * J
    for i in range(field.n):
        A[i, i] = A[i, i] + 1.0
    return det_stack(A)


def evolve(field: InitialField, grid, t: float) -> EvolveResult:
    """Push the lattice forward: x = x0 + u0(x0) t, with det(I + U0 t)."""
    axes = _as_axes(field, grid)
    coords = np.meshgrid(*axes, indexing="ij")
    values = field.u0.eval_grid(coords)
    positions = np.stack([coords[i] + values[i] * t for i in range(field.n)])
    return EvolveResult(t=float(t), axes=axes, positions=positions, dets=crossing_dets(field, coords, t))


def fold_region(field: InitialField, grid, t: float) -> FoldRegion:
    """Extract the fold region {det(I + U0 t) = 0} at time t.

    Empty output (no sign-change cells) is the valid answer before the
    first catastrophe.  In 2D the refined Lagrangian boundary is pushed
    forward to physical space; in 3D only the sign-change cells are
    reported.
    """
    axes = _as_axes(field, grid)
    coords = np.meshgrid(*axes, indexing="ij")
    dets = crossing_dets(field, coords, t)

    def g(x0):
        return float(crossing_dets(field, list(x0), t))

    if field.n == 2:
        polylines, cells = marching_squares(dets, axes[0], axes[1], g, tol=1e-6)
        pushed = []
        for poly in polylines:
            vals = field.u0.eval_grid([poly[:, 0], poly[:, 1]])
            pushed.append(poly + t * np.stack(vals, axis=-1))
        return FoldRegion(t=float(t), cells=cells, boundary=pushed, boundary_lagrangian=polylines)
    if field.n == 3:
        cells, _points = sign_change_cells_3d(dets, axes, g, tol=1e-6)
        return FoldRegion(t=float(t), cells=cells, boundary=[], boundary_lagrangian=[])
    raise ValueError("fold regions are available in 2 or 3 dimensions")
