"""The hodograph relations as a time-parametrized family of maps u -> x.

x(u, t) = u t + f(u) deforms the initial map x = f(u); it is singular
exactly where det M(u, t) = 0, so the blow-up analysis doubles as the
singularity dynamics of the map family.  The module scans singular loci
on velocity grids, tracks their appearance and disappearance over a time
range, probes the local collapse rates near singular points, and ships
the classical stable maps (folds, cusps, swallow tail) as built-in
systems with closed-form Jacobian oracles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from ._search import BIG, fit_slope
from .blowup import normal_form, null_space
from .characteristics import InitialField
from .expr import Box, Expression, VectorFunction, parse
from .hodograph import HodographSystem, build_M, charpoly
from .isoline import det_stack, marching_squares, sign_change_cells_3d


class BlowupTime(Exception):
    """det(I + U0 t) vanished; the Eulerian Jacobian is undefined here."""


@dataclass(frozen=True)
class SingularLocus:
    """Discretized {det M(u, t) = 0} in velocity space at fixed t."""

    t: float
    polylines: list  # 2D only; refined vertex arrays
    points: np.ndarray  # refined on-locus points, shape (m, n)
    cells: list

    @property
    def empty(self) -> bool:
        return len(self.cells) == 0


@dataclass(frozen=True)
class TimelineInterval:
    t_lo: float
    t_hi: float
    nonempty: bool


@dataclass(frozen=True)
class CollapseReport:
    """Log-log collapse rates of the map near a singular point.

    ``radial_slopes``: growth of |dx| under u-perturbations along each
    right null vector (2 for fold-like points, 3 for degenerate ones).
    ``left_slopes``: growth of |L . dx| for a generic perturbation, per
    left null vector (at least 2: the linear term is annihilated).
    """

    deltas: tuple
    radial_norms: tuple  # per right null vector: tuple of |dx| values
    radial_slopes: tuple
    left_values: tuple  # per left null vector: tuple of |L . dx| values
    left_slopes: tuple
    degenerate: bool


@dataclass(frozen=True)
class CatalogEntry:
    """A built-in stable map with its closed-form Jacobian in (u, t)."""

    name: str
    system: HodographSystem
    closed_form_J: Expression  # variables: u-names + t

    def closed_form(self, u, t: float) -> float:
        return self.closed_form_J(list(np.asarray(u, dtype=float)) + [float(t)])


def map_forward(sys: HodographSystem, u, t: float) -> np.ndarray:
    """x = u t + f(u)."""
    u = np.asarray(u, dtype=float)
    return u * t + sys.f(u)


def _axes_for(sys: HodographSystem, grid) -> list:
    if grid is None:
        grid = 200 if sys.n == 2 else 60
    if np.isscalar(grid):
        return sys.domain.axes(int(grid))
    return [np.asarray(a, dtype=float) for a in grid]


def _det_grid(Jf: np.ndarray, t: float) -> np.ndarray:
    A = Jf.copy()
    for i in range(A.shape[0]):
        A[i, i] = A[i, i] + t
    return det_stack(A)


def singular_locus(sys: HodographSystem, t: float, grid=None) -> SingularLocus:
    """Scan det M(u, t) over the velocity grid and refine its zero set."""
    axes = _axes_for(sys, grid)
    coords = np.meshgrid(*axes, indexing="ij")
    dets = _det_grid(sys.f.jacobian_grid(coords), t)

    def g(u):
        return float(np.linalg.det(build_M(sys, u, t)))

    if sys.n == 2:
        polylines, cells = marching_squares(dets, axes[0], axes[1], g, tol=1e-12)
        points = (
            np.concatenate([p for p in polylines]) if polylines else np.empty((0, 2))
        )
        return SingularLocus(t=float(t), polylines=polylines, points=points, cells=cells)
    if sys.n == 3:
        cells, points = sign_change_cells_3d(dets, axes, g, tol=1e-12)
        return SingularLocus(t=float(t), polylines=[], points=points, cells=cells)
    raise ValueError("singular loci are scanned in 2 or 3 dimensions")


def _real_roots_at(sys: HodographSystem, u, lo: float, hi: float):
    """Real roots of the blow-up polynomial at u restricted to [lo, hi]."""
    roots = charpoly(sys, u).roots()
    out = [
        float(r.real)
        for r in roots
        if abs(r.imag) <= 1e-8 * (1.0 + abs(r.real)) and lo <= r.real <= hi
    ]
    return out


def _polish_endpoint(sys, axes, Jf, t_empty, t_nonempty, span):
    """Refine an emptiness transition: bisection on the grid predicate,
    then continuous minimization of the nearest branch value."""
    for _ in range(60):
        tm = 0.5 * (t_empty + t_nonempty)
        d = _det_grid(Jf, tm)
        if d.min() <= 0.0 <= d.max():
            t_nonempty = tm
        else:
            t_empty = tm
        if abs(t_nonempty - t_empty) <= 1e-9 * (1.0 + abs(tm)):
            break
    # Continuous polish: the endpoint is an extremum over u of a branch
    # surface; start from the grid node closest to the incipient locus.
    d = _det_grid(Jf, t_nonempty)
    node = np.unravel_index(np.argmin(np.abs(d)), d.shape)
    u_start = np.array([axes[k][node[k]] for k in range(len(axes))])
    lo = min(t_empty, t_nonempty) - 0.05 * span
    hi = max(t_empty, t_nonempty) + 0.05 * span
    upward = t_nonempty > t_empty  # locus appears as t increases

    def objective(u):
        if not sys.domain.contains(u):
            return BIG
        cand = _real_roots_at(sys, u, lo, hi)
        if not cand:
            return BIG
        return min(cand) if upward else -max(cand)

    res = minimize(
        objective,
        u_start,
        method="Nelder-Mead",
        options=dict(xatol=1e-12, fatol=1e-15, maxiter=4000, maxfev=4000),
    )
    if res.fun >= BIG / 2.0:
        return 0.5 * (t_empty + t_nonempty)  # fall back to the bisection value
    return float(res.fun) if upward else float(-res.fun)


def singularity_timeline(sys: HodographSystem, t_range, grid=None, samples: int = 256) -> list:
    """Emptiness intervals of the singular locus over a time range.

    Samples the locus-emptiness predicate at >= 200 times on the velocity
    grid, verifies against a finer grid (guards aliasing of small loci),
    merges runs into maximal intervals, and refines every interior
    endpoint first by bisection and then by minimizing the branch surface
    that creates the transition.
    """
    a, b = float(t_range[0]), float(t_range[1])
    samples = max(int(samples), 200)
    axes = _axes_for(sys, grid)
    fine_factor = 2 if sys.n == 2 else 1.5
    fine_axes = [
        np.linspace(ax[0], ax[-1], int(round(len(ax) * fine_factor))) for ax in axes
    ]
    Jf_fine = sys.f.jacobian_grid(np.meshgrid(*fine_axes, indexing="ij"))
    ts = np.linspace(a, b, samples)
    flags = []
    for t in ts:
        d = _det_grid(Jf_fine, t)
        flags.append(bool(d.min() <= 0.0 <= d.max()))
    span = b - a
    intervals = []
    run_start = 0
    for k in range(1, samples + 1):
        if k < samples and flags[k] == flags[run_start]:
            continue
        t_lo = a if run_start == 0 else intervals[-1].t_hi
        if k == samples:
            t_hi = b
        else:
            t_hi = _polish_endpoint(
                sys,
                fine_axes,
                Jf_fine,
                t_empty=ts[k] if flags[run_start] else ts[k - 1],
                t_nonempty=ts[k - 1] if flags[run_start] else ts[k],
                span=span,
            )
        intervals.append(TimelineInterval(t_lo=t_lo, t_hi=float(t_hi), nonempty=flags[run_start]))
        run_start = k
    return intervals


def collapse_probe(sys: HodographSystem, u0, t0: float, deltas=(1e-2, 1e-3, 1e-4), direction=None) -> CollapseReport:
    """Measure how the map contracts around a singular point (u0, t0).

    Along each right null direction the image displacement must vanish
    faster than the perturbation (quadratically at fold-like points,
    cubically at degenerate ones); for a generic perturbation the left
    null components of the displacement lose the linear term.
    Raises :class:`NotSingular` away from the singular locus.
    """
    ns = null_space(sys, u0, t0)  # raises NotSingular when appropriate
    u0 = np.asarray(u0, dtype=float)
    x_base = map_forward(sys, u0, t0)
    deltas = tuple(float(d) for d in deltas)

    radial_norms, radial_slopes = [], []
    for alpha in range(ns.right.shape[1]):
        direction_r = ns.right[:, alpha]
        norms = []
        for d in deltas:
            dx = map_forward(sys, u0 + d * direction_r, t0) - x_base
            norms.append(float(np.linalg.norm(dx)))
        radial_norms.append(tuple(norms))
        radial_slopes.append(fit_slope(deltas, norms))

    if direction is None:
        direction = np.cos(1.0 + np.arange(sys.n))  # fixed, incommensurate
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    left_values, left_slopes = [], []
    for beta in range(ns.left.shape[1]):
        lvec = ns.left[:, beta]
        vals = []
        for d in deltas:
            dx = map_forward(sys, u0 + d * direction, t0) - x_base
            vals.append(float(abs(lvec @ dx)))
        left_values.append(tuple(vals))
        left_slopes.append(fit_slope(deltas, vals))

    return CollapseReport(
        deltas=deltas,
        radial_norms=tuple(radial_norms),
        radial_slopes=tuple(radial_slopes),
        left_values=tuple(left_values),
        left_slopes=tuple(left_slopes),
        degenerate=normal_form(sys, u0, t0).degenerate,
    )


def eulerian_jacobian(field: InitialField, x0, t: float) -> float:
    """Jacobian det(du/dx) of the solution map x -> u at time t.

    Equals det(U0) / det(I + U0 t): maps singular at t = 0 stay singular
    at every regular time.
    """
    U0 = field.u0.jacobian(x0)
    denom = float(np.linalg.det(np.eye(field.n) + U0 * t))
    if abs(denom) < 1e-12:
        raise BlowupTime(f"det(I + U0 t) = {denom:.3e} at t={t}")
    return float(np.linalg.det(U0)) / denom


def _entry(name, components, closed_form, nvars):
    names = ("u", "v", "w")[:nvars]
    system = HodographSystem(
        f=VectorFunction.parse(components, names),
        domain=Box(lower=(-2.0,) * nvars, upper=(2.0,) * nvars, margin=0.02),
    )
    return CatalogEntry(
        name=name,
        system=system,
        closed_form_J=parse(closed_form, list(names) + ["t"]),
    )


def catalog() -> dict:
    """The classical stable maps as hodograph systems.

    Jacobians factor as powers of (1 + t) times the deformed initial
    Jacobian, so each map stays singular at every time on the pattern
    {J(u, t=0) + t = 0}.
    """
    return {
        "fold2d": _entry("fold2d", ("u^2", "v"), "(1 + t)*(2*u + t)", 2),
        "cusp2d": _entry("cusp2d", ("u^3 + u*v", "v"), "(1 + t)*(3*u^2 + v + t)", 2),
        "fold3d": _entry("fold3d", ("u^2", "v", "w"), "(1 + t)^2*(2*u + t)", 3),
        "cusp3d": _entry(
            "cusp3d", ("u^3 + u*v", "v", "w"), "(1 + t)^2*(3*u^2 + v + t)", 3
        ),
        "swallowtail": _entry(
            "swallowtail",
            ("u^4 + u^2*v + u*w", "v", "w"),
            "(1 + t)^2*(4*u^3 + 2*u*v + w + t)",
            3,
        ),
    }
