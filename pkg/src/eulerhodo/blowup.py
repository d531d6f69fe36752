"""First gradient catastrophe and the fine structure of derivative blow-ups.

The first catastrophe minimizes the lowest positive blow-up branch over the
velocity box.  At a blow-up point (u0, t0) with rank-deficient M the module
exposes:

* null data: right/left null vectors of M, the adjugate adj M, its null
  vectors, and A_1 = tr adj M (the linear coefficient of det M(t0 + eps));
* scaling checks: du/dx = adj M / det M grows like 1/eps while the
  contractions with the adjugate null vectors stay bounded;
* local quadratic data: contractions of the component Hessians with the
  left null vectors, the forms controlling the square-root (fold-like)
  local behavior; a degeneracy flag marks fully cubic points.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._search import BIG, fit_slope, multistart_minimize
from .expr import EvalDomainError
from .hodograph import HodographSystem, build_M, real_branches


class NoBranch(Exception):
    """No start produced a real branch of the requested sign."""


class NotSingular(Exception):
    """The requested point is not on the blow-up set."""


@dataclass(frozen=True)
class CatastropheReport:
    """Extremal blow-up time over the velocity box.

    ``branch_kind`` is "GC" for a positive-time catastrophe and "blowup"
    for a negative-time extremum.  ``boundary`` flags optima adjacent to
    the sampling margin, where branches may keep decreasing toward the
    open box boundary; such results are not certified interior minima.
    ``x0`` is only set by the characteristics-side search (particle label).
    """

    t_c: float
    u_c: np.ndarray
    x_c: np.ndarray
    branch_kind: str
    n_starts: int
    converged_fraction: float
    boundary: bool
    x0: Optional[np.ndarray] = None


@dataclass(frozen=True)
class NullSpaceData:
    """Rank/null-space data of M and its adjugate at a blow-up point."""

    rank: int
    right: np.ndarray  # (n, n-r) columns R^(alpha), M R = 0
    left: np.ndarray  # (n, n-r) columns L^(alpha), L^T M = 0
    adjugate: np.ndarray
    right_adj: np.ndarray  # columns annihilated by adj M
    left_adj: np.ndarray
    a1: float  # tr adj M = d(det M)/dt at t0
    singular_values: np.ndarray


@dataclass(frozen=True)
class BlowupScalingReport:
    """Growth-rate fits of du/dx and of its null-vector contractions."""

    eps_list: tuple
    dudx_norms: tuple
    right_combos: tuple  # max_i |sum_k (du_i/dx_k) Radj_k|
    left_combos: tuple  # max_k |sum_i Ladj_i (du_i/dx_k)|
    norm_slope: float
    right_slope: float
    left_slope: float
    a1: float


@dataclass(frozen=True)
class NormalFormData:
    """Quadratic forms of the local normal form at a blow-up point.

    ``lhat`` stacks, per left null vector, the symmetric forms
    (1/2) sum_i d2f_i/du_k du_l L_i; ``pair`` contracts the Hessians with
    two left null vectors.  ``degenerate`` is set when every entry
    vanishes, i.e. the local behavior is cubic rather than fold-like.
    """

    lhat: np.ndarray  # (n-r, n, n)
    pair: np.ndarray  # (n, n-r, n-r)
    degenerate: bool


def branch_objective(sys: HodographSystem, want_positive: bool, rank: int = 0):
    """Objective whose minimum is the requested branch extremum.

    For positive searches: the (rank+1)-th smallest positive root at u.
    For negative searches: minus the (rank+1)-th largest negative root, so
    minimizing still finds the extremum closest to t = 0.
    """

    def phi(u):
        try:
            branches = real_branches(sys, u)
        except EvalDomainError:
            return BIG
        if want_positive:
            vals = sorted(branches.positive())
        else:
            vals = sorted(branches.negative(), reverse=True)
        if len(vals) <= rank:
            return BIG
        return vals[rank] if want_positive else -vals[rank]

    return phi


def catastrophe_search(
    sys: HodographSystem,
    want_positive: bool = True,
    n_starts: int = 64,
    seed: int = 0,
    branch_rank: int = 0,
) -> CatastropheReport:
    """Multistart minimization of the selected branch surface.

    ``branch_rank`` selects the k-th branch ordered away from t = 0
    (0 = first catastrophe / closest blow-up); decoupled systems use it to
    recover the per-field catastrophe times.
    """
    phi = branch_objective(sys, want_positive, branch_rank)
    outcome = multistart_minimize(phi, sys.domain, n_starts, seed)
    if outcome is None:
        sign = "positive" if want_positive else "negative"
        raise NoBranch(f"no {sign} real branch found from {n_starts} starts")
    t_c = outcome.value if want_positive else -outcome.value
    u_c = outcome.point
    x_c = u_c * t_c + sys.f(u_c)
    return CatastropheReport(
        t_c=float(t_c),
        u_c=u_c,
        x_c=np.asarray(x_c, dtype=float),
        branch_kind="GC" if t_c > 0.0 else "blowup",
        n_starts=n_starts,
        converged_fraction=outcome.converged_fraction,
        boundary=outcome.boundary,
    )


def adjugate(M: np.ndarray) -> np.ndarray:
    """Adjugate (transposed cofactor matrix); adj(M) M = det(M) I."""
    n = M.shape[0]
    if n == 1:
        return np.array([[1.0]])
    adj = np.empty_like(M)
    rows = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = M[np.ix_(rows != i, rows != j)]
            adj[j, i] = (-1.0) ** (i + j) * np.linalg.det(minor)
    return adj


def null_space(sys: HodographSystem, u, t0: float, tol: float = 1e-9) -> NullSpaceData:
    """SVD rank/null-space analysis of M at a point of the blow-up set."""
    M = build_M(sys, u, t0)
    U, s, Vt = np.linalg.svd(M)
    smax = float(s[0])
    if s[-1] > 1e-6 * smax:
        raise NotSingular(
            f"smallest singular value {s[-1]:.3e} above 1e-6 * {smax:.3e}"
        )
    rank = int(np.sum(s > tol * smax))
    right = Vt[rank:].T
    left = U[:, rank:]
    adj = adjugate(M)
    Ua, sa, Vta = np.linalg.svd(adj)
    rank_adj = int(np.sum(sa > tol * max(float(sa[0]), 1e-300)))
    return NullSpaceData(
        rank=rank,
        right=right,
        left=left,
        adjugate=adj,
        right_adj=Vta[rank_adj:].T,
        left_adj=Ua[:, rank_adj:],
        a1=float(np.trace(adj)),
        singular_values=s,
    )


def bounded_combination_check(
    sys: HodographSystem,
    u0,
    t0: float,
    eps_list=(1e-2, 1e-3, 1e-4),
) -> BlowupScalingReport:
    """Evaluate du/dx = M^{-1} at t0 + eps and fit growth exponents.

    Near a simple blow-up the norm grows like 1/eps (log-log slope -1;
    -2 when A_1 = 0), while the combinations along the adjugate null
    vectors stay bounded (slope about 0).
    """
    ns = null_space(sys, u0, t0)
    norms, right_combos, left_combos = [], [], []
    for eps in eps_list:
        dudx = np.linalg.inv(build_M(sys, u0, t0 + eps))
        norms.append(float(np.linalg.norm(dudx)))
        right_combos.append(float(np.max(np.abs(dudx @ ns.right_adj))))
        left_combos.append(float(np.max(np.abs(ns.left_adj.T @ dudx))))
    return BlowupScalingReport(
        eps_list=tuple(eps_list),
        dudx_norms=tuple(norms),
        right_combos=tuple(right_combos),
        left_combos=tuple(left_combos),
        norm_slope=fit_slope(eps_list, norms),
        right_slope=fit_slope(eps_list, right_combos),
        left_slope=fit_slope(eps_list, left_combos),
        a1=ns.a1,
    )


def normal_form(sys: HodographSystem, u0, t0: float) -> NormalFormData:
    """Contract the component Hessians with the left null vectors of M."""
    ns = null_space(sys, u0, t0)
    H = sys.f.hessians(u0)  # (n, n, n), H[i] symmetric
    lhat = 0.5 * np.einsum("ikl,ib->bkl", H, ns.left)
    pair = 0.5 * np.einsum("ikl,ka,lb->iab", H, ns.left, ns.left)
    scale = max(np.max(np.abs(lhat), initial=0.0), np.max(np.abs(pair), initial=0.0))
    return NormalFormData(lhat=lhat, pair=pair, degenerate=bool(scale < 1e-10))
