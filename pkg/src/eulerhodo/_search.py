"""Seeded multistart Nelder-Mead over a box (shared search machinery).

Branch surfaces are continuous but only piecewise smooth (eigenvalue
crossings), so the searches are derivative-free.  Objectives return
``BIG`` outside the feasible region, which confines the simplex to the
margin-shrunk box without needing bound constraints.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

BIG = 1e30


@dataclass
class SearchOutcome:
    point: np.ndarray
    value: float
    converged_fraction: float
    boundary: bool
    n_starts: int


def _boxed(objective, box):
    lo, hi = box.inner_bounds()

    def wrapped(p):
        if np.any(p < lo) or np.any(p > hi):
            return BIG
        return objective(p)

    return wrapped


def multistart_minimize(objective, box, n_starts: int, seed: int):
    """Best local minimum over seeded uniform starts; None if all starts fail.

    Ties within 1e-9 of the best value break to the lexicographically
    smallest point, which keeps multistart reductions order-independent.
    A final tightened run polishes the winner.
    """
    rng = np.random.default_rng(seed)
    starts = box.sample(rng, n_starts)
    span = float(np.max(box.span))
    phi = _boxed(objective, box)
    results = []
    n_ok = 0
    for s in starts:
        res = minimize(
            phi,
            s,
            method="Nelder-Mead",
            options=dict(
                xatol=1e-8 * span,
                fatol=1e-12,
                maxiter=400 * box.n,
                maxfev=400 * box.n,
            ),
        )
        if res.fun < BIG / 2.0:
            results.append(res)
            if res.success:
                n_ok += 1
    if not results:
        return None
    fmin = min(r.fun for r in results)
    near = [r for r in results if r.fun <= fmin + 1e-9 * (1.0 + abs(fmin))]
    best = min(near, key=lambda r: tuple(r.x))
    polish = minimize(
        phi,
        best.x,
        method="Nelder-Mead",
        options=dict(
            xatol=1e-13 * span,
            fatol=1e-16,
            maxiter=2000 * box.n,
            maxfev=2000 * box.n,
        ),
    )
    if polish.fun <= best.fun:
        best_x, best_f = polish.x, polish.fun
    else:
        best_x, best_f = best.x, best.fun
    best_x, best_f = _quadratic_polish(phi, np.asarray(best_x, float), best_f, span)
    lo, hi = box.inner_bounds()
    margin_dist = np.minimum(best_x - lo, hi - best_x)
    boundary = bool(np.any(margin_dist < 1e-4 * box.span))
    return SearchOutcome(
        point=np.asarray(best_x, dtype=float),
        value=float(best_f),
        converged_fraction=n_ok / n_starts,
        boundary=boundary,
        n_starts=n_starts,
    )


def _quadratic_polish(phi, x, fx, span):
    """Refine a minimizer past the double-precision flats of the objective.

    Near a quadratic minimum the objective is numerically constant on a
    ball of radius ~sqrt(eps), which stalls the simplex around 1e-8 off
    the true minimizer.  A local quadratic fit on a wider stencil sees
    through the flat; the Newton step on the fit recovers several more
    digits.  Steps that look untrustworthy (indefinite fit, large jump,
    failed evaluation) leave the input unchanged.
    """
    n = x.size
    r = 1e-6 * span
    try:
        for _ in range(2):
            g = np.empty(n)
            H = np.empty((n, n))
            fp = np.empty(n)
            fm = np.empty(n)
            for i in range(n):
                e = np.zeros(n)
                e[i] = r
                fp[i] = phi(x + e)
                fm[i] = phi(x - e)
                g[i] = (fp[i] - fm[i]) / (2.0 * r)
                H[i, i] = (fp[i] + fm[i] - 2.0 * fx) / (r * r)
            for i in range(n):
                for j in range(i + 1, n):
                    e = np.zeros(n)
                    e[i] = r
                    e[j] = r
                    d = np.zeros(n)
                    d[i] = r
                    d[j] = -r
                    H[i, j] = H[j, i] = (
                        phi(x + e) + phi(x - e) - phi(x + d) - phi(x - d)
                    ) / (4.0 * r * r)
            if max(np.max(np.abs(fp)), np.max(np.abs(fm)), abs(fx)) >= BIG / 2.0:
                return x, fx
            try:
                step = -np.linalg.solve(H, g)
            except np.linalg.LinAlgError:
                return x, fx
            if not np.all(np.isfinite(step)) or np.linalg.norm(step) > r:
                return x, fx
            cand = x + step
            f_cand = phi(cand)
            if f_cand <= fx + 1e-12 * (1.0 + abs(fx)):
                x, fx = cand, min(fx, f_cand)
            else:
                return x, fx
    except Exception:
        return x, fx
    return x, fx


def fit_slope(xs, ys, floor: float = 1e-300) -> float:
    """Least-squares slope of log|y| against log x."""
    lx = np.log(np.asarray(xs, dtype=float))
    ly = np.log(np.maximum(np.abs(np.asarray(ys, dtype=float)), floor))
    return float(np.polyfit(lx, ly, 1)[0])
