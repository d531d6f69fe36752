"""Implicit velocity fields from hodograph relations.

A system couples n velocity components u = (u_1..u_n) to positions through

    x_i = u_i t + f_i(u),        i = 1..n,

for user-supplied functions f (the local inverse of the initial velocity
field).  Everything downstream is controlled by the matrix

    M(u, t) = J_f(u) + t I,

whose inverse carries the space and time derivatives of u(x, t) and whose
vanishing determinant marks derivative blow-up.  det M is a monic degree-n
polynomial in t; its real roots over u form the blow-up branches.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import Box, EvalDomainError, VectorFunction


class SingularNearBlowup(Exception):
    """Newton iterate hit a nearly singular M (close to the blow-up set)."""


class LeftDomain(Exception):
    """A Newton iterate left the admissible velocity box."""


class NoConvergence(Exception):
    """Newton failed to reach the residual target."""


@dataclass(frozen=True)
class HodographSystem:
    """Dimension-n system: component functions f over the velocity box."""

    f: VectorFunction
    domain: Box

    def __post_init__(self):
        if self.f.arity != self.domain.n:
            raise ValueError("function arity and domain dimension differ")

    @property
    def n(self) -> int:
        return self.domain.n


@dataclass(frozen=True)
class BlowupPolynomial:
    """Monic polynomial t^n + a_{n-1} t^{n-1} + ... + a_0 at a fixed u.

    ``coeffs`` holds (a_0, ..., a_{n-1}); a_0 equals det J_f(u).
    """

    coeffs: tuple

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def __call__(self, t):
        acc = np.ones_like(np.asarray(t, dtype=float))
        for a in reversed(self.coeffs):
            acc = acc * t + a
        return acc

    def roots(self) -> np.ndarray:
        """All complex roots, via the companion-matrix eigenproblem."""
        return np.roots(np.concatenate(([1.0], list(reversed(self.coeffs)))))


@dataclass(frozen=True)
class BranchSet:
    """Real roots of det M(u, t) = 0 at one velocity point.

    ``roots`` is a sorted tuple of (t, multiplicity); the total count with
    multiplicity is at most n and has the parity of n (complex roots pair).
    """

    roots: tuple

    def values(self) -> list[float]:
        return [t for t, m in self.roots for _ in range(m)]

    def positive(self) -> list[float]:
        return [t for t in self.values() if t > 0.0]

    def negative(self) -> list[float]:
        return [t for t in self.values() if t < 0.0]

    def min_positive(self):
        pos = self.positive()
        return min(pos) if pos else None

    def max_negative(self):
        neg = self.negative()
        return max(neg) if neg else None

    def __len__(self):
        return sum(m for _, m in self.roots)


@dataclass(frozen=True)
class SolutionSample:
    """One implicit solve of x = u t + f(u) with first derivatives.

    ``dudx`` is M^{-1} and ``dudt`` is -M^{-1} u, the exact derivative
    formulas away from the blow-up set.
    """

    x: np.ndarray
    t: float
    u: np.ndarray
    dudx: np.ndarray
    dudt: np.ndarray
    newton_iters: int
    residual: float


def build_M(sys: HodographSystem, u, t: float) -> np.ndarray:
    """M(u, t) = J_f(u) + t I."""
    return sys.f.jacobian(u) + t * np.eye(sys.n)


def _char_coeffs(A: np.ndarray) -> np.ndarray:
    """Coefficients (c_0..c_{n-1}) of det(s I - A) = s^n + sum c_k s^k.

    Faddeev-LeVerrier recursion; exact polynomial arithmetic up to rounding,
    no eigendecomposition involved.
    """
    n = A.shape[0]
    coeffs = np.empty(n)
    Mk = np.zeros_like(A)
    ck = 1.0
    eye = np.eye(n)
    for k in range(1, n + 1):
        Mk = A @ Mk + ck * eye
        ck = -np.trace(A @ Mk) / k
        coeffs[n - k] = ck
    return coeffs


def charpoly(sys: HodographSystem, u) -> BlowupPolynomial:
    """Blow-up polynomial det(J_f(u) + t I) as a monic polynomial in t."""
    coeffs = _char_coeffs(-sys.f.jacobian(u))
    return BlowupPolynomial(coeffs=tuple(float(c) for c in coeffs))


def _cluster_roots(ts, rel=1e-7):
    """Group nearly equal sorted values into (value, multiplicity) pairs."""
    clustered = []
    for t in sorted(ts):
        if clustered and abs(t - clustered[-1][0]) <= rel * (1.0 + abs(t)):
            prev, m = clustered[-1]
            clustered[-1] = (prev, m + 1)
        else:
            clustered.append((t, 1))
    return tuple(clustered)


def real_branches(sys: HodographSystem, u, tol_real: float = 1e-9) -> BranchSet:
    """Real blow-up times at u: t = -lambda for real eigenvalues of J_f(u).

    Eigenvalues come from the QR method on J_f directly, which is better
    conditioned than root-finding on the polynomial coefficients; the
    polynomial itself stays available through :func:`charpoly`.
    """
    lam = np.linalg.eigvals(sys.f.jacobian(u))
    ts = [
        -float(l.real)
        for l in lam
        if abs(l.imag) <= tol_real * (1.0 + abs(l.real))
    ]
    return BranchSet(roots=_cluster_roots(ts))


def _det_scale(M: np.ndarray) -> float:
    n = M.shape[0]
    return max(1.0, float(np.linalg.norm(M, np.inf))) ** n


def solve_u(
    sys: HodographSystem,
    x,
    t: float,
    guess,
    max_iter: int = 100,
) -> SolutionSample:
    """Invert x = u t + f(u) for u by damped Newton iteration.

    The residual r(u) = x - u t - f(u) has Jacobian -M, so each step solves
    M d = r.  Steps are halved (at most 30 times) until the residual norm
    decreases and the iterate stays inside the velocity box.  Convergence
    contract: max_i |r_i| <= 1e-10 (1 + |x|); iteration continues below the
    contract while it keeps improving, so finite-difference consumers see
    residuals near machine precision.
    """
    x = np.asarray(x, dtype=float)
    u = np.asarray(guess, dtype=float).copy()
    if not sys.domain.contains(u):
        raise LeftDomain(f"initial guess {u} outside the velocity box")
    scale_x = 1.0 + float(np.linalg.norm(x))
    contract = 1e-10 * scale_x
    polish_target = 1e-14 * scale_x

    def residual_at(point):
        return x - point * t - sys.f(point)

    r = residual_at(u)
    rnorm = float(np.max(np.abs(r)))
    iters = 0
    while rnorm > polish_target and iters < max_iter:
        M = build_M(sys, u, t)
        if abs(np.linalg.det(M)) < 1e-12 * _det_scale(M):
            raise SingularNearBlowup(
                f"|det M| below threshold at iterate {u} (t={t})"
            )
        step = np.linalg.solve(M, r)
        lam = 1.0
        accepted = False
        left_domain_only = True
        for _ in range(31):
            cand = u + lam * step
            if not sys.domain.contains(cand):
                lam *= 0.5
                continue
            left_domain_only = False
            try:
                r_cand = residual_at(cand)
            except EvalDomainError:
                lam *= 0.5
                continue
            cand_norm = float(np.max(np.abs(r_cand)))
            if cand_norm < rnorm:
                u, r, rnorm = cand, r_cand, cand_norm
                accepted = True
                break
            lam *= 0.5
        iters += 1
        if not accepted:
            if left_domain_only:
                raise LeftDomain(f"Newton iterates left the velocity box near {u}")
            break  # stalled; accept if the contract already holds
        if iters >= max_iter:
            break
    if rnorm > contract:
        raise NoConvergence(
            f"residual {rnorm:.3e} above {contract:.3e} after {iters} iterations"
        )
    M = build_M(sys, u, t)
    if abs(np.linalg.det(M)) < 1e-12 * _det_scale(M):
        raise SingularNearBlowup(f"converged onto the blow-up set at u={u}, t={t}")
    dudx = np.linalg.inv(M)
    return SolutionSample(
        x=x,
        t=float(t),
        u=u,
        dudx=dudx,
        dudt=-dudx @ u,
        newton_iters=iters,
        residual=rnorm,
    )


def pde_residual(sys: HodographSystem, x, t: float, h: float = 1e-5, guess=None) -> float:
    """Central-difference residual of u_t + (u . grad) u at (x, t).

    Solves the hodograph relations at the 2n+2 stencil points (warm-started
    from the center solve) and returns max_i |du_i/dt + sum_k u_k du_i/dx_k|.
    """
    x = np.asarray(x, dtype=float)
    n = sys.n
    if guess is None:
        guess = sys.domain.center
    center = solve_u(sys, x, t, guess)
    u0 = center.u
    dudx = np.empty((n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        up = solve_u(sys, x + e, t, u0)
        um = solve_u(sys, x - e, t, u0)
        dudx[:, k] = (up.u - um.u) / (2.0 * h)
    tp = solve_u(sys, x, t + h, u0)
    tm = solve_u(sys, x, t - h, u0)
    dudt = (tp.u - tm.u) / (2.0 * h)
    return float(np.max(np.abs(dudt + dudx @ u0)))
