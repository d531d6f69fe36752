"""Potential flows: gradient component functions and guaranteed-real branches.

When the component functions come from a scalar potential, f = grad W, the
matrix M = Hess W + t I is symmetric, so the blow-up polynomial is the
characteristic polynomial of a real symmetric matrix: all n branches are
real and every such solution develops a derivative blow-up, in any
dimension.  The branch computation below goes through a symmetric
eigensolver, which guarantees real output by construction instead of
relying on an imaginary-part tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .expr import Add, Box, Expression, Mul, Num, Pow, Var
from .hodograph import BranchSet, HodographSystem, _cluster_roots
from .mappings import map_forward


class GradientVectorFunction:
    """grad W presented with the VectorFunction interface.

    Derivatives come from one-order-higher jets of W itself: the Jacobian
    of grad W is Hess W (symmetric bitwise) and the component Hessians are
    the third-derivative blocks of W.
    """

    def __init__(self, W: Expression):
        self.W = W
        self.variables = W.variables

    @property
    def arity(self) -> int:
        return self.W.arity

    def __call__(self, point) -> np.ndarray:
        return self.W.gradient(point)

    def jacobian(self, point) -> np.ndarray:
        return self.W.hessian(point)

    def hessians(self, point) -> np.ndarray:
        return self.W.third(point)

    def eval_grid(self, coords) -> np.ndarray:
        return self.W.gradient_grid(coords)

    def jacobian_grid(self, coords) -> np.ndarray:
        return self.W.hessian_grid(coords)

    def __str__(self):
        return f"grad({self.W.text()})"


@dataclass(frozen=True)
class PotentialSystem:
    """A hodograph system whose components are the gradient of W."""

    W: Expression
    sys: HodographSystem


def from_potential(W: Expression, domain: Box) -> PotentialSystem:
    """Build the system with f = grad W on the given velocity box."""
    if W.arity != domain.n:
        raise ValueError("potential arity and domain dimension differ")
    return PotentialSystem(W=W, sys=HodographSystem(f=GradientVectorFunction(W), domain=domain))


def is_potential(sys: HodographSystem, tol: float = 1e-10) -> bool:
    """Is J_f symmetric (to tol) over a 10-per-axis interior sample?"""
    coords = np.meshgrid(*sys.domain.axes(10), indexing="ij")
    J = sys.f.jacobian_grid(coords)
    asym = np.max(np.abs(J - np.swapaxes(J, 0, 1)))
    return bool(asym <= tol)


def potential_branches(psys: PotentialSystem, u) -> BranchSet:
    """All n blow-up times at u, real by symmetry: t_i = -eig_i(Hess W)."""
    lam = np.linalg.eigvalsh(psys.sys.f.jacobian(u))
    return BranchSet(roots=_cluster_roots([-float(l) for l in lam]))


def _wstar_expression(W: Expression, t: float) -> Expression:
    """W*(u) = (t/2) sum u_i^2 + W(u), assembled as a new AST."""
    ast = W.ast
    half_t = Num(t / 2.0)
    for i in range(W.arity):
        ast = Add(ast, Mul(half_t, Pow(Var(i), Num(2.0))))
    return Expression(ast=ast, variables=W.variables)


def gradient_map_check(psys: PotentialSystem, u, t: float) -> float:
    """Residual of the gradient-map identity x = grad W*, W* = t|u|^2/2 + W.

    The map u t + grad W and the gradient of the assembled W* are computed
    through different expression trees, so agreement is a real consistency
    check rather than a tautology (still expected at the 1e-12 level).
    """
    lhs = map_forward(psys.sys, u, t)
    rhs = _wstar_expression(psys.W, t).gradient(u)
    return float(np.max(np.abs(lhs - rhs)))
