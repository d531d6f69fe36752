"""Two-dimensional theory in complex form.

With z = x + iy, V = u + iv and F = f + ig, the 2D relations read
z = V t + F(V, Vbar).  The Wirtinger derivatives of F recombine the real
Jacobian:

    F_V    = ((f_u + g_v) + i (g_u - f_v)) / 2,
    F_Vbar = ((f_u - g_v) + i (g_u + f_v)) / 2,

and the blow-up determinant factorizes as

    det M = (F_V + t)(conj(F_V) + t) - |F_Vbar|^2,

giving the closed-form branch pair

    t_pm = -Re F_V  +/-  sqrt(|F_Vbar|^2 - (Im F_V)^2).

Analytic F (F_Vbar = 0) therefore never blows up; the Beltrami dilation
mu = -F_Vbar / (conj(F_V) + t) reaches |mu| = 1 exactly on the blow-up
set whenever F_Vbar is nonzero.  Complex arithmetic stays inside this
module; the n-dimensional machinery elsewhere is purely real.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .hodograph import HodographSystem, real_branches


class DegenerateDenominator(Exception):
    """conj(F_V) + t vanished; the dilation is undefined at this (u, v, t)."""


@dataclass(frozen=True)
class ComplexSystem2D:
    """Complex-form view of a 2-dimensional hodograph system."""

    sys: HodographSystem

    def __post_init__(self):
        if self.sys.n != 2:
            raise ValueError("complex form needs a 2-dimensional system")


@dataclass(frozen=True)
class Classification2D:
    """Blow-up classification at one velocity point.

    ``delta`` is the branch discriminant; when it is non-negative the two
    roots ``t_minus <= t_plus`` exist and ``label`` encodes their signs:
    no-blowup, double-root, two-negative, two-positive, mixed, zero-root.
    """

    delta: float
    t_minus: Optional[float]
    t_plus: Optional[float]
    label: str
    trace: float
    j0: float


@dataclass(frozen=True)
class BeltramiDilation:
    mu: complex
    abs_mu: float
    quasiconformal: bool  # |mu| < 1


def wirtinger(sys2d: ComplexSystem2D, u: float, v: float) -> tuple:
    """(F_V, F_Vbar) at (u, v), from the real Jacobian of (f, g)."""
    J = sys2d.sys.f.jacobian((u, v))
    fu, fv = J[0]
    gu, gv = J[1]
    F_V = complex((fu + gv) / 2.0, (gu - fv) / 2.0)
    F_Vbar = complex((fu - gv) / 2.0, (gu + fv) / 2.0)
    return F_V, F_Vbar


def det_M_complex(sys2d: ComplexSystem2D, u: float, v: float, t: float) -> float:
    """det M through the complex factorization (real by construction)."""
    F_V, F_Vbar = wirtinger(sys2d, u, v)
    value = (F_V + t) * (np.conj(F_V) + t) - F_Vbar * np.conj(F_Vbar)
    return float(value.real)


def classify(sys2d: ComplexSystem2D, u: float, v: float) -> Classification2D:
    """Discriminant and branch-sign classification at one point.

    The discriminant is evaluated both as (tr J)^2 - 4 det J and as
    (f_u - g_v)^2 + 4 g_u f_v; the two must agree to 1e-10.  Labels come
    from the computed signs of the roots (the sign table alone does not
    separate all cases).
    """
    J = sys2d.sys.f.jacobian((u, v))
    fu, fv = J[0]
    gu, gv = J[1]
    trace = fu + gv
    j0 = fu * gv - fv * gu
    delta = trace * trace - 4.0 * j0
    delta_alt = (fu - gv) ** 2 + 4.0 * gu * fv
    scale = 1.0 + trace * trace + abs(j0)
    if abs(delta - delta_alt) > 1e-10 * scale:
        raise AssertionError(
            f"discriminant forms disagree: {delta!r} vs {delta_alt!r}"
        )
    tiny = 1e-12 * scale
    if delta < -tiny:
        return Classification2D(
            delta=delta, t_minus=None, t_plus=None, label="no-blowup", trace=trace, j0=j0
        )
    if abs(delta) <= tiny:
        t_double = -trace / 2.0
        return Classification2D(
            delta=delta, t_minus=t_double, t_plus=t_double, label="double-root", trace=trace, j0=j0
        )
    root = np.sqrt(delta)
    t_minus = (-trace - root) / 2.0
    t_plus = (-trace + root) / 2.0
    if min(abs(t_minus), abs(t_plus)) <= tiny:
        label = "zero-root"
    elif t_plus < 0.0:
        label = "two-negative"
    elif t_minus > 0.0:
        label = "two-positive"
    else:
        label = "mixed"
    return Classification2D(
        delta=delta, t_minus=float(t_minus), t_plus=float(t_plus), label=label, trace=trace, j0=j0
    )


def branch_formula_check(sys2d: ComplexSystem2D, u: float, v: float) -> float:
    """Compare the closed-form branch pair against the eigenvalue route.

    Returns the max root discrepancy when the radicand is non-negative;
    asserts the absence of real branches when it is negative.
    """
    F_V, F_Vbar = wirtinger(sys2d, u, v)
    radicand = abs(F_Vbar) ** 2 - F_V.imag**2
    scale = 1.0 + abs(F_V) ** 2 + abs(F_Vbar) ** 2
    branches = real_branches(sys2d.sys, (u, v))
    values = branches.values()
    if radicand < -1e-12 * scale:
        if values:
            raise AssertionError(
                f"negative radicand but real branches {values} found"
            )
        return 0.0
    root = np.sqrt(max(radicand, 0.0))
    formula = sorted([-F_V.real - root, -F_V.real + root])
    if len(values) != 2:
        raise AssertionError(
            f"branch count mismatch: formula 2, eigenvalues {len(values)}"
        )
    return float(max(abs(a - b) for a, b in zip(formula, sorted(values))))


def beltrami_mu(sys2d: ComplexSystem2D, u: float, v: float, t: float) -> BeltramiDilation:
    """Complex dilation mu = -F_Vbar / (conj(F_V) + t) at (u, v, t).

    |mu| < 1 marks quasi-conformal behavior; |mu| = 1 is exactly the
    blow-up condition when F_Vbar does not vanish.
    """
    F_V, F_Vbar = wirtinger(sys2d, u, v)
    denominator = np.conj(F_V) + t
    if abs(denominator) <= 1e-12:
        raise DegenerateDenominator(f"conj(F_V) + t = {denominator!r}")
    mu = complex(-F_Vbar / denominator)
    return BeltramiDilation(mu=mu, abs_mu=abs(mu), quasiconformal=abs(mu) < 1.0)
