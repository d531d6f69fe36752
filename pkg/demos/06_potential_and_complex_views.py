#!/usr/bin/env python3
"""Two structural viewpoints: gradient components and the complex 2D form.

Potential side: when f = grad W the matrix M is symmetric, so every branch
of the blow-up polynomial is real: potential flows always develop blow-ups,
in any dimension.  Complex side (n = 2): with V = u + iv and F = f + ig,
det M factorizes through the Wirtinger derivatives of F, analytic F never
blows up, and the Beltrami dilation mu hits |mu| = 1 exactly on the
blow-up set.
"""

import numpy as np

from eulerhodo import (
    Box,
    ComplexSystem2D,
    beltrami_mu,
    branch_formula_check,
    builtin_problem,
    classify,
    from_potential,
    gradient_map_check,
    is_potential,
    parse,
    potential_branches,
    real_branches,
    wirtinger,
)

print("== potential flows ==")
W = parse("u^2*v + (u^4 + v^4)/12", ["u", "v"])
psys = from_potential(W, Box(lower=(-1.5, -1.5), upper=(1.5, 1.5)))
print("W =", W.text())
print("is_potential:", is_potential(psys.sys, tol=1e-10))
rng = np.random.default_rng(3)
for point in rng.uniform(-1.0, 1.0, size=(3, 2)):
    branches = potential_branches(psys, point)
    print(f"  u = {np.round(point, 3)}: branches {np.round(branches.values(), 6)}"
          f"  (always {psys.sys.n} real)")
print("gradient-map identity residual:",
      f"{gradient_map_check(psys, (0.4, -0.7), 1.3):.1e}")
print("for contrast, the coupled-tanh system is not potential:",
      is_potential(builtin_problem('ex61').system, tol=1e-10))

print("\n== complex form of the coupled-tanh data ==")
sys2d = ComplexSystem2D(builtin_problem("ex61").system)
F_V, F_Vbar = wirtinger(sys2d, 0.0, 0.0)
print("F_V =", F_V, " F_Vbar =", F_Vbar)
c = classify(sys2d, 0.0, 0.0)
print(f"discriminant = {c.delta}, roots ({c.t_minus:.6f}, {c.t_plus:.6f}), "
      f"case: {c.label}")
print("closed-form branch pair vs eigenvalues: gap",
      f"{branch_formula_check(sys2d, 0.0, 0.0):.1e}")

t_c = 1.0 + np.sqrt(2.0)
for t in (1.0, 2.0, t_c):
    d = beltrami_mu(sys2d, 0.0, 0.0, t)
    tag = "blow-up!" if abs(d.abs_mu - 1) < 1e-9 else (
        "quasi-conformal" if d.quasiconformal else "expanding")
    print(f"  t = {t:.6f}: |mu| = {d.abs_mu:.9f}  ({tag})")

print("\n== analytic data never blow up ==")
from eulerhodo import HodographSystem, VectorFunction

analytic = ComplexSystem2D(HodographSystem(
    f=VectorFunction.parse(["u^2 - v^2", "2*u*v"], ["u", "v"]),  # F = V^2
    domain=Box(lower=(-2.0, -2.0), upper=(2.0, 2.0)),
))
point = (0.7, 0.4)
print("F = V^2 at", point, "-> classification:", classify(analytic, *point).label)
print("real branches:", real_branches(analytic.sys, point).values())
print("mu =", beltrami_mu(analytic, *point, 1.0).mu, "(conformal)")
