#!/usr/bin/env python3
"""Fine structure at a blow-up point: what stays finite while du/dx diverges.

At a blow-up point M is rank deficient and du/dx = adj(M)/det(M).  All
entries diverge like 1/eps as t passes through the blow-up time, but the
contractions along the null vectors of the adjugate remain bounded: whole
subspaces of derivative combinations survive the catastrophe.  This script
measures those rates on the coupled-tanh data (ex61) and prints the local
normal-form data, which turns out fully degenerate there (the displacement
is cubic in the velocity variation, not the generic fold square root).
"""

import numpy as np

from eulerhodo import (
    bounded_combination_check,
    builtin_problem,
    collapse_probe,
    normal_form,
    null_space,
)

system = builtin_problem("ex61").system
u_c = (0.0, 0.0)
t_c = 1.0 + np.sqrt(2.0)

data = null_space(system, u_c, t_c)
print("rank M =", data.rank)
print("right null vector R   =", np.round(data.right[:, 0], 6), " (prop. to (-sqrt2, 1))")
print("left  null vector L   =", np.round(data.left[:, 0], 6), " (prop. to (1, -sqrt2))")
print("adjugate null vectors =", np.round(data.right_adj[:, 0], 6),
      np.round(data.left_adj[:, 0], 6))
print("A1 = tr adj M =", round(data.a1, 9), " (= 2 sqrt 2)")

report = bounded_combination_check(system, u_c, t_c, (1e-2, 1e-3, 1e-4))
print("\n|du/dx| at t_c + eps:", [f"{v:.3e}" for v in report.dudx_norms])
print(f"growth exponent of |du/dx|: {report.norm_slope:+.3f}  (expected -1)")
print(f"adjugate-direction combos:  {report.right_slope:+.3f} / {report.left_slope:+.3f}"
      "  (bounded: slope ~ 0)")

nf = normal_form(system, u_c, t_c)
print("\nquadratic normal-form data degenerate:", nf.degenerate)

probe = collapse_probe(system, u_c, t_c)
print("collapse rate of |dx| along the kernel:", [f"{s:.2f}" for s in probe.radial_slopes],
      "(cubic here; a generic fold gives 2)")

print("\nFor contrast, the fold map at a singular point:")
from eulerhodo import catalog

fold = catalog()["fold2d"].system
t = 0.6
probe_fold = collapse_probe(fold, (-t / 2.0, 0.2), t)
print("fold collapse rates:", [f"{s:.2f}" for s in probe_fold.radial_slopes],
      "degenerate:", probe_fold.degenerate)
