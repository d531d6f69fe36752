"""Hodograph analysis of the n-dimensional homogeneous Euler equation.

The velocity field solves u_t + (u . grad) u = 0 implicitly through
x = u t + f(u).  This package computes the implicit solutions and their
derivatives, locates blow-up hypersurfaces and the first gradient
catastrophe, resolves the fine structure of derivative blow-ups, tracks
the singularities of the associated maps u -> x over time, and checks
everything against an independent method-of-characteristics route.
"""

from .blowup import (
    CatastropheReport,
    NoBranch,
    NormalFormData,
    NotSingular,
    NullSpaceData,
    adjugate,
    bounded_combination_check,
    catastrophe_search,
    normal_form,
    null_space,
)
from .characteristics import (
    FoldRegion,
    InitialField,
    direct_catastrophe,
    eigentimes,
    evolve,
    fold_region,
)
from .complex2d import (
    BeltramiDilation,
    Classification2D,
    ComplexSystem2D,
    DegenerateDenominator,
    beltrami_mu,
    branch_formula_check,
    classify,
    wirtinger,
)
from .expr import Box, EvalDomainError, Expression, ParseError, VectorFunction, parse
from .hodograph import (
    BlowupPolynomial,
    BranchSet,
    HodographSystem,
    LeftDomain,
    NoConvergence,
    SingularNearBlowup,
    SolutionSample,
    build_M,
    charpoly,
    pde_residual,
    real_branches,
    solve_u,
)
from .mappings import (
    BlowupTime,
    CatalogEntry,
    SingularLocus,
    TimelineInterval,
    catalog,
    collapse_probe,
    eulerian_jacobian,
    map_forward,
    singular_locus,
    singularity_timeline,
)
from .potential import (
    PotentialSystem,
    from_potential,
    gradient_map_check,
    is_potential,
    potential_branches,
)
from .problems import DEMO_NAMES, Problem, builtin_problem, load_problem_file

__version__ = "0.1.0"

__all__ = [
    "BeltramiDilation",
    "BlowupPolynomial",
    "BlowupTime",
    "Box",
    "BranchSet",
    "CatalogEntry",
    "CatastropheReport",
    "Classification2D",
    "ComplexSystem2D",
    "DEMO_NAMES",
    "DegenerateDenominator",
    "EvalDomainError",
    "Expression",
    "FoldRegion",
    "HodographSystem",
    "InitialField",
    "LeftDomain",
    "NoBranch",
    "NoConvergence",
    "NormalFormData",
    "NotSingular",
    "NullSpaceData",
    "ParseError",
    "PotentialSystem",
    "Problem",
    "SingularLocus",
    "SingularNearBlowup",
    "SolutionSample",
    "TimelineInterval",
    "VectorFunction",
    "adjugate",
    "beltrami_mu",
    "bounded_combination_check",
    "branch_formula_check",
    "build_M",
    "builtin_problem",
    "catalog",
    "catastrophe_search",
    "charpoly",
    "classify",
    "collapse_probe",
    "direct_catastrophe",
    "eigentimes",
    "eulerian_jacobian",
    "evolve",
    "fold_region",
    "from_potential",
    "gradient_map_check",
    "is_potential",
    "load_problem_file",
    "map_forward",
    "normal_form",
    "null_space",
    "parse",
    "pde_residual",
    "potential_branches",
    "real_branches",
    "singular_locus",
    "singularity_timeline",
    "solve_u",
    "wirtinger",
]
