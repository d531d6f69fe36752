"""Problem definitions: built-in demo systems and the problem-file format.

A problem couples a dimension with exactly one data source:

* ``hodograph``: n component functions f_i(u) (velocity variables),
* ``initial_data``: n initial velocity components u0_i(x),
* ``potential``: one scalar function of u whose gradient supplies f.

Built-ins carry both representations where a local inverse is available,
which is what the cross-method validation uses.  Problem files are flat
YAML (key/value plus lists), for example::

    dimension: 2
    hodograph: ["-atanh(u) + 2*atanh(v)", "atanh(u) - atanh(v)"]
    domain_lower: [-1, -1]
    domain_upper: [1, 1]
    margin: 0.02
    n_starts: 64
    seed: 0

Velocity variables are named u, v, w (or u1..un); space variables x, y, z
(or x1..xn).  Mixing the two conventions in one file is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from typing import Optional

import yaml

from .characteristics import InitialField
from .expr import Box, Expression, VectorFunction, parse
from .hodograph import HodographSystem
from .mappings import catalog
from .potential import PotentialSystem, from_potential


class ProblemFileError(Exception):
    """A problem file failed schema validation (or YAML parsing)."""


@dataclass
class SearchSettings:
    n_starts: int = 64
    seed: int = 0
    grid: Optional[int] = None  # per-dimension default when None
    margin: float = 0.02


@dataclass
class Problem:
    name: str
    n: int
    system: Optional[HodographSystem]
    field: Optional[InitialField]
    psys: Optional[PotentialSystem]
    settings: SearchSettings = dataclass_field(default_factory=SearchSettings)
    description: str = ""


def _c(x: float) -> str:
    """A float literal safe to splice into expression text."""
    r = repr(float(x))
    return f"({r})" if x < 0 else r


_LETTERS = {"u": ("u", "v", "w"), "x": ("x", "y", "z")}


def variable_names(n: int, kind: str, numbered: bool = False) -> list:
    if numbered or n > 3:
        return [f"{kind}{i + 1}" for i in range(n)]
    return list(_LETTERS[kind][:n])


def _parse_convention(texts, n: int, kind: str) -> list:
    """Parse expressions, enforcing a single naming convention.

    Both the letter names (u,v,w / x,y,z) and the numbered names
    (u1..un / x1..xn) are accepted, but mixing them is invalid.
    """
    letters = variable_names(n, kind) if n <= 3 else None
    numbered = variable_names(n, kind, numbered=True)
    union = (letters or []) + numbered
    used_letter = used_numbered = False
    for text in texts:
        expr = parse(text, union)
        for idx in expr.used_variables():
            if letters is not None and idx < len(letters):
                used_letter = True
            else:
                used_numbered = True
    if used_letter and used_numbered:
        raise ProblemFileError(
            f"expressions mix {'/'.join(letters)} with {'/'.join(numbered)}; "
            "pick one naming convention"
        )
    names = numbered if used_numbered or letters is None else letters
    return [parse(text, names) for text in texts]


def parse_components(texts, n: int, kind: str) -> VectorFunction:
    return VectorFunction(_parse_convention(texts, n, kind))


def parse_scalar(text: str, n: int, kind: str) -> Expression:
    return _parse_convention([text], n, kind)[0]


# ---------------------------------------------------------------------------
# Built-in problems


def _ex61() -> Problem:
    box = Box(lower=(-1.0, -1.0), upper=(1.0, 1.0), margin=0.02)
    system = HodographSystem(
        f=VectorFunction.parse(("-atanh(u) + 2*atanh(v)", "atanh(u) - atanh(v)"), ("u", "v")),
        domain=box,
    )
    field = InitialField(
        u0=VectorFunction.parse(("tanh(x + 2*y)", "tanh(x + y)"), ("x", "y")),
        sample_box=Box(lower=(-1.5, -1.5), upper=(1.5, 1.5), margin=0.02),
    )
    return Problem(
        name="ex61",
        n=2,
        system=system,
        field=field,
        psys=None,
        description="coupled tanh data on the open square; first catastrophe "
        "at t = 1 + sqrt(2) at the origin",
    )


def _ex62(eps: float = 2.0) -> Problem:
    denom = eps * eps - 1.0
    if denom == 0.0:
        raise ValueError("eps = 1 degenerates the data (u = v)")
    f1 = f"({_c(eps)}*atanh(v) - atanh(u))/{_c(denom)}"
    f2 = f"({_c(eps)}*atanh(u) - atanh(v))/{_c(denom)}"
    system = HodographSystem(
        f=VectorFunction.parse((f1, f2), ("u", "v")),
        domain=Box(lower=(-1.0, -1.0), upper=(1.0, 1.0), margin=0.02),
    )
    field = InitialField(
        u0=VectorFunction.parse(
            (f"tanh(x + {_c(eps)}*y)", f"tanh({_c(eps)}*x + y)"), ("x", "y")
        ),
        sample_box=Box(lower=(-2.0, -2.0), upper=(2.0, 2.0), margin=0.02),
    )
    return Problem(
        name="ex62",
        n=2,
        system=system,
        field=field,
        psys=None,
        description=f"cross-coupled tanh data, coupling eps = {eps}; catastrophe "
        "t_c = 1/(eps - 1) for eps > 1, none for 0 <= eps < 1",
    )


def _ex63(
    alpha: float = 1.0,
    beta: float = 0.0,
    gamma: float = 0.0,
    delta: float = 2.0,
    u0: float = 1.0,
    v0: float = 1.0,
) -> Problem:
    det = alpha * delta - beta * gamma
    if det == 0.0:
        raise ValueError("alpha*delta - beta*gamma must be nonzero")
    A = f"atanh(1 - u/{_c(u0)})"
    B = f"atanh(1 - v/{_c(v0)})"
    f1 = f"({_c(delta)}*{A} - {_c(beta)}*{B})/{_c(det)}"
    f2 = f"({_c(-gamma)}*{A} + {_c(alpha)}*{B})/{_c(det)}"
    system = HodographSystem(
        f=VectorFunction.parse((f1, f2), ("u", "v")),
        domain=Box(lower=(0.0, 0.0), upper=(2.0 * u0, 2.0 * v0), margin=0.02),
    )
    field = InitialField(
        u0=VectorFunction.parse(
            (
                f"{_c(u0)}*(1 - tanh({_c(alpha)}*x + {_c(beta)}*y))",
                f"{_c(v0)}*(1 - tanh({_c(gamma)}*x + {_c(delta)}*y))",
            ),
            ("x", "y"),
        ),
        sample_box=Box(lower=(-2.0, -2.0), upper=(2.0, 2.0), margin=0.02),
    )
    return Problem(
        name="ex63",
        n=2,
        system=system,
        field=field,
        psys=None,
        description="kink-profile data; decoupled catastrophe times "
        "1/(alpha u0) and 1/(delta v0)",
    )


def _ex64() -> Problem:
    field = InitialField(
        u0=VectorFunction.parse(("exp(-x^2 - y^2)", "exp(-x^2 - 2*y^2)"), ("x", "y")),
        sample_box=Box(lower=(-1.5, -1.5), upper=(1.5, 1.5), margin=0.02),
    )
    # Local inverse of the data near the catastrophe point (positive x, y):
    # x = sqrt(log v - 2 log u), y = sqrt(log u - log v).  Valid where
    # u^2 < v < u, which holds on this small box around the catastrophe.
    system = HodographSystem(
        f=VectorFunction.parse(
            ("sqrt(log(v) - 2*log(u))", "sqrt(log(u) - log(v))"), ("u", "v")
        ),
        domain=Box(lower=(0.68, 0.565), upper=(0.75, 0.64), margin=0.02),
    )
    return Problem(
        name="ex64",
        n=2,
        system=system,
        field=field,
        psys=None,
        description="Gaussian-bump data, analyzed by the direct "
        "characteristics method; t_c = 0.7281359",
    )


def _ex71() -> Problem:
    # Domain restricted to the neighborhood where the t = 0 map is regular,
    # so the positive branch has an interior minimum (t = sqrt(2) at 0).
    system = HodographSystem(
        f=VectorFunction.parse(
            ("-2*u^3 - 2*v - v^3", "-u - 5*v^3 - 3*u^3"), ("u", "v")
        ),
        domain=Box(lower=(-0.6, -0.6), upper=(0.6, 0.6), margin=0.02),
    )
    return Problem(
        name="ex71",
        n=2,
        system=system,
        field=None,
        psys=None,
        description="cubic map family, singular already at t = 0 on a curve "
        "outside the chosen velocity box",
    )


def _ex72() -> Problem:
    system = HodographSystem(
        f=VectorFunction.parse(
            ("-u^3/3 + 2*v^3/3 - u + 2*v", "u^3/3 - v^3/3 + u - v"), ("u", "v")
        ),
        domain=Box(lower=(-2.0, -2.0), upper=(2.0, 2.0), margin=0.02),
    )
    return Problem(
        name="ex72",
        n=2,
        system=system,
        field=None,
        psys=None,
        description="map family singular for t < 1 - sqrt(2), regular on "
        "(1 - sqrt(2), 1 + sqrt(2)), singular again above",
    )


def _ex73() -> Problem:
    system = HodographSystem(
        f=VectorFunction.parse(
            ("u^3/3 + 2*u*v^2/3 - 2*v", "v^3/3 + u^2*v/3 + u"), ("u", "v")
        ),
        domain=Box(lower=(-2.0, -2.0), upper=(2.0, 2.0), margin=0.02),
    )
    return Problem(
        name="ex73",
        n=2,
        system=system,
        field=None,
        psys=None,
        description="map family with no singularities at any t >= 0 "
        "(both branches stay negative)",
    )


def _ex81() -> Problem:
    system = HodographSystem(
        f=VectorFunction.parse(
            ("atanh(1 - 2*w)", "atanh(1 - 2*u)", "atanh(1 - 2*v)"), ("u", "v", "w")
        ),
        domain=Box(lower=(0.0, 0.0, 0.0), upper=(1.0, 1.0, 1.0), margin=0.02),
    )
    field = InitialField(
        u0=VectorFunction.parse(
            ("(1 - tanh(y))/2", "(1 - tanh(z))/2", "(1 - tanh(x))/2"), ("x", "y", "z")
        ),
        sample_box=Box(lower=(-2.0, -2.0, -2.0), upper=(2.0, 2.0, 2.0), margin=0.02),
    )
    return Problem(
        name="ex81",
        n=3,
        system=system,
        field=field,
        psys=None,
        description="cyclically coupled 3D kinks; t_c = 2 at u = (1/2,1/2,1/2), "
        "x_c = (1,1,1)",
    )


def _ex82(eps: float = -2.0) -> Problem:
    k = 1.0 + eps**3
    if k == 0.0:
        raise ValueError("eps = -1 degenerates the inversion")
    e1, e2 = _c(eps), _c(eps * eps)
    comps = (
        f"(atanh(u) - {e1}*atanh(v) + {e2}*atanh(w))/{_c(k)}",
        f"(atanh(v) - {e1}*atanh(w) + {e2}*atanh(u))/{_c(k)}",
        f"(atanh(w) - {e1}*atanh(u) + {e2}*atanh(v))/{_c(k)}",
    )
    system = HodographSystem(
        f=VectorFunction.parse(comps, ("u", "v", "w")),
        domain=Box(lower=(-1.0,) * 3, upper=(1.0,) * 3, margin=0.02),
    )
    field = InitialField(
        u0=VectorFunction.parse(
            (
                f"tanh(x + {e1}*y)",
                f"tanh(y + {e1}*z)",
                f"tanh(z + {e1}*x)",
            ),
            ("x", "y", "z"),
        ),
        sample_box=Box(lower=(-2.0,) * 3, upper=(2.0,) * 3, margin=0.02),
    )
    return Problem(
        name="ex82",
        n=3,
        system=system,
        field=field,
        psys=None,
        description=f"cyclically coupled 3D tanh data, eps = {eps}; catastrophe "
        "t_c = -1/(1 + eps) appears only for eps < -1",
    )


def _catalog_problem(name: str) -> Problem:
    entry = catalog()[name]
    return Problem(
        name=name,
        n=entry.system.n,
        system=entry.system,
        field=None,
        psys=None,
        description=f"built-in stable map '{name}' with closed-form Jacobian "
        f"{entry.closed_form_J.text()}",
    )


_BUILDERS = {
    "ex61": _ex61,
    "ex62": _ex62,
    "ex63": _ex63,
    "ex64": _ex64,
    "ex71": _ex71,
    "ex72": _ex72,
    "ex73": _ex73,
    "ex81": _ex81,
    "ex82": _ex82,
    "fold2d": lambda: _catalog_problem("fold2d"),
    "cusp2d": lambda: _catalog_problem("cusp2d"),
    "fold3d": lambda: _catalog_problem("fold3d"),
    "cusp3d": lambda: _catalog_problem("cusp3d"),
    "swallowtail": lambda: _catalog_problem("swallowtail"),
}

DEMO_NAMES = tuple(_BUILDERS)


def builtin_problem(name: str, **params) -> Problem:
    """Construct a built-in demo problem by name (ex61..ex82, fold2d..)."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        known = ", ".join(DEMO_NAMES)
        raise ProblemFileError(f"unknown demo {name!r}; known: {known}") from None
    return builder(**params)


# ---------------------------------------------------------------------------
# Problem files

_ALLOWED_KEYS = {
    "dimension",
    "hodograph",
    "initial_data",
    "potential",
    "domain_lower",
    "domain_upper",
    "margin",
    "n_starts",
    "seed",
    "grid",
}


def problem_from_mapping(data: dict, name: str = "problem") -> Problem:
    if not isinstance(data, dict):
        raise ProblemFileError("problem file must be a mapping of keys to values")
    unknown = set(data) - _ALLOWED_KEYS
    if unknown:
        raise ProblemFileError(f"unknown keys: {sorted(unknown)}")
    try:
        n = int(data["dimension"])
    except KeyError:
        raise ProblemFileError("missing key 'dimension'") from None
    if n < 1:
        raise ProblemFileError("dimension must be >= 1")
    sources = [k for k in ("hodograph", "initial_data", "potential") if k in data]
    if len(sources) != 1:
        raise ProblemFileError(
            "exactly one of 'hodograph', 'initial_data', 'potential' is required"
        )
    for key in ("domain_lower", "domain_upper"):
        if key not in data:
            raise ProblemFileError(f"missing key {key!r}")
        if not isinstance(data[key], (list, tuple)) or len(data[key]) != n:
            raise ProblemFileError(f"{key!r} must list {n} numbers")
    margin = float(data.get("margin", 0.02))
    box = Box(lower=tuple(data["domain_lower"]), upper=tuple(data["domain_upper"]), margin=margin)
    settings = SearchSettings(
        n_starts=int(data.get("n_starts", 64)),
        seed=int(data.get("seed", 0)),
        grid=int(data["grid"]) if "grid" in data else None,
        margin=margin,
    )

    system = field = psys = None
    kind = sources[0]
    if kind in ("hodograph", "initial_data"):
        texts = data[kind]
        if not isinstance(texts, (list, tuple)) or len(texts) != n:
            raise ProblemFileError(f"{kind!r} must list {n} expressions")
        vf = parse_components([str(t) for t in texts], n, "u" if kind == "hodograph" else "x")
        if kind == "hodograph":
            system = HodographSystem(f=vf, domain=box)
        else:
            field = InitialField(u0=vf, sample_box=box)
    else:
        W = parse_scalar(str(data["potential"]), n, "u")
        psys = from_potential(W, box)
        system = psys.sys
    return Problem(
        name=name,
        n=n,
        system=system,
        field=field,
        psys=psys,
        settings=settings,
        description=f"problem file ({kind})",
    )


def load_problem_file(path: str) -> Problem:
    """Load and validate a YAML problem file."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f" (line {mark.line + 1}, column {mark.column + 1})" if mark else ""
        raise ProblemFileError(f"YAML parse error{where}: {exc}") from None
    return problem_from_mapping(data, name=path)
