import numpy as np
import pytest

from eulerhodo.expr import VectorFunction


def poly_text(rng, names, degree=4, terms=None):
    """Random polynomial text over the given variable names."""
    if terms is None:
        terms = int(rng.integers(2, 6))
    parts = []
    for _ in range(terms):
        powers = rng.integers(0, degree + 1, size=len(names))
        while powers.sum() > degree:
            powers = rng.integers(0, degree + 1, size=len(names))
        c = float(rng.uniform(-2.0, 2.0))
        factors = [f"({c!r})"]
        for name, p in zip(names, powers):
            if p == 1:
                factors.append(name)
            elif p > 1:
                factors.append(f"{name}^{int(p)}")
        parts.append("*".join(factors))
    return " + ".join(parts)


def random_polynomial_vf(rng, n, degree=4):
    names = [f"u{i + 1}" for i in range(n)]
    return VectorFunction.parse([poly_text(rng, names, degree) for _ in range(n)], names)


def fd_jacobian(vf, point, h=1e-6):
    point = np.asarray(point, dtype=float)
    n = point.size
    J = np.empty((n, n))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        J[:, k] = (vf(point + e) - vf(point - e)) / (2.0 * h)
    return J


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
