"""Test problems: exact solution, gradient, source and Dirichlet data.

The multi-feature problem on the L-shaped domain combines a reentrant
corner singularity, a circular arctangent wavefront, a Gaussian peak and an
exponential boundary layer:

    u = r^(2/3) sin(2 theta / 3)
        + atan(200 (sqrt(x^2 + (y + 3/4)^2) - 3/4))
        + exp(-1000 ((x + sqrt(5)/4)^2 + (y + 1/4)^2))
        + exp(-100 (y + 1))

All derivatives are analytic, term by term.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EvaluationAtSingularity
from .mesh import Mesh, initial_lshape_mesh

FRONT_STEEPNESS = 200.0
FRONT_CENTER = (0.0, -0.75)
FRONT_RADIUS = 0.75
PEAK_STRENGTH = 1000.0
PEAK_CENTER = (-np.sqrt(5.0) / 4.0, -0.25)
LAYER_STRENGTH = 100.0


@dataclass(frozen=True)
class TestProblem:
    """Dirichlet Poisson problem ``-Laplace(u) = source`` with ``u = boundary``."""

    __test__ = False  # keep pytest from collecting this class

    name: str
    exact: Callable
    exact_grad: Callable
    source: Callable
    boundary: Callable
    initial_mesh: Callable[[], Mesh] = initial_lshape_mesh


def polar_angle(x, y):
    """Polar angle in [0, 2 pi); on the L-shape this covers [0, 3 pi / 2]."""
    theta = np.arctan2(y, x)
    return np.where(theta < 0, theta + 2 * np.pi, theta)


def _check_origin(x, y):
    if np.any((np.asarray(x) == 0) & (np.asarray(y) == 0)):
        raise EvaluationAtSingularity("gradient is singular at the reentrant corner (0, 0)")


def corner_term(x, y):
    r = np.hypot(x, y)
    return r ** (2.0 / 3.0) * np.sin(2.0 / 3.0 * polar_angle(x, y))


def corner_grad(x, y):
    _check_origin(x, y)
    r = np.hypot(x, y)
    th = polar_angle(x, y)
    s = 2.0 / 3.0 * r ** (-1.0 / 3.0)
    return np.stack([-s * np.sin(th / 3.0), s * np.cos(th / 3.0)], axis=-1)


def corner_laplacian(x, y):
    # harmonic away from the origin
    _check_origin(x, y)
    return np.zeros(np.broadcast(x, y).shape)


def _front_parts(x, y):
    dx, dy = x - FRONT_CENTER[0], y - FRONT_CENTER[1]
    rho = np.hypot(dx, dy)
    s = FRONT_STEEPNESS * (rho - FRONT_RADIUS)
    return dx, dy, rho, s


def front_term(x, y):
    return np.arctan(_front_parts(x, y)[3])


def front_grad(x, y):
    dx, dy, rho, s = _front_parts(x, y)
    g = FRONT_STEEPNESS / (1.0 + s * s) / rho
    return np.stack([g * dx, g * dy], axis=-1)


def front_laplacian(x, y):
    # d/drho of a radial profile g(rho): g' + g / rho
    _, _, rho, s = _front_parts(x, y)
    g = FRONT_STEEPNESS / (1.0 + s * s)
    dg = -2.0 * FRONT_STEEPNESS**2 * s / (1.0 + s * s) ** 2
    return dg + g / rho


def _peak_parts(x, y):
    dx, dy = x - PEAK_CENTER[0], y - PEAK_CENTER[1]
    q = dx * dx + dy * dy
    return dx, dy, q, np.exp(-PEAK_STRENGTH * q)


def peak_term(x, y):
    return _peak_parts(x, y)[3]


def peak_grad(x, y):
    dx, dy, _, e = _peak_parts(x, y)
    return np.stack([-2 * PEAK_STRENGTH * dx * e, -2 * PEAK_STRENGTH * dy * e], axis=-1)


def peak_laplacian(x, y):
    _, _, q, e = _peak_parts(x, y)
    a = PEAK_STRENGTH
    return (4 * a * a * q - 4 * a) * e


def layer_term(x, y):
    return np.exp(-LAYER_STRENGTH * (y + 1.0)) + 0.0 * x


def layer_grad(x, y):
    e = layer_term(x, y)
    return np.stack([np.zeros_like(e), -LAYER_STRENGTH * e], axis=-1)


def layer_laplacian(x, y):
    return LAYER_STRENGTH**2 * layer_term(x, y)


def exact_u(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return corner_term(x, y) + front_term(x, y) + peak_term(x, y) + layer_term(x, y)


def exact_grad(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return corner_grad(x, y) + front_grad(x, y) + peak_grad(x, y) + layer_grad(x, y)


def source_f(x, y):
    """``f = -Laplace(u)``; the corner term is harmonic and contributes nothing."""
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return -(corner_laplacian(x, y) + front_laplacian(x, y)
             + peak_laplacian(x, y) + layer_laplacian(x, y))


def mitchell_lshape() -> TestProblem:
    return TestProblem("mitchell-lshape", exact_u, exact_grad, source_f, exact_u)


def manufactured(name, exact, grad, laplacian=None, initial_mesh=initial_lshape_mesh) -> TestProblem:
    """Problem with a user-supplied solution; ``laplacian`` defaults to zero."""
    if laplacian is None:
        def source(x, y):
            return np.zeros(np.broadcast(x, y).shape)
    else:
        def source(x, y):
            return -laplacian(x, y)
    return TestProblem(name, exact, grad, source, exact, initial_mesh)


PROBLEMS = {"mitchell-lshape": mitchell_lshape}


def get_problem(name: str) -> TestProblem:
    try:
        return PROBLEMS[name]()
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; known: {sorted(PROBLEMS)}") from None
