import math

import numpy as np
import pytest

from anisofem.errors import EvaluationAtSingularity
from anisofem.problem import (corner_grad, corner_laplacian, corner_term, exact_grad, exact_u,
                              get_problem, layer_laplacian, layer_term, mitchell_lshape,
                              polar_angle, source_f)


def random_lshape_points(rng, n, min_r=0.05):
    out = []
    while len(out) < n:
        x, y = rng.uniform(-0.98, 0.98, size=2)
        if (x > 0 and y < 0) or math.hypot(x, y) < min_r or (x > -0.02 and y < 0.02 and (x > 0 or y < 0)):
            continue
        out.append((x, y))
    return np.array(out)


def test_value_at_origin():
    assert exact_u(0.0, 0.0) == pytest.approx(0.0, abs=1e-12)


def test_value_at_half_half():
    # independent evaluation of the dominant terms
    r, theta = math.sqrt(0.5), math.pi / 4
    expected = r ** (2 / 3) * math.sin(2 * theta / 3) + math.atan(200 * (math.sqrt(1.8125) - 0.75))
    expected += math.exp(-1000 * ((0.5 + math.sqrt(5) / 4) ** 2 + 0.75**2)) + math.exp(-150)
    assert exact_u(0.5, 0.5) == pytest.approx(expected, rel=1e-14)
    assert exact_u(0.5, 0.5) == pytest.approx(1.95926, abs=5e-6)


def test_boundary_layer_value_on_bottom_edge():
    xs = np.linspace(-1, 0, 7)
    assert np.allclose(layer_term(xs, -1.0 + 0 * xs), 1.0, rtol=0, atol=0)


def test_theta_branch():
    assert polar_angle(1.0, 0.0) == 0.0
    assert polar_angle(0.0, -1.0) == pytest.approx(1.5 * math.pi)
    # corner term vanishes on both edges meeting at the reentrant corner
    assert corner_term(0.5, 0.0) == pytest.approx(0.0, abs=1e-15)
    assert corner_term(0.0, -0.5) == pytest.approx(0.0, abs=1e-15)


def test_corner_gradient_magnitude(rng):
    p = random_lshape_points(rng, 50)
    r = np.hypot(p[:, 0], p[:, 1])
    g = corner_grad(p[:, 0], p[:, 1])
    assert np.allclose(np.linalg.norm(g, axis=-1), (2 / 3) * r ** (-1 / 3), rtol=1e-13)


def test_gradient_matches_central_differences():
    h = 1e-6
    x, y = 0.5, 0.5
    fd = np.array([(exact_u(x + h, y) - exact_u(x - h, y)) / (2 * h),
                   (exact_u(x, y + h) - exact_u(x, y - h)) / (2 * h)])
    g = exact_grad(x, y)
    assert np.linalg.norm(g - fd) <= 1e-5 * np.linalg.norm(g)


def test_singularity_at_origin():
    with pytest.raises(EvaluationAtSingularity):
        exact_grad(0.0, 0.0)
    with pytest.raises(EvaluationAtSingularity):
        source_f(0.0, 0.0)


def test_layer_laplacian():
    y = np.linspace(-1, 1, 9)
    assert np.allclose(layer_laplacian(0 * y, y), 1e4 * np.exp(-100 * (y + 1)), rtol=1e-15)


def test_corner_term_is_harmonic(rng):
    p = random_lshape_points(rng, 100)
    assert np.all(corner_laplacian(p[:, 0], p[:, 1]) == 0.0)
    # and numerically: 5-point Laplacian relative to |grad| / r is O(h^2)
    h = 1e-3
    x, y = p[:, 0], p[:, 1]
    lap = (corner_term(x + h, y) + corner_term(x - h, y) + corner_term(x, y + h)
           + corner_term(x, y - h) - 4 * corner_term(x, y)) / h**2
    scale = np.linalg.norm(corner_grad(x, y), axis=-1) / np.hypot(x, y)
    assert np.max(np.abs(lap) / scale) < 1e-2


def test_source_matches_finite_difference_laplacian():
    rng = np.random.default_rng(2024)
    p = random_lshape_points(rng, 20)
    h = 1e-4
    x, y = p[:, 0], p[:, 1]
    lap = (exact_u(x + h, y) + exact_u(x - h, y) + exact_u(x, y + h) + exact_u(x, y - h)
           - 4 * exact_u(x, y)) / h**2
    f = source_f(x, y)
    assert np.all(np.abs(f + lap) <= 1e-4 * np.abs(f) + 1e-6)


def test_boundary_is_exact_solution():
    p = mitchell_lshape()
    assert p.boundary is p.exact
    pts = np.array([[-1, 0.3], [0.4, 1.0], [0.0, -0.5], [0.6, 0.0]])
    assert np.array_equal(p.boundary(pts[:, 0], pts[:, 1]), p.exact(pts[:, 0], pts[:, 1]))


def test_registry():
    assert get_problem("mitchell-lshape").name == "mitchell-lshape"
    with pytest.raises(KeyError):
        get_problem("no-such-problem")
