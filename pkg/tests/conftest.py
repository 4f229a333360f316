import numpy as np
import pytest

from anisofem.mesh import Mesh, Polygon, unit_square_mesh
from anisofem.problem import manufactured

UNIT_SQUARE = Polygon(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))


def single_triangle(coords, domain=None):
    """A one-element mesh whose domain is the triangle itself."""
    coords = np.asarray(coords, dtype=float)
    dom = domain or Polygon(coords)
    return Mesh(coords, np.array([-2, -3, -4]), np.array([[0, 1, 2]]), dom)


def linear_problem(a=1.0, b=2.0, c=0.0, initial_mesh=None):
    kw = {} if initial_mesh is None else {"initial_mesh": initial_mesh}
    return manufactured("linear", lambda x, y: a * x + b * y + c,
                        lambda x, y: np.stack(np.broadcast_arrays(a + 0 * x, b + 0 * y), axis=-1),
                        **kw)


def square_x2_problem():
    return manufactured("x^2", lambda x, y: x**2 + 0 * y,
                        lambda x, y: np.stack(np.broadcast_arrays(2 * x, 0 * y), axis=-1),
                        laplacian=lambda x, y: 2.0 + 0 * x * y,
                        initial_mesh=lambda: unit_square_mesh(2))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
