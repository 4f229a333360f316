"""Linear finite elements for the Dirichlet Poisson problem."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import DegenerateElement, SolverDivergence
from .mesh import DEGENERACY_TOL, Mesh, signed_areas
from .problem import TestProblem
from .quadrature import triangle_rule

DEFAULT_QUAD_DEGREE = 8


@dataclass
class FemSolution:
    """Nodal values at all vertices; boundary entries hold the Dirichlet data."""

    values: np.ndarray
    iterations: int = 0
    residual: float = 0.0


def barycentric_gradients(coords):
    """Gradients of the barycentric functions.

    Parameters
    ----------
    coords : (T, 3, 2) array
        Vertex coordinates per triangle.

    Returns
    -------
    grads : (T, 3, 2) array
    area : (T,) array
    """
    coords = np.asarray(coords, dtype=float)
    area = signed_areas(coords)
    e2 = np.sum((coords[:, [1, 2, 0]] - coords[:, [2, 0, 1]]) ** 2, axis=-1).max(axis=1)
    if np.any(area <= DEGENERACY_TOL * e2):
        raise DegenerateElement("zero or negative area element in assembly")
    x, y = coords[..., 0], coords[..., 1]
    gx = (y[:, [1, 2, 0]] - y[:, [2, 0, 1]]) / (2 * area[:, None])
    gy = (x[:, [2, 0, 1]] - x[:, [1, 2, 0]]) / (2 * area[:, None])
    return np.stack([gx, gy], axis=-1), area


def element_stiffness(coords) -> np.ndarray:
    """(T, 3, 3) element matrices ``|K| grad(phi_i) . grad(phi_j)``."""
    g, area = barycentric_gradients(coords)
    return area[:, None, None] * np.einsum("tik,tjk->tij", g, g)


def quadrature_points(coords, degree):
    """Physical quadrature points (T, Q, 2) and weights (T, Q) including area."""
    bary, w = triangle_rule(degree)
    coords = np.asarray(coords, dtype=float)
    pts = np.einsum("qi,tid->tqd", bary, coords)
    area = np.abs(signed_areas(coords))
    return pts, area[:, None] * w[None, :], bary


def element_load(coords, f, degree=DEFAULT_QUAD_DEGREE) -> np.ndarray:
    """(T, 3) element load vectors ``int_K f phi_i``."""
    pts, w, bary = quadrature_points(coords, degree)
    fv = f(pts[..., 0], pts[..., 1])
    return np.einsum("tq,tq,qi->ti", w, fv, bary)


def assemble_full_stiffness(mesh: Mesh) -> sp.csr_matrix:
    """Stiffness matrix over all vertices (singular; rows sum to zero)."""
    K = element_stiffness(mesh.points[mesh.triangles])
    t = mesh.triangles
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    n = mesh.n_vertices
    return sp.csr_matrix((K.ravel(), (rows, cols)), shape=(n, n))


def assemble_stiffness(mesh: Mesh) -> sp.csr_matrix:
    """Stiffness matrix restricted to interior vertices (SPD)."""
    inner = np.flatnonzero(mesh.interior)
    return assemble_full_stiffness(mesh)[inner][:, inner].tocsr()


def assemble_load(mesh: Mesh, problem: TestProblem, quad_degree=DEFAULT_QUAD_DEGREE) -> np.ndarray:
    """Interior load vector with the Dirichlet lifting folded in."""
    if not 2 <= quad_degree <= 10:
        raise ValueError(f"quad_degree must be in [2, 10], got {quad_degree}")
    Fe = element_load(mesh.points[mesh.triangles], problem.source, quad_degree)
    F = np.bincount(mesh.triangles.ravel(), weights=Fe.ravel(), minlength=mesh.n_vertices)
    inner = np.flatnonzero(mesh.interior)
    bnd = np.flatnonzero(~mesh.interior)
    g = problem.boundary(mesh.points[bnd, 0], mesh.points[bnd, 1])
    A = assemble_full_stiffness(mesh)
    return F[inner] - A[inner][:, bnd] @ g


def solve_fem(mesh: Mesh, problem: TestProblem, quad_degree=DEFAULT_QUAD_DEGREE,
              rel_tol=1e-14, max_iter=None, required_tol=1e-10) -> FemSolution:
    """Solve for the interior values with Jacobi-preconditioned CG.

    CG aims at ``rel_tol`` so that linear solutions are reproduced to
    rounding level; if it stalls before that, the solve is repeated with the
    looser ``required_tol``, which is the accuracy the result must meet.
    """
    from .solver import cg_solve

    inner = np.flatnonzero(mesh.interior)
    bnd = np.flatnonzero(~mesh.interior)
    values = np.empty(mesh.n_vertices)
    values[bnd] = problem.boundary(mesh.points[bnd, 0], mesh.points[bnd, 1])
    if len(inner) == 0:
        values[inner] = 0.0
        return FemSolution(values)
    A = assemble_stiffness(mesh)
    F = assemble_load(mesh, problem, quad_degree)
    if max_iter is None:
        max_iter = max(1000, 10 * len(inner))
    try:
        x, info = cg_solve(A, F, rel_tol=rel_tol, max_iter=max_iter, return_info=True)
    except SolverDivergence:
        if rel_tol >= required_tol:
            raise
        x, info = cg_solve(A, F, rel_tol=required_tol, max_iter=max_iter, return_info=True)
    values[inner] = x
    return FemSolution(values, info["iterations"], info["residual"])


def energy_error(mesh: Mesh, solution: FemSolution, problem: TestProblem,
                 quad_degree=DEFAULT_QUAD_DEGREE) -> float:
    """``|u - u_h|_{H^1}`` by element quadrature against the exact gradient."""
    return float(np.sqrt(np.sum(element_energy_error2(mesh, solution, problem, quad_degree))))


def element_energy_error2(mesh: Mesh, solution: FemSolution, problem: TestProblem,
                          quad_degree=DEFAULT_QUAD_DEGREE) -> np.ndarray:
    if not 2 <= quad_degree <= 10:
        raise ValueError(f"quad_degree must be in [2, 10], got {quad_degree}")
    coords = mesh.points[mesh.triangles]
    g, _ = barycentric_gradients(coords)
    guh = np.einsum("ti,tid->td", solution.values[mesh.triangles], g)
    pts, w, _ = quadrature_points(coords, quad_degree)
    gu = problem.exact_grad(pts[..., 0], pts[..., 1])
    d = gu - guh[:, None, :]
    return np.sum(w * np.sum(d * d, axis=-1), axis=1)


def interpolate(mesh: Mesh, func) -> FemSolution:
    """Nodal interpolant of ``func`` as a solution object."""
    return FemSolution(np.asarray(func(mesh.points[:, 0], mesh.points[:, 1]), dtype=float))
