"""Globally defined hierarchical basis error estimate.

The estimate ``z_h`` lives in the span of the quadratic edge bubbles
``psi_e = 4 lambda_a lambda_b`` of all interior edges.  Its coefficients solve
(approximately) the global residual problem

    sum_e' (grad psi_e', grad psi_e) z_e' = (f, psi_e) - (grad u_h, grad psi_e),

relaxed with a few symmetric Gauss-Seidel sweeps.  Bubbles vanish at every
vertex, so the nodal interpolant of ``z_h`` is identically zero.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numba
import numpy as np
import scipy.sparse as sp

from .errors import ZeroEstimate
from .fem import DEFAULT_QUAD_DEGREE, FemSolution, barycentric_gradients, quadrature_points
from .mesh import Mesh
from .problem import TestProblem

DEFAULT_GS_TOL = 1e-2
DEFAULT_GS_MAX_SWEEPS = 20

# local edge k joins local vertices (k+1, k+2)
_A = np.array([1, 2, 0])
_B = np.array([2, 0, 1])


@dataclass
class HbSystem:
    """Bubble-space stiffness ``matrix`` and residual on the free (interior) edges."""

    matrix: sp.csr_matrix
    residual: np.ndarray
    free_edges: np.ndarray
    n_edges: int


@dataclass
class HbEstimate:
    """Bubble coefficients for every mesh edge (zero on Dirichlet edges)."""

    edge_coefficients: np.ndarray
    edges: np.ndarray
    sweeps: int = 0
    energy: float = 0.0

    @property
    def is_zero(self) -> bool:
        return not np.any(self.edge_coefficients)


def element_bubble_stiffness(coords):
    """(T, 3, 3) matrices ``int_K grad psi_k . grad psi_l`` for local edges k, l."""
    g, area = barycentric_gradients(coords)
    G = np.einsum("tid,tjd->tij", g, g)
    M = (np.ones((3, 3)) + np.eye(3)) / 12.0
    a, b = _A, _B
    out = np.empty((len(area), 3, 3))
    for k in range(3):
        for l in range(3):
            ak, bk, al, bl = a[k], b[k], a[l], b[l]
            out[:, k, l] = 16.0 * (M[ak, al] * G[:, bk, bl] + M[ak, bl] * G[:, bk, al]
                                   + M[bk, al] * G[:, ak, bl] + M[bk, bl] * G[:, ak, al])
    return out * area[:, None, None]


def element_bubble_load(coords, f, degree):
    """(T, 3) integrals ``int_K f psi_k``."""
    pts, w, bary = quadrature_points(coords, degree)
    psi = 4.0 * bary[:, _A] * bary[:, _B]
    fv = f(pts[..., 0], pts[..., 1])
    return np.einsum("tq,tq,qk->tk", w, fv, psi)


def assemble_hb_system(mesh: Mesh, solution: FemSolution, problem: TestProblem,
                       quad_degree=DEFAULT_QUAD_DEGREE) -> HbSystem:
    edges, tri_edges = mesh.edge_table
    free = np.ones(len(edges), dtype=bool)
    free[mesh.boundary_edges] = False
    free_edges = np.flatnonzero(free)
    local = np.full(len(edges), -1, dtype=np.int64)
    local[free_edges] = np.arange(len(free_edges))
    nf = len(free_edges)
    if nf == 0:
        return HbSystem(sp.csr_matrix((0, 0)), np.zeros(0), free_edges, len(edges))

    coords = mesh.points[mesh.triangles]
    Kb = element_bubble_stiffness(coords)
    g, area = barycentric_gradients(coords)
    guh = np.einsum("ti,tid->td", solution.values[mesh.triangles], g)
    # int_K grad psi_k = (4 |K| / 3) (grad lambda_a + grad lambda_b) = -(4 |K| / 3) grad lambda_k
    grad_int = -(4.0 / 3.0) * area[:, None, None] * g
    re = element_bubble_load(coords, problem.source, quad_degree) - np.einsum("td,tkd->tk", guh, grad_int)

    idx = local[tri_edges]
    rows = np.repeat(idx, 3, axis=1).ravel()
    cols = np.tile(idx, (1, 3)).ravel()
    keep = (rows >= 0) & (cols >= 0)
    B = sp.csr_matrix((Kb.ravel()[keep], (rows[keep], cols[keep])), shape=(nf, nf))
    B.sum_duplicates()
    B.sort_indices()
    ok = idx.ravel() >= 0
    r = np.bincount(idx.ravel()[ok], weights=re.ravel()[ok], minlength=nf)
    return HbSystem(B, r, free_edges, len(edges))


@numba.njit(cache=True)
def _sgs_sweep(indptr, indices, data, rhs, x):
    n = len(rhs)
    for order in range(2):
        for k in range(n):
            i = k if order == 0 else n - 1 - k
            s = rhs[i]
            diag = 0.0
            for p in range(indptr[i], indptr[i + 1]):
                j = indices[p]
                if j == i:
                    diag = data[p]
                else:
                    s -= data[p] * x[j]
            x[i] = s / diag


def symmetric_gauss_seidel(A, b, x, sweeps=1):
    """In-place symmetric (forward then backward) Gauss-Seidel sweeps."""
    A = sp.csr_matrix(A)
    for _ in range(sweeps):
        _sgs_sweep(A.indptr, A.indices, A.data, np.asarray(b, dtype=float), x)
    return x


def gauss_seidel_estimate(system: HbSystem, rel_change_tol=DEFAULT_GS_TOL,
                          max_sweeps=DEFAULT_GS_MAX_SWEEPS, edges=None) -> HbEstimate:
    """Relax the bubble system from zero until the estimate's energy settles.

    Sweeping stops when ``|eta_new - eta_old| / eta_new < rel_change_tol``,
    with ``eta`` the energy norm of the current iterate, or after
    ``max_sweeps`` sweeps.  A vanishing residual yields the zero estimate
    after one sweep and a `ZeroEstimate` warning.
    """
    if not 0 < rel_change_tol < 1:
        raise ValueError("rel_change_tol must lie in (0, 1)")
    coeffs = np.zeros(system.n_edges)
    edges = np.zeros((system.n_edges, 2), dtype=np.int64) if edges is None else edges
    if not np.any(system.residual):
        warnings.warn("hierarchical basis residual is identically zero", ZeroEstimate, stacklevel=2)
        return HbEstimate(coeffs, edges, sweeps=1, energy=0.0)
    B = system.matrix
    z = np.zeros(len(system.residual))
    eta_old = 0.0
    sweeps = 0
    while sweeps < max_sweeps:
        symmetric_gauss_seidel(B, system.residual, z)
        sweeps += 1
        eta = float(np.sqrt(max(z @ (B @ z), 0.0)))
        if eta > 0 and abs(eta - eta_old) / eta < rel_change_tol:
            break
        eta_old = eta
    coeffs[system.free_edges] = z
    return HbEstimate(coeffs, edges, sweeps=sweeps, energy=eta)


def hb_estimate(mesh: Mesh, solution: FemSolution, problem: TestProblem,
                quad_degree=DEFAULT_QUAD_DEGREE, rel_change_tol=DEFAULT_GS_TOL,
                max_sweeps=DEFAULT_GS_MAX_SWEEPS) -> HbEstimate:
    system = assemble_hb_system(mesh, solution, problem, quad_degree)
    return gauss_seidel_estimate(system, rel_change_tol, max_sweeps, edges=mesh.edge_table[0])


def element_coefficients(est: HbEstimate, mesh: Mesh) -> np.ndarray:
    return est.edge_coefficients[mesh.edge_table[1]]


def element_hessians(est: HbEstimate, mesh: Mesh) -> np.ndarray:
    """(T, 2, 2) constant Hessians of ``z_h`` restricted to each triangle."""
    g, _ = barycentric_gradients(mesh.points[mesh.triangles])
    z = element_coefficients(est, mesh)
    ga, gb = g[:, _A, :], g[:, _B, :]
    outer = np.einsum("tki,tkj->tkij", ga, gb)
    return 4.0 * np.einsum("tk,tkij->tij", z, outer + np.swapaxes(outer, -1, -2))


def element_hessian(est: HbEstimate, t: int, mesh: Mesh) -> np.ndarray:
    g, _ = barycentric_gradients(mesh.points[mesh.triangles[t:t + 1]])
    z = element_coefficients(est, mesh)[t]
    H = np.zeros((2, 2))
    for k in range(3):
        o = np.outer(g[0, _A[k]], g[0, _B[k]])
        H += 4.0 * z[k] * (o + o.T)
    return H


def estimate_energy_norm(est: HbEstimate, mesh: Mesh) -> float:
    """``|z_h|_{H^1}`` summed element by element."""
    z = element_coefficients(est, mesh)
    Kb = element_bubble_stiffness(mesh.points[mesh.triangles])
    return float(np.sqrt(max(np.einsum("tk,tkl,tl->", z, Kb, z), 0.0)))


def evaluate(est: HbEstimate, mesh: Mesh, t, bary) -> np.ndarray:
    """Value of ``z_h`` in triangle(s) ``t`` at barycentric coordinates ``bary`` (..., 3)."""
    bary = np.asarray(bary, dtype=float)
    z = element_coefficients(est, mesh)[t]
    psi = 4.0 * bary[..., _A] * bary[..., _B]
    return np.sum(z * psi, axis=-1)
