import warnings

import numpy as np
import pytest
import scipy.sparse as sp

from anisofem.errors import ZeroEstimate
from anisofem.estimator import (HbEstimate, HbSystem, assemble_hb_system, element_bubble_stiffness,
                                element_hessian, element_hessians, estimate_energy_norm, evaluate,
                                gauss_seidel_estimate, hb_estimate, symmetric_gauss_seidel)
from anisofem.fem import FemSolution, energy_error, interpolate, solve_fem
from anisofem.mesh import Mesh, initial_lshape_mesh, refine_uniform, unit_square_mesh
from anisofem.problem import mitchell_lshape

from conftest import UNIT_SQUARE, linear_problem, single_triangle, square_x2_problem

# two triangles sharing the edge (1,0)-(0,1)
PAIR = Mesh(np.array([[0, 0], [1, 0], [1, 1], [0, 1]], dtype=float), np.array([-2, -3, -4, -5]),
            np.array([[0, 1, 3], [1, 2, 3]]), UNIT_SQUARE)


def _system(mesh, problem):
    s = solve_fem(mesh, problem)
    return s, assemble_hb_system(mesh, s, problem)


def _direct(system):
    return np.linalg.solve(system.matrix.toarray(), system.residual)


def test_single_triangle_has_empty_system():
    m = single_triangle([[0, 0], [1, 0], [0, 1]])
    p = linear_problem()
    sys_ = assemble_hb_system(m, interpolate(m, p.exact), p)
    assert sys_.matrix.shape == (0, 0) and len(sys_.residual) == 0


def test_zero_residual_for_exact_linear_solution():
    m = unit_square_mesh(3, center=True)
    p = linear_problem(1.0, -2.0)
    _, sys_ = _system(m, p)
    assert np.max(np.abs(sys_.residual)) <= 1e-12


def test_bubble_diagonal_on_pair():
    # on each half psi = 4xy (or its mirror image): int |grad psi|^2 = 16 (1/12 + 1/12) = 8/3
    sys_ = assemble_hb_system(PAIR, FemSolution(np.zeros(4)), linear_problem(0, 0))
    assert sys_.matrix.shape == (1, 1)
    assert sys_.matrix[0, 0] == pytest.approx(16 / 3, abs=1e-12)


def test_bubble_stiffness_matches_quadrature_oracle(rng):
    # grad psi_k is linear, so |grad psi|^2 is quadratic: a 3-point rule is exact
    coords = rng.uniform(-1, 1, size=(20, 3, 2))
    area = 0.5 * ((coords[:, 1, 0] - coords[:, 0, 0]) * (coords[:, 2, 1] - coords[:, 0, 1])
                  - (coords[:, 2, 0] - coords[:, 0, 0]) * (coords[:, 1, 1] - coords[:, 0, 1]))
    coords[area < 0] = coords[area < 0][:, ::-1]
    K = element_bubble_stiffness(coords)
    from anisofem.fem import barycentric_gradients
    g, A = barycentric_gradients(coords)
    pts = np.array([[2 / 3, 1 / 6, 1 / 6], [1 / 6, 2 / 3, 1 / 6], [1 / 6, 1 / 6, 2 / 3]])
    a, b = [1, 2, 0], [2, 0, 1]
    for t in range(20):
        grads = [4 * (pts[:, [a[k]]] * g[t, b[k]] + pts[:, [b[k]]] * g[t, a[k]]) for k in range(3)]
        oracle = np.array([[np.mean(np.sum(gi * gj, axis=1)) * A[t] for gj in grads] for gi in grads])
        assert np.allclose(K[t], oracle, rtol=1e-12, atol=1e-12)


def test_zero_residual_gives_zero_estimate():
    sys_ = HbSystem(sp.identity(3, format="csr"), np.zeros(3), np.arange(3), 3)
    with pytest.warns(ZeroEstimate):
        est = gauss_seidel_estimate(sys_)
    assert est.sweeps == 1 and est.is_zero and est.energy == 0.0


def test_energy_nondecreasing_across_sweeps():
    m = unit_square_mesh(3, center=True)
    p = square_x2_problem()
    _, sys_ = _system(m, p)
    B = sys_.matrix
    z = np.zeros(len(sys_.residual))
    energies = [0.0]
    for _ in range(8):
        symmetric_gauss_seidel(B, sys_.residual, z)
        energies.append(float(np.sqrt(z @ (B @ z))))
    assert all(e2 >= e1 - 1e-15 for e1, e2 in zip(energies, energies[1:]))
    exact = _direct(sys_)
    assert energies[-1] <= np.sqrt(exact @ (B @ exact)) * (1 + 1e-12)


def test_ten_sweeps_close_to_direct_solve():
    m = unit_square_mesh(3, center=True)
    assert 40 <= len(m.edge_table[0]) - len(m.boundary_edges) <= 60
    p = square_x2_problem()
    _, sys_ = _system(m, p)
    est = gauss_seidel_estimate(sys_, rel_change_tol=1e-12, max_sweeps=10)
    assert est.sweeps == 10
    exact = _direct(sys_)
    direct = np.sqrt(exact @ (sys_.matrix @ exact))
    assert abs(est.energy - direct) <= 0.2 * direct


@pytest.mark.parametrize("mesh, problem", [
    (unit_square_mesh(3, center=True), square_x2_problem),
    (unit_square_mesh(4), square_x2_problem),
    (refine_uniform(initial_lshape_mesh()), mitchell_lshape),
])
def test_tight_gauss_seidel_matches_direct_solve(mesh, problem):
    assert len(mesh.edge_table[0]) <= 100
    p = problem()
    s, sys_ = _system(mesh, p)
    est = gauss_seidel_estimate(sys_, rel_change_tol=1e-10, max_sweeps=10_000)
    exact = _direct(sys_)
    d = est.edge_coefficients[sys_.free_edges] - exact
    assert np.sqrt(d @ (sys_.matrix @ d)) <= 1e-6


def test_dirichlet_edges_carry_no_coefficient():
    m = refine_uniform(refine_uniform(initial_lshape_mesh()))
    p = mitchell_lshape()
    est = hb_estimate(m, solve_fem(m, p), p)
    assert np.all(est.edge_coefficients[m.boundary_edges] == 0.0)
    assert len(est.edge_coefficients) == len(m.edge_table[0])


def test_estimate_vanishes_at_vertices(rng):
    m = refine_uniform(refine_uniform(refine_uniform(initial_lshape_mesh())))
    p = mitchell_lshape()
    est = hb_estimate(m, solve_fem(m, p), p)
    assert not est.is_zero
    corners = np.repeat(np.eye(3)[None], m.n_triangles, axis=0)
    vals = evaluate(est, m, np.arange(m.n_triangles)[:, None], corners)
    assert np.all(vals == 0.0)
    # but not at edge midpoints
    mids = np.repeat(np.array([[[0, 0.5, 0.5], [0.5, 0, 0.5], [0.5, 0.5, 0]]]), m.n_triangles, axis=0)
    assert np.any(evaluate(est, m, np.arange(m.n_triangles)[:, None], mids) != 0.0)


def test_hessian_examples():
    m = single_triangle([[0, 0], [1, 0], [0, 1]])
    zero = HbEstimate(np.zeros(3), m.edge_table[0])
    assert np.array_equal(element_hessian(zero, 0, m), np.zeros((2, 2)))
    edges = m.edge_table[0]
    k = [i for i, e in enumerate(edges) if set(e) == {1, 2}][0]
    coeffs = np.zeros(3)
    coeffs[k] = 1.0
    H = element_hessian(HbEstimate(coeffs, edges), 0, m)
    assert np.allclose(H, [[0, 4], [4, 0]], atol=1e-14)


def test_hessians_symmetric_and_consistent(rng):
    m = refine_uniform(initial_lshape_mesh())
    est = HbEstimate(rng.standard_normal(len(m.edge_table[0])), m.edge_table[0])
    H = element_hessians(est, m)
    assert np.array_equal(H, np.swapaxes(H, 1, 2))
    for t in range(m.n_triangles):
        assert np.allclose(H[t], element_hessian(est, t, m), rtol=1e-13, atol=1e-13)


def test_hessian_matches_finite_differences(rng):
    m = single_triangle([[0.1, -0.2], [1.3, 0.4], [0.2, 0.9]])
    est = HbEstimate(rng.standard_normal(3), m.edge_table[0])
    H = element_hessian(est, 0, m)
    P = m.points
    T = np.column_stack([P[1] - P[0], P[2] - P[0]])

    def z(x):
        l12 = np.linalg.solve(T, x - P[0])
        bary = np.array([1 - l12.sum(), l12[0], l12[1]])
        return float(evaluate(est, m, 0, bary))

    x0, h = P.mean(axis=0), 1e-3
    fd = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            ei, ej = np.eye(2)[i] * h, np.eye(2)[j] * h
            fd[i, j] = (z(x0 + ei + ej) - z(x0 + ei - ej) - z(x0 - ei + ej) + z(x0 - ei - ej)) / (4 * h * h)
    assert np.allclose(H, fd, atol=1e-6)


def test_energy_norm_examples():
    assert estimate_energy_norm(HbEstimate(np.zeros(5), np.zeros((5, 2), int)), PAIR) == 0.0
    edges = PAIR.edge_table[0]
    coeffs = np.array([1.0 if set(e) == {1, 3} else 0.0 for e in edges])
    assert estimate_energy_norm(HbEstimate(coeffs, edges), PAIR) == pytest.approx(np.sqrt(16 / 3), abs=1e-12)


@pytest.mark.slow
def test_effectivity_band_on_uniform_meshes():
    from anisofem.adapt import quasi_uniform_mesh
    p = mitchell_lshape()
    for n in (4000, 16000, 32000):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            m, _ = quasi_uniform_mesh(initial_lshape_mesh(), n, seed=1)
        s = solve_fem(m, p)
        ratio = estimate_energy_norm(hb_estimate(m, s, p), m) / energy_error(m, s, p)
        assert 0.2 <= ratio <= 5, (n, ratio)
