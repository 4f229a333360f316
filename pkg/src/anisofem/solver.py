"""Sparse SPD linear algebra: PCG, diagonal scaling, 2-norm condition numbers."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal
from scipy.sparse.linalg import splu

from .errors import FactorizationFailure, NonpositiveDiagonal, SolverDivergence

log = logging.getLogger(__name__)

LANCZOS_MAX_ITER = 300


def cg_solve(A, b, rel_tol=1e-10, max_iter=None, return_info=False):
    """Jacobi-preconditioned conjugate gradients from a zero initial guess.

    Stops once ``||A x - b||_2 <= rel_tol * ||b||_2`` (true residual checked
    at exit).  Raises `SolverDivergence` when ``max_iter`` is exceeded.
    """
    if not 0 < rel_tol < 1:
        raise ValueError("rel_tol must lie in (0, 1)")
    b = np.asarray(b, dtype=float)
    n = len(b)
    if max_iter is None:
        max_iter = max(100, 10 * n)
    x = np.zeros(n)
    bnorm = np.linalg.norm(b)
    info = {"iterations": 0, "residual": 0.0}
    if bnorm == 0.0:
        return (x, info) if return_info else x
    dinv = 1.0 / A.diagonal()
    r = b.copy()
    z = dinv * r
    p = z.copy()
    rz = r @ z
    target = rel_tol * bnorm
    it = 0
    while True:
        rnorm = np.linalg.norm(r)
        if rnorm <= target:
            # guard against drift of the recursive residual
            rtrue = np.linalg.norm(b - A @ x)
            if rtrue <= target:
                break
            r = b - A @ x
            z = dinv * r
            p = z.copy()
            rz = r @ z
        if it >= max_iter:
            raise SolverDivergence(f"CG did not reach {rel_tol:g} in {max_iter} iterations "
                                   f"(relative residual {rnorm / bnorm:.3e})")
        Ap = A @ p
        alpha = rz / (p @ Ap)
        x += alpha * p
        r -= alpha * Ap
        z = dinv * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
        it += 1
    info["iterations"] = it
    info["residual"] = float(np.linalg.norm(b - A @ x) / bnorm)
    return (x, info) if return_info else x


def diagonal_scale(A) -> sp.csr_matrix:
    """Return ``D^{-1/2} A D^{-1/2}`` with ``D = diag(A)`` (unit diagonal)."""
    A = sp.csr_matrix(A)
    d = A.diagonal()
    if np.any(d <= 0):
        raise NonpositiveDiagonal(f"{int(np.count_nonzero(d <= 0))} nonpositive diagonal entries")
    s = sp.diags(1.0 / np.sqrt(d))
    S = (s @ A @ s).tocsr()
    S.setdiag(1.0)
    return S


@dataclass
class ConditionReport:
    lambda_max: float
    lambda_min: float
    kappa: float
    scaled: bool
    iterations_used: tuple[int, int]


def lanczos_largest(matvec, n, rel_tol=1e-8, max_iter=LANCZOS_MAX_ITER, rng=None):
    """Largest eigenvalue of a symmetric operator by Lanczos with full reorthogonalization.

    Returns ``(theta, iterations, converged)``.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    k_max = min(max_iter, n)
    Q = np.zeros((n, k_max + 1))
    q = rng.standard_normal(n)
    Q[:, 0] = q / np.linalg.norm(q)
    alpha, beta = [], []
    theta = 0.0
    for k in range(k_max):
        w = matvec(Q[:, k])
        a = Q[:, k] @ w
        w -= a * Q[:, k]
        if k > 0:
            w -= beta[-1] * Q[:, k - 1]
        for _ in range(2):
            w -= Q[:, :k + 1] @ (Q[:, :k + 1].T @ w)
        alpha.append(a)
        b = np.linalg.norm(w)
        if k == 0:
            vals, vecs = np.array([a]), np.ones((1, 1))
        else:
            vals, vecs = eigh_tridiagonal(np.array(alpha), np.array(beta))
        theta = vals[-1]
        resid = abs(b * vecs[-1, -1])
        bound = resid
        if len(vals) > 1 and vals[-1] > vals[-2]:
            bound = min(resid, resid**2 / (vals[-1] - vals[-2]))
        if b <= 1e-14 * abs(theta) or bound <= rel_tol * abs(theta):
            return float(theta), k + 1, True
        beta.append(b)
        Q[:, k + 1] = w / b
    return float(theta), k_max, False


def _spd_factor(A):
    A = sp.csc_matrix(A)
    try:
        lu = splu(A, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                  options={"SymmetricMode": True})
    except RuntimeError as exc:
        raise FactorizationFailure(str(exc)) from exc
    piv = lu.U.diagonal()
    if np.any(piv <= 0) or np.any(lu.perm_r != lu.perm_c):
        raise FactorizationFailure("symmetric factorization produced a nonpositive pivot")
    return lu


def condition_number(A, rel_tol=1e-8, scale=False, seed=42) -> ConditionReport:
    """Spectral condition number of an SPD matrix.

    The largest eigenvalue comes from Lanczos on ``A``; the smallest from
    inverse iteration on a sparse symmetric factorization, accelerated by
    running the same Lanczos recurrence on ``A^{-1}``.
    """
    if rel_tol > 1e-6:
        raise ValueError("rel_tol must be <= 1e-6")
    A = sp.csr_matrix(A)
    if scale:
        A = diagonal_scale(A)
    n = A.shape[0]
    rng = np.random.default_rng(seed)
    lu = _spd_factor(A)
    lmax, it_max, ok_max = lanczos_largest(lambda v: A @ v, n, rel_tol, LANCZOS_MAX_ITER, rng)
    inv_max, it_min, ok_min = lanczos_largest(lu.solve, n, rel_tol, LANCZOS_MAX_ITER, rng)
    if not (ok_max and ok_min):
        log.warning("Lanczos hit the %d-iteration cap (n=%d)", LANCZOS_MAX_ITER, n)
    lmin = 1.0 / inv_max
    return ConditionReport(lmax, lmin, max(1.0, lmax / lmin), scale, (it_max, it_min))
