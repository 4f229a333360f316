"""Element-wise metric tensors for H^1-seminorm adaptation.

For an element Hessian ``H`` of the error estimate and regularization
parameter ``alpha`` the metric is

    B = I + |H| / alpha
    M = ||B||_2 * det(B)^(-1/4) * B

where ``|H|`` takes absolute values of the eigenvalues.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import UniformField
from .mesh import Mesh


@dataclass
class MetricField:
    """Per-element SPD tensors (T, 2, 2) and the regularization parameter used."""

    tensors: np.ndarray
    alpha: float = np.inf

    def scaled(self, c: float) -> "MetricField":
        return MetricField(c * self.tensors, self.alpha)

    def isotropic(self) -> "MetricField":
        """Same density, no orientation: ``sqrt(det M) I``."""
        return MetricField(isotropic_part(self.tensors), self.alpha)


def absolute_tensor(H) -> np.ndarray:
    """Replace the eigenvalues of symmetric tensor(s) by their absolute values."""
    H = np.asarray(H, dtype=float)
    lam, V = np.linalg.eigh(H)
    return np.einsum("...ik,...k,...jk->...ij", V, np.abs(lam), V)


def metric_tensor(H, alpha) -> np.ndarray:
    """Optimal metric for (..., 2, 2) Hessians ``H``.

    ``alpha`` is a positive scalar or an array matching the leading shape of ``H``.
    """
    alpha = np.asarray(alpha, dtype=float)
    if not np.all(alpha > 0):
        raise ValueError("alpha must be positive")
    H = np.asarray(H, dtype=float)
    B = np.eye(2) + absolute_tensor(H) / alpha[..., None, None]
    lam = np.linalg.eigvalsh(B)
    norm = lam[..., -1]
    det = lam[..., 0] * lam[..., 1]
    return (norm * det ** -0.25)[..., None, None] * B


def _hessian_eigs(hessians):
    return np.abs(np.linalg.eigvalsh(np.asarray(hessians, dtype=float)))


def calibration_functional(alpha, abs_eigs, areas) -> float:
    """``sum |K| det(I + |H_K| / alpha)^(1/4)``; strictly decreasing in ``alpha``."""
    det = (1.0 + abs_eigs[:, 0] / alpha) * (1.0 + abs_eigs[:, 1] / alpha)
    return float(np.sum(areas * det**0.25))


def calibrate_alpha(hessians, areas, rel_tol=1e-3) -> float:
    """Choose ``alpha`` so that ``sum |K| det(B_K)^(1/4) = 2 sum |K|``.

    Bisection in ``log(alpha)`` on the bracket ``[1e-12 h_max, h_max]`` (grown
    geometrically when needed), where ``h_max`` is the largest Hessian
    eigenvalue magnitude.  Stops once the residual relative to the total area
    is below ``rel_tol / 10``.
    """
    eigs = _hessian_eigs(hessians)
    areas = np.asarray(areas, dtype=float)
    h_max = float(eigs.max(initial=0.0))
    if not h_max > 0:
        raise UniformField("all element Hessians vanish")
    total = float(np.sum(areas))
    target = 2.0 * total

    def F(a):
        return calibration_functional(a, eigs, areas) - target

    lo, hi = 1e-12 * h_max, h_max
    while F(lo) < 0:
        lo *= 1e-3
    while F(hi) > 0:
        hi *= 10.0
    for _ in range(200):
        mid = np.sqrt(lo * hi)
        fm = F(mid)
        if abs(fm) <= 0.1 * rel_tol * total or hi / lo - 1 < 1e-14:
            return float(mid)
        if fm > 0:
            lo = mid
        else:
            hi = mid
    return float(np.sqrt(lo * hi))


def isotropic_part(tensors) -> np.ndarray:
    det = np.linalg.det(tensors)
    return np.sqrt(det)[..., None, None] * np.eye(2)


def metric_field(hessians, areas) -> MetricField:
    """Calibrated metric field; a vanishing Hessian field gives ``M = I``."""
    hessians = np.asarray(hessians, dtype=float)
    try:
        alpha = calibrate_alpha(hessians, areas)
    except UniformField:
        return MetricField(np.broadcast_to(np.eye(2), hessians.shape).copy(), np.inf)
    return MetricField(metric_tensor(hessians, alpha), alpha)


def vertex_metrics(mesh: Mesh, field: MetricField) -> np.ndarray:
    """Area-weighted arithmetic mean of the incident element tensors at each vertex."""
    w = mesh.areas
    acc = np.zeros((mesh.n_vertices, 2, 2))
    wsum = np.zeros(mesh.n_vertices)
    for k in range(3):
        np.add.at(acc, mesh.triangles[:, k], w[:, None, None] * field.tensors)
        np.add.at(wsum, mesh.triangles[:, k], w)
    return acc / wsum[:, None, None]


def write_metric(field: MetricField, path) -> None:
    """Rows ``element_id m11 m12 m22``."""
    T = field.tensors
    lines = [f"{i} {m[0, 0]:.17g} {m[0, 1]:.17g} {m[1, 1]:.17g}" for i, m in enumerate(T)]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


def read_metric(path) -> MetricField:
    data = np.loadtxt(path, ndmin=2)
    T = np.empty((len(data), 2, 2))
    T[:, 0, 0], T[:, 0, 1], T[:, 1, 0], T[:, 1, 1] = data[:, 1], data[:, 2], data[:, 2], data[:, 3]
    return MetricField(T)


def intersect(M1, M2) -> np.ndarray:
    """Metric intersection: the smallest metric at least as fine as both inputs.

    Uses simultaneous reduction: with ``M1 = L L^T`` and the eigenpairs
    ``(mu, W)`` of ``L^-1 M2 L^-T``, the result is ``L W diag(max(1, mu)) W^T L^T``.
    """
    L = np.linalg.cholesky(M1)
    Linv = np.linalg.inv(L)
    C = Linv @ M2 @ np.swapaxes(Linv, -1, -2)
    C = 0.5 * (C + np.swapaxes(C, -1, -2))
    mu, W = np.linalg.eigh(C)
    LW = L @ W
    return np.einsum("...ik,...k,...jk->...ij", LW, np.maximum(mu, 1.0), LW)


def gradate(mesh: Mesh, tensors, hgrad=1.5, max_sweeps=20) -> np.ndarray:
    """Limit the growth of element size between neighboring vertices.

    Along every mesh edge the metric of one end, relaxed by the factor
    ``(1 + log(hgrad) * L)^-2`` with ``L`` the metric length of the edge,
    is intersected into the other end.  Repeated until nothing changes.
    """
    M = np.array(tensors, dtype=float)
    edges, _ = mesh.edge_table
    src = np.concatenate([edges[:, 0], edges[:, 1]])
    dst = np.concatenate([edges[:, 1], edges[:, 0]])
    # round r handles the r-th incoming edge of every vertex, so no vertex is
    # updated twice within one batch
    order = np.argsort(dst, kind="stable")
    src, dst = src[order], dst[order]
    first = np.searchsorted(dst, dst)
    slot = np.arange(len(dst)) - first
    rounds = [np.flatnonzero(slot == r) for r in range(int(slot.max()) + 1)]
    beta = np.log(hgrad)
    pts = mesh.points
    for _ in range(max_sweeps):
        changed = 0
        for sel in rounds:
            i, j = src[sel], dst[sel]
            e = pts[j] - pts[i]
            Li = np.sqrt(np.einsum("ni,nij,nj->n", e, M[i], e))
            eta = 1.0 + beta * Li
            cand = M[i] / (eta * eta)[:, None, None]
            new = intersect(M[j], cand)
            diff = np.abs(new - M[j]).max(axis=(1, 2)) > 1e-9 * np.abs(M[j]).max(axis=(1, 2))
            if np.any(diff):
                changed += int(np.count_nonzero(diff))
                M[j[diff]] = new[diff]
        if changed == 0:
            break
    return M
