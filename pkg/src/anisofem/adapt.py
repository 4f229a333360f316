"""Metric-conforming local remeshing and the outer adaptation loop.

The remesher makes a mesh quasi-uniform in a Riemannian metric by repeated
passes of edge splitting, edge collapsing, edge flipping and vertex
smoothing.  Each operation is applied in batches of non-interfering edges so
that a pass costs a handful of vectorized sweeps over the mesh.
"""
from __future__ import annotations

import logging
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from matplotlib.tri import Triangulation
from scipy.spatial import cKDTree

from .errors import AdaptationStall
from .estimator import element_hessians, estimate_energy_norm, hb_estimate
from .fem import DEFAULT_QUAD_DEGREE, FemSolution, solve_fem
from .mesh import INTERIOR, Mesh, signed_areas, write_mesh
from .metric import MetricField, gradate, metric_field, vertex_metrics
from .problem import TestProblem

log = logging.getLogger(__name__)

# metric area of the unit-edge equilateral triangle
UNIT_TRIANGLE_AREA = np.sqrt(3.0) / 4.0
_QUALITY_NORM = 4.0 * np.sqrt(3.0)
MODES = ("uniform", "isotropic", "anisotropic")


@dataclass
class AdaptParams:
    """Remesher and outer-loop settings.

    Attributes
    ----------
    long_threshold, short_threshold : float
        Metric edge lengths outside this band are split or collapsed.
    max_local_passes : int
        Cap on split/collapse/flip/smooth passes per remesh.
    uniformity_target : float
        Fraction of in-band edges at which a remesh may stop.
    outer_max_iters, outer_element_tol : int, float
        Cap and relative-change stopping rule of the outer loop.
    gradation : float or None
        Largest size ratio per unit metric length allowed between
        neighbouring vertices of the background metric; None disables it.
    min_quality : float
        Collapses and smoothing moves may not create elements of lower
        metric quality than this unless the neighbourhood already has them.
    """

    long_threshold: float = np.sqrt(2.0)
    short_threshold: float = 1.0 / np.sqrt(2.0)
    max_local_passes: int = 30
    uniformity_target: float = 0.95
    outer_max_iters: int = 10
    outer_element_tol: float = 0.05
    smoothing_damping: float = 0.5
    flip_rounds: int = 6
    gradation: float | None = 3.0
    min_quality: float = 0.3

    def __post_init__(self):
        if not self.short_threshold < 1.0 < self.long_threshold:
            raise ValueError("need short_threshold < 1 < long_threshold")


class ConstantMetric:
    """The same tensor everywhere."""

    def __init__(self, tensor):
        self.tensor = np.asarray(tensor, dtype=float).reshape(2, 2)

    def __call__(self, pts, fallback=None):
        return np.broadcast_to(self.tensor, (len(pts), 2, 2)).copy()


class BackgroundMetric:
    """Piecewise-linear interpolation of vertex tensors on a background mesh."""

    def __init__(self, mesh: Mesh, vertex_tensors):
        self.mesh = mesh
        self.tensors = np.asarray(vertex_tensors, dtype=float)
        tri = Triangulation(mesh.points[:, 0], mesh.points[:, 1], mesh.triangles)
        self._finder = tri.get_trifinder()
        self._tree = None

    @classmethod
    def from_field(cls, mesh: Mesh, field: MetricField, hgrad=None) -> "BackgroundMetric":
        vm = vertex_metrics(mesh, field)
        if hgrad is not None:
            vm = gradate(mesh, vm, hgrad)
        return cls(mesh, vm)

    def __call__(self, pts, fallback=None):
        pts = np.asarray(pts, dtype=float).reshape(-1, 2)
        out = np.empty((len(pts), 2, 2))
        if len(pts) == 0:
            return out
        t = np.asarray(self._finder(pts[:, 0], pts[:, 1]))
        ok = t >= 0
        if np.any(ok):
            tri = self.mesh.triangles[t[ok]]
            c = self.mesh.points[tri]
            area = signed_areas(c)
            p = pts[ok]
            l1 = signed_areas(np.stack([c[:, 0], p, c[:, 2]], axis=1)) / area
            l2 = signed_areas(np.stack([c[:, 0], c[:, 1], p], axis=1)) / area
            lam = np.clip(np.stack([1 - l1 - l2, l1, l2], axis=1), 0.0, 1.0)
            lam /= lam.sum(axis=1, keepdims=True)
            out[ok] = np.einsum("pk,pkij->pij", lam, self.tensors[tri])
        miss = np.flatnonzero(~ok)
        if len(miss):
            if fallback is not None:
                out[miss] = fallback[miss]
            else:
                if self._tree is None:
                    self._tree = cKDTree(self.mesh.points)
                _, nearest = self._tree.query(pts[miss])
                out[miss] = self.tensors[nearest]
        return out


def _as_metric_source(mesh: Mesh, metric, hgrad=None):
    if isinstance(metric, MetricField):
        return BackgroundMetric.from_field(mesh, metric, hgrad)
    if isinstance(metric, (BackgroundMetric, ConstantMetric)):
        return metric
    if callable(metric):
        return lambda pts, fallback=None: np.asarray(metric(pts), dtype=float).reshape(-1, 2, 2)
    return ConstantMetric(metric)


def metric_edge_length(a, b, Ma, Mb):
    """``sqrt(e^T (Ma + Mb)/2 e)`` with ``e = b - a``; broadcasts over leading axes."""
    e = np.asarray(b, dtype=float) - np.asarray(a, dtype=float)
    M = 0.5 * (np.asarray(Ma, dtype=float) + np.asarray(Mb, dtype=float))
    return np.sqrt(np.einsum("...i,...ij,...j->...", e, M, e))


def _edge_lengths(pts, vm, edges):
    return metric_edge_length(pts[edges[:, 0]], pts[edges[:, 1]], vm[edges[:, 0]], vm[edges[:, 1]])


def metric_quality(coords, tensors):
    """Shape quality in the metric, 1 for a metric-equilateral triangle.

    ``coords`` is (n, 3, 2) and ``tensors`` the (n, 3, 2, 2) vertex metrics;
    the element metric is their mean.
    """
    M = tensors.mean(axis=1)
    area = signed_areas(coords)
    e = coords[:, [1, 2, 0]] - coords[:, [2, 0, 1]]
    l2 = np.einsum("nki,nij,nkj->n", e, M, e)
    det = M[:, 0, 0] * M[:, 1, 1] - M[:, 0, 1] * M[:, 1, 0]
    return _QUALITY_NORM * np.sqrt(np.maximum(det, 0.0)) * area / l2


def _vertex_tensors(mesh: Mesh, metric):
    if isinstance(metric, MetricField):
        return vertex_metrics(mesh, metric)
    return _as_metric_source(mesh, metric)(mesh.points)


def edge_metric_lengths(mesh: Mesh, metric) -> np.ndarray:
    return _edge_lengths(mesh.points, _vertex_tensors(mesh, metric), mesh.edge_table[0])


def m_uniformity(mesh: Mesh, metric, params: AdaptParams | None = None) -> float:
    """Fraction of edges whose metric length lies in the accepted band."""
    params = params or AdaptParams()
    L = edge_metric_lengths(mesh, metric)
    return float(np.mean((L >= params.short_threshold) & (L <= params.long_threshold)))


class _Remesher:
    """Mutable working state for `adapt_mesh`."""

    def __init__(self, mesh: Mesh, source, params: AdaptParams):
        self.pts = mesh.points.copy()
        self.tags = mesh.tags.copy()
        self.tris = mesh.triangles.copy()
        self.domain = mesh.domain
        self.source = source
        self.params = params
        self.vm = source(self.pts)

    def mesh(self) -> Mesh:
        return Mesh(self.pts, self.tags, self.tris, self.domain)

    def lengths(self, m: Mesh):
        return _edge_lengths(self.pts, self.vm, m.edge_table[0])

    def uniformity(self) -> float:
        L = self.lengths(self.mesh())
        p = self.params
        return float(np.mean((L >= p.short_threshold) & (L <= p.long_threshold)))

    # -- splitting ---------------------------------------------------------
    def split(self) -> int:
        m = self.mesh()
        edges, tri_edges = m.edge_table
        L = self.lengths(m)
        marked = L > self.params.long_threshold
        nm = int(np.count_nonzero(marked))
        if nm == 0:
            return 0
        nv = len(self.pts)
        me = np.flatnonzero(marked)
        new_id = np.full(len(edges), -1, dtype=np.int64)
        new_id[me] = nv + np.arange(nm)
        a, b = edges[me, 0], edges[me, 1]
        mids = 0.5 * (self.pts[a] + self.pts[b])
        mid_tags = np.full(nm, INTERIOR, dtype=np.int64)
        bnd = m.edge_triangles[me, 1] < 0
        if np.any(bnd):
            seg = m.edge_segments(me[bnd])
            mid_tags[bnd] = seg
            idx = np.flatnonzero(bnd)
            for s in np.unique(seg):
                sel = idx[seg == s]
                mids[sel] = self.domain.project(mids[sel], s)
        fallback = 0.5 * (self.vm[a] + self.vm[b])
        mid_vm = self.source(mids, fallback=fallback)
        self.pts = np.concatenate([self.pts, mids])
        self.tags = np.concatenate([self.tags, mid_tags])
        self.vm = np.concatenate([self.vm, mid_vm])

        t = self.tris
        mk = marked[tri_edges]
        P = new_id[tri_edges]
        cnt = mk.sum(axis=1)
        out = [t[cnt == 0]]
        rows = np.arange(len(t))

        sel = np.flatnonzero(cnt == 1)
        if len(sel):
            k = np.argmax(mk[sel], axis=1)
            r = rows[sel]
            v0, v1, v2 = t[r, k], t[r, (k + 1) % 3], t[r, (k + 2) % 3]
            p = P[r, k]
            out += [np.column_stack([v0, v1, p]), np.column_stack([v0, p, v2])]

        sel = np.flatnonzero(cnt == 3)
        if len(sel):
            v, p = t[sel], P[sel]
            out += [np.column_stack([v[:, 0], p[:, 2], p[:, 1]]),
                    np.column_stack([v[:, 1], p[:, 0], p[:, 2]]),
                    np.column_stack([v[:, 2], p[:, 1], p[:, 0]]),
                    p.copy()]

        sel = np.flatnonzero(cnt == 2)
        if len(sel):
            i = np.argmin(mk[sel], axis=1)
            r = rows[sel]
            vi, vi1, vi2 = t[r, i], t[r, (i + 1) % 3], t[r, (i + 2) % 3]
            pi1, pi2 = P[r, (i + 1) % 3], P[r, (i + 2) % 3]
            out.append(np.column_stack([vi, pi2, pi1]))
            la = metric_edge_length(self.pts[pi2], self.pts[vi2], self.vm[pi2], self.vm[vi2])
            lb = metric_edge_length(self.pts[vi1], self.pts[pi1], self.vm[vi1], self.vm[pi1])
            use_a = la <= lb
            A1 = np.column_stack([pi2, vi1, vi2])
            A2 = np.column_stack([pi2, vi2, pi1])
            B1 = np.column_stack([pi2, vi1, pi1])
            B2 = np.column_stack([vi1, vi2, pi1])
            out += [np.where(use_a[:, None], A1, B1), np.where(use_a[:, None], A2, B2)]
        self.tris = np.concatenate(out)
        return nm

    # -- collapsing --------------------------------------------------------
    def collapse(self) -> int:
        m = self.mesh()
        edges, _ = m.edge_table
        L = self.lengths(m)
        short = np.flatnonzero(L < self.params.short_threshold)
        if len(short) == 0:
            return 0
        bnd_edge = m.edge_triangles[:, 1] < 0
        seg = np.full(len(edges), -1, dtype=np.int64)
        be = np.flatnonzero(bnd_edge)
        seg[be] = m.edge_segments(be)

        vs, ws, ls = [], [], []
        for i in (0, 1):
            v, w = edges[short, i], edges[short, 1 - i]
            tv = self.tags[v]
            ok = (tv == INTERIOR) | ((tv >= 0) & bnd_edge[short] & (seg[short] == tv))
            vs.append(v[ok])
            ws.append(w[ok])
            ls.append(L[short][ok])
        v, w, lc = np.concatenate(vs), np.concatenate(ws), np.concatenate(ls)
        if len(v) == 0:
            return 0

        offsets, vt = m.vertex_triangles()
        deg = offsets[v + 1] - offsets[v]
        nc = len(v)
        pair_c = np.repeat(np.arange(nc), deg)
        starts = np.repeat(offsets[v] - np.concatenate([[0], np.cumsum(deg)[:-1]]), deg)
        pair_t = vt[starts + np.arange(len(pair_c))]
        tt = self.tris[pair_t]
        vc, wc = v[pair_c], w[pair_c]
        has_w = np.any(tt == wc[:, None], axis=1)
        new = np.where(tt == vc[:, None], wc[:, None], tt)
        coords = self.pts[new]
        e = coords[:, [1, 2, 0]] - coords[:, [2, 0, 1]]
        emax = np.max(np.sum(e * e, axis=-1), axis=1)
        area = signed_areas(coords)
        bad = area <= 1e-10 * emax
        # longest new edge in the metric
        is_w = new == wc[:, None]
        lw = np.zeros(len(new))
        for k in range(3):
            x = new[:, k]
            lk = metric_edge_length(self.pts[wc], self.pts[x], self.vm[wc], self.vm[x])
            lw = np.maximum(lw, np.where(is_w[:, k], 0.0, lk))
        bad |= lw > self.params.long_threshold
        # do not create poorly shaped elements unless the star already has them
        q_old = self._quality(self.tris)
        star_min = np.full(nc, np.inf)
        np.minimum.at(star_min, pair_c, q_old[pair_t])
        q_new = metric_quality(coords, self.vm[new])
        bad |= q_new < np.minimum(self.params.min_quality, star_min[pair_c])
        bad &= ~has_w
        fail = np.bincount(pair_c, weights=bad, minlength=nc) > 0
        # shorter edges first; for a tie the direction yielding shorter new edges
        worst_new = np.zeros(nc)
        np.maximum.at(worst_new, pair_c, np.where(has_w, 0.0, lw))
        order = np.lexsort((np.arange(nc), worst_new, lc))
        rank = np.empty(nc, dtype=np.int64)
        rank[order] = np.arange(nc)

        active = ~fail
        accepted = np.zeros(nc, dtype=bool)
        taken = np.zeros(len(self.tris), dtype=bool)
        big = np.iinfo(np.int64).max
        for _ in range(4):
            blocked = np.bincount(pair_c, weights=taken[pair_t], minlength=nc) > 0
            active &= ~blocked & ~accepted
            if not np.any(active):
                break
            pa = active[pair_c]
            claim = np.full(len(self.tris), big, dtype=np.int64)
            np.minimum.at(claim, pair_t[pa], rank[pair_c[pa]])
            lose = np.bincount(pair_c[pa], weights=claim[pair_t[pa]] != rank[pair_c[pa]], minlength=nc) > 0
            win = active & ~lose
            if not np.any(win):
                break
            accepted |= win
            taken[pair_t[win[pair_c]]] = True
        acc = np.flatnonzero(accepted)
        if len(acc) == 0:
            return 0
        nv = len(self.pts)
        vmap = np.arange(nv)
        vmap[v[acc]] = w[acc]
        tris = vmap[self.tris]
        keep_t = (tris[:, 0] != tris[:, 1]) & (tris[:, 1] != tris[:, 2]) & (tris[:, 0] != tris[:, 2])
        keep_v = np.ones(nv, dtype=bool)
        keep_v[v[acc]] = False
        newidx = np.cumsum(keep_v) - 1
        self.tris = newidx[tris[keep_t]]
        self.pts, self.tags, self.vm = self.pts[keep_v], self.tags[keep_v], self.vm[keep_v]
        return len(acc)

    # -- flipping ----------------------------------------------------------
    def flip(self) -> int:
        total = 0
        for _ in range(self.params.flip_rounds):
            n = self._flip_round()
            total += n
            if n == 0:
                break
        return total

    def _quality(self, tris):
        return metric_quality(self.pts[tris], self.vm[tris])

    def _flip_round(self) -> int:
        m = self.mesh()
        edges, tri_edges = m.edge_table
        et = m.edge_triangles
        inner = np.flatnonzero(et[:, 1] >= 0)
        if len(inner) == 0:
            return 0
        t1, t2 = et[inner, 0], et[inner, 1]
        k1 = np.argmax(tri_edges[t1] == inner[:, None], axis=1)
        k2 = np.argmax(tri_edges[t2] == inner[:, None], axis=1)
        c = self.tris[t1, k1]
        a = self.tris[t1, (k1 + 1) % 3]
        b = self.tris[t1, (k1 + 2) % 3]
        d = self.tris[t2, k2]
        q = self._quality(self.tris)
        q_old = np.minimum(q[t1], q[t2])
        n1 = np.column_stack([c, a, d])
        n2 = np.column_stack([d, b, c])
        c1, c2 = self.pts[n1], self.pts[n2]
        ok = (signed_areas(c1) > 0) & (signed_areas(c2) > 0)
        q_new = np.minimum(self._quality(n1), self._quality(n2))
        gain = np.where(ok, q_new - q_old, -np.inf)
        cand = np.flatnonzero(gain > 1e-4)
        if len(cand) == 0:
            return 0
        order = np.lexsort((cand, -gain[cand]))
        rank = np.empty(len(cand), dtype=np.int64)
        rank[order] = np.arange(len(cand))
        claim = np.full(len(self.tris), len(cand), dtype=np.int64)
        np.minimum.at(claim, t1[cand], rank)
        np.minimum.at(claim, t2[cand], rank)
        win = (claim[t1[cand]] == rank) & (claim[t2[cand]] == rank)
        w = cand[win]
        # only flips that keep both children non-degenerate
        self.tris[t1[w]] = n1[w]
        self.tris[t2[w]] = n2[w]
        return len(w)

    # -- smoothing ---------------------------------------------------------
    def smooth(self) -> None:
        m = self.mesh()
        edges, _ = m.edge_table
        L = self.lengths(m)
        nv = len(self.pts)
        i, j = edges[:, 0], edges[:, 1]
        d = self.pts[j] - self.pts[i]
        f = (1.0 - 1.0 / np.maximum(L, 1e-300))[:, None] * d
        acc = np.zeros((nv, 2))
        np.add.at(acc, i, f)
        np.add.at(acc, j, -f)
        deg = np.bincount(edges.ravel(), minlength=nv).astype(float)
        disp = acc / np.maximum(deg, 1.0)[:, None]

        interior = self.tags == INTERIOR
        on_seg = self.tags >= 0
        disp[~interior] = 0.0
        if np.any(on_seg):
            be = m.boundary_edges
            seg = m.edge_segments(be)
            bi, bj = edges[be, 0], edges[be, 1]
            fb = f[be]
            accb = np.zeros((nv, 2))
            degb = np.zeros(nv)
            for src, dst, sign in ((bi, bj, 1.0), (bj, bi, -1.0)):
                use = self.tags[src] == seg
                np.add.at(accb, src[use], sign * fb[use])
                np.add.at(degb, src[use], 1.0)
            sv = np.flatnonzero(on_seg & (degb > 0))
            disp[sv] = accb[sv] / degb[sv, None]

        new = self.pts + self.params.smoothing_damping * disp
        for s in np.unique(self.tags[on_seg]):
            sel = np.flatnonzero(self.tags == s)
            new[sel] = self.domain.project(new[sel], s)
        moved = np.any(new != self.pts, axis=1)
        qmin = self.params.min_quality
        flat = self.tris.ravel()

        def star_min(q):
            out = np.full(nv, np.inf)
            np.minimum.at(out, flat, np.repeat(q, 3))
            return out

        before = star_min(self._quality(self.tris))
        for _ in range(10):
            coords = new[self.tris]
            e = coords[:, [1, 2, 0]] - coords[:, [2, 0, 1]]
            emax = np.max(np.sum(e * e, axis=-1), axis=1)
            inv = signed_areas(coords) <= 1e-10 * emax
            # a move may not worsen the worst element around the vertex below qmin
            after = star_min(metric_quality(coords, self.vm[self.tris]))
            worse = moved & (after < qmin) & (after < before)
            if not (np.any(inv) or np.any(worse)):
                break
            back = np.union1d(np.unique(self.tris[inv]), np.flatnonzero(worse))
            new[back] = self.pts[back]
            moved[back] = False
        else:
            new = self.pts
            moved[:] = False
        mv = np.flatnonzero(moved)
        if len(mv):
            self.pts = new
            self.vm[mv] = self.source(self.pts[mv], fallback=self.vm[mv])


def adapt_mesh(mesh: Mesh, metric, params: AdaptParams | None = None, stats=None,
               debug_dir=None) -> Mesh:
    """Remesh ``mesh`` towards unit edge lengths in ``metric``.

    ``metric`` is a `MetricField` on ``mesh`` (interpolated from its vertex
    averages), a callable returning (n, 2, 2) tensors at points, or a single
    2x2 tensor.  A mesh that already meets ``uniformity_target`` is returned
    unchanged.  When a pass changes nothing while the target is still missed
    an `AdaptationStall` warning is issued.
    """
    params = params or AdaptParams()
    source = _as_metric_source(mesh, metric, params.gradation)
    r = _Remesher(mesh, source, params)
    info = {"passes": 0, "splits": 0, "collapses": 0, "flips": 0, "stalled": False}
    u = r.uniformity()
    info["uniformity_start"] = u
    info["history"] = [u]
    best_u, best_pass = u, -1
    if u < params.uniformity_target:
        for p in range(params.max_local_passes):
            ns = r.split()
            nc = r.collapse()
            nf = r.flip()
            r.smooth()
            info["passes"] = p + 1
            info["splits"] += ns
            info["collapses"] += nc
            info["flips"] += nf
            if debug_dir is not None:
                write_mesh(r.mesh(), Path(debug_dir) / f"pass_{p:03d}.mesh")
            u = r.uniformity()
            info["history"].append(u)
            log.debug("pass %d: %d splits, %d collapses, %d flips, N=%d, uniformity %.3f",
                      p, ns, nc, nf, len(r.tris), u)
            if ns + nc + nf == 0:
                if u < params.uniformity_target:
                    info["stalled"] = True
                    warnings.warn(f"remeshing stalled at uniformity {u:.3f}", AdaptationStall,
                                  stacklevel=2)
                break
            n_tri = len(r.tris)
            if u >= params.uniformity_target and ns + nc <= max(2, 0.002 * n_tri):
                break
            # limit cycles of a few splits and collapses: stop once uniformity plateaus
            if u > best_u + 1e-3:
                best_u, best_pass = u, p
            elif p - best_pass >= 5:
                break
    info["uniformity"] = u
    if stats is not None:
        stats.update(info)
    return r.mesh()


# -- outer loop ----------------------------------------------------------------

@dataclass
class LoopStep:
    mesh: Mesh
    solution: FemSolution
    diagnostics: dict = field(default_factory=dict)


def predicted_elements(mesh: Mesh, field: MetricField) -> float:
    """Element count of a mesh with unit metric edges: metric area over ``sqrt(3)/4``."""
    return float(np.sum(mesh.areas * np.sqrt(np.linalg.det(field.tensors))) / UNIT_TRIANGLE_AREA)


def jitter(mesh: Mesh, amplitude=0.3, seed=0) -> Mesh:
    """Randomly displace interior vertices by up to ``amplitude`` times their shortest edge.

    Moves that would invert an element are undone.
    """
    rng = np.random.default_rng(seed)
    edges, _ = mesh.edge_table
    ell = np.linalg.norm(mesh.points[edges[:, 0]] - mesh.points[edges[:, 1]], axis=1)
    hmin = np.full(mesh.n_vertices, np.inf)
    np.minimum.at(hmin, edges[:, 0], ell)
    np.minimum.at(hmin, edges[:, 1], ell)
    step = rng.uniform(-1.0, 1.0, size=(mesh.n_vertices, 2)) * (amplitude * hmin)[:, None]
    step[~mesh.interior] = 0.0
    pts = mesh.points + step
    for _ in range(20):
        bad = signed_areas(pts[mesh.triangles]) <= 0
        if not np.any(bad):
            break
        back = np.unique(mesh.triangles[bad])
        pts[back] = mesh.points[back]
    return Mesh(pts, mesh.tags, mesh.triangles, mesh.domain)


def _adapt_quietly(mesh, metric, params, stats):
    """`adapt_mesh` with stall warnings counted in ``stats`` instead of emitted."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", AdaptationStall)
        out = adapt_mesh(mesh, metric, params, stats=stats)
    stalls = [w for w in caught if issubclass(w.category, AdaptationStall)]
    for w in caught:
        if w not in stalls:
            warnings.warn_explicit(w.message, w.category, w.filename, w.lineno)
    stats["stall_warnings"] = len(stalls)
    return out


def quasi_uniform_mesh(mesh: Mesh, target_n: int, params: AdaptParams | None = None, seed=0,
                       count_tol=0.05, max_steps=8):
    """Unstructured quasi-uniform mesh of ``mesh.domain`` with about ``target_n`` triangles.

    ``mesh`` is refined with a quarter of the target density, jittered so the
    result does not inherit its structure, and then remeshed with a scaled
    identity metric whose multiplier is tuned by secant steps in log scale.
    """
    params = params or AdaptParams()
    area = mesh.domain.area
    c = target_n * UNIT_TRIANGLE_AREA / area
    coarse = _adapt_quietly(mesh, 0.25 * c * np.eye(2), params, {})
    coarse = jitter(coarse, 0.3, seed)
    best = None
    for _ in range(max_steps):
        st = {}
        out = _adapt_quietly(coarse, c * np.eye(2), params, st)
        err = abs(out.n_triangles - target_n) / target_n
        if best is None or err < best[0]:
            best = (err, out, st)
        if err <= count_tol:
            break
        c *= target_n / out.n_triangles
    return best[1], best[2]


def adaptation_loop(problem: TestProblem, mode: str, target_n: int, params: AdaptParams | None = None,
                    quad_degree=DEFAULT_QUAD_DEGREE, gs_tol=1e-2, gs_max_sweeps=20,
                    debug_dir=None, count_tol=0.15, seed=0) -> list[LoopStep]:
    """Solve, estimate, build the metric and remesh until the mesh settles.

    ``mode`` is ``uniform`` (scaled identity metric), ``isotropic`` (metric
    replaced by ``sqrt(det M) I``) or ``anisotropic`` (full metric).  A global
    multiplier on the metric is adjusted so the final element count is within
    ``count_tol`` of ``target_n``.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if target_n < 100:
        raise ValueError("target_n must be at least 100")
    params = params or AdaptParams()
    debug = Path(debug_dir) if debug_dir is not None else None
    if debug is not None:
        debug.mkdir(parents=True, exist_ok=True)

    mesh = problem.initial_mesh()
    area = mesh.domain.area
    steps: list[LoopStep] = []

    def remesh(m, fld, label):
        caught_stats = {}
        out = _adapt_quietly(m, fld, params, caught_stats)
        if debug is not None:
            write_mesh(out, debug / f"{label}.mesh")
        return out, caught_stats

    def uniform_field(m, c):
        return MetricField(np.broadcast_to(c * np.eye(2), (m.n_triangles, 2, 2)).copy())

    mesh, st = quasi_uniform_mesh(mesh, target_n, params, seed=seed)
    if debug is not None:
        write_mesh(mesh, debug / "uniform.mesh")

    if mode == "uniform":
        t0 = time.perf_counter()
        sol = solve_fem(mesh, problem, quad_degree)
        est = hb_estimate(mesh, sol, problem, quad_degree, gs_tol, gs_max_sweeps)
        steps.append(LoopStep(mesh, sol, {"iteration": 0, "N": mesh.n_triangles,
                                          "estimate": estimate_energy_norm(est, mesh),
                                          "solve_time": time.perf_counter() - t0, **st}))
        return steps

    prev_n, prev_eta = None, None
    ratio = 1.0
    field_used = None
    for it in range(params.outer_max_iters):
        t0 = time.perf_counter()
        sol = solve_fem(mesh, problem, quad_degree)
        t1 = time.perf_counter()
        est = hb_estimate(mesh, sol, problem, quad_degree, gs_tol, gs_max_sweeps)
        eta = estimate_energy_norm(est, mesh)
        t2 = time.perf_counter()
        diag = {"iteration": it, "N": mesh.n_triangles, "estimate": eta, "gs_sweeps": est.sweeps,
                "solve_time": t1 - t0, "estimate_time": t2 - t1}
        steps.append(LoopStep(mesh, sol, diag))
        if prev_n is not None:
            dn = abs(mesh.n_triangles - prev_n) / mesh.n_triangles
            de = abs(eta - prev_eta) / eta if eta > 0 else 0.0
            if dn < params.outer_element_tol and de < params.outer_element_tol:
                diag["converged"] = True
                break
        if est.is_zero:
            diag["converged"] = True
            break
        if it == params.outer_max_iters - 1:
            break
        prev_n, prev_eta = mesh.n_triangles, eta
        H = element_hessians(est, mesh)
        fld = metric_field(H, mesh.areas)
        if mode == "isotropic":
            fld = fld.isotropic()
        base = predicted_elements(mesh, fld)
        c = target_n / (base * ratio)
        field_used = (mesh, fld)
        new_mesh, st = remesh(mesh, fld.scaled(c), f"iter_{it:02d}")
        ratio = new_mesh.n_triangles / (c * base)
        diag.update({"alpha": fld.alpha, "metric_scale": c, "count_ratio": ratio,
                     "adapt_time": time.perf_counter() - t2, **st})
        mesh = new_mesh

    # final count correction on the last metric
    final = steps[-1]
    if field_used is not None and abs(final.mesh.n_triangles - target_n) > count_tol * target_n:
        bg_mesh, fld = field_used
        base = predicted_elements(bg_mesh, fld)
        mesh = final.mesh
        for k in range(6):
            c = target_n / (base * ratio)
            mesh, st = remesh(bg_mesh, fld.scaled(c), f"count_{k}")
            ratio = mesh.n_triangles / (c * base)
            if abs(mesh.n_triangles - target_n) <= count_tol * target_n:
                break
        sol = solve_fem(mesh, problem, quad_degree)
        est = hb_estimate(mesh, sol, problem, quad_degree, gs_tol, gs_max_sweeps)
        steps.append(LoopStep(mesh, sol, {"iteration": len(steps), "N": mesh.n_triangles,
                                          "estimate": estimate_energy_norm(est, mesh),
                                          "count_correction": True, **st}))
    return steps
