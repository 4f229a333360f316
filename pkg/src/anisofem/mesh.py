"""Conforming triangulations of polygonal domains.

A mesh is stored in flat arrays: ``points`` (V, 2), ``tags`` (V,) and
``triangles`` (T, 3) with counterclockwise vertex order.  Vertex tags encode
where a vertex lives on the domain:

* ``INTERIOR`` (-1) for interior vertices,
* ``s >= 0`` for a vertex on the open boundary segment ``s``,
* ``-2 - c`` for the polygon corner ``c``.

Segment ``s`` of a polygon runs from corner ``s`` to corner ``s + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import DegenerateElement

INTERIOR = -1
GEOM_TOL = 1e-12
DEGENERACY_TOL = 1e-14


def corner_tag(c: int) -> int:
    return -2 - c


def is_corner(tags):
    return np.asarray(tags) <= -2


@dataclass(frozen=True)
class Polygon:
    """Closed polygon with counterclockwise corners."""

    corners: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "corners", np.asarray(self.corners, dtype=float))

    @property
    def n_segments(self) -> int:
        return len(self.corners)

    def segment(self, s: int) -> tuple[np.ndarray, np.ndarray]:
        return self.corners[s], self.corners[(s + 1) % self.n_segments]

    @property
    def area(self) -> float:
        x, y = self.corners[:, 0], self.corners[:, 1]
        return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))

    def tag_segments(self, tags) -> np.ndarray:
        """Return (n, 2) candidate segment ids for each tag (-1 rows for interior)."""
        tags = np.asarray(tags)
        out = np.full((len(tags), 2), -1, dtype=np.int64)
        seg = tags >= 0
        out[seg, 0] = tags[seg]
        out[seg, 1] = tags[seg]
        cor = tags <= -2
        c = -tags[cor] - 2
        out[cor, 0] = (c - 1) % self.n_segments
        out[cor, 1] = c
        return out

    def distance_to_segment(self, pts, s) -> np.ndarray:
        a, b = self.segment(s)
        d = b - a
        t = np.clip(((pts - a) @ d) / (d @ d), 0.0, 1.0)
        return np.linalg.norm(pts - (a + t[..., None] * d), axis=-1)

    def project(self, pts, s) -> np.ndarray:
        """Orthogonal projection onto segment ``s`` (clamped to its interior)."""
        a, b = self.segment(s)
        d = b - a
        t = np.clip(((pts - a) @ d) / (d @ d), 0.0, 1.0)
        return a + t[..., None] * d


LSHAPE = Polygon(np.array([[-1.0, -1.0], [0.0, -1.0], [0.0, 0.0],
                           [1.0, 0.0], [1.0, 1.0], [-1.0, 1.0]]))
REENTRANT_CORNER = 2


@dataclass(frozen=True)
class Violation:
    kind: str
    ids: tuple
    message: str

    def __str__(self):
        return f"{self.kind} {self.ids}: {self.message}"


@dataclass(eq=False)
class Mesh:
    """Triangulation of ``domain``; treated as immutable once built."""

    points: np.ndarray
    tags: np.ndarray
    triangles: np.ndarray
    domain: Polygon = field(default=LSHAPE)

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=float).reshape(-1, 2)
        self.tags = np.ascontiguousarray(self.tags, dtype=np.int64)
        self.triangles = np.ascontiguousarray(self.triangles, dtype=np.int64).reshape(-1, 3)

    @property
    def n_vertices(self) -> int:
        return len(self.points)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    @property
    def interior(self) -> np.ndarray:
        return self.tags == INTERIOR

    @property
    def n_int(self) -> int:
        return int(np.count_nonzero(self.interior))

    @cached_property
    def signed_areas(self) -> np.ndarray:
        return signed_areas(self.points[self.triangles])

    @property
    def areas(self) -> np.ndarray:
        return np.abs(self.signed_areas)

    @cached_property
    def edge_table(self):
        """Canonical edges.

        Returns ``(edges, tri_edges)``: ``edges`` is (E, 2) with sorted vertex
        pairs, and ``tri_edges[t, i]`` is the edge opposite local vertex ``i``.
        """
        t = self.triangles
        local = np.stack([t[:, [1, 2]], t[:, [2, 0]], t[:, [0, 1]]], axis=1).reshape(-1, 2)
        local.sort(axis=1)
        edges, inv = np.unique(local, axis=0, return_inverse=True)
        return edges, inv.reshape(-1, 3)

    @cached_property
    def edge_triangles(self) -> np.ndarray:
        """(E, 2) adjacent triangles per edge, -1 where absent."""
        edges, tri_edges = self.edge_table
        out = np.full((len(edges), 2), -1, dtype=np.int64)
        flat = tri_edges.ravel()
        tri = np.repeat(np.arange(self.n_triangles), 3)
        order = np.argsort(flat, kind="stable")
        flat, tri = flat[order], tri[order]
        first = np.ones(len(flat), dtype=bool)
        first[1:] = flat[1:] != flat[:-1]
        out[flat[first], 0] = tri[first]
        out[flat[~first], 1] = tri[~first]
        return out

    @cached_property
    def neighbors(self) -> np.ndarray:
        """(T, 3) neighbor across the edge opposite each local vertex, -1 on the boundary."""
        _, tri_edges = self.edge_table
        et = self.edge_triangles[tri_edges]
        own = np.arange(self.n_triangles)[:, None]
        return np.where(et[..., 0] == own, et[..., 1], et[..., 0])

    @cached_property
    def boundary_edges(self) -> np.ndarray:
        return np.flatnonzero(self.edge_triangles[:, 1] < 0)

    def edge_segments(self, edge_ids) -> np.ndarray:
        """Domain segment id of each boundary edge (-1 if none is shared)."""
        edges, _ = self.edge_table
        e = edges[edge_ids]
        sa = self.domain.tag_segments(self.tags[e[:, 0]])
        sb = self.domain.tag_segments(self.tags[e[:, 1]])
        out = np.full(len(e), -1, dtype=np.int64)
        for i in range(2):
            for j in range(2):
                hit = (sa[:, i] == sb[:, j]) & (sa[:, i] >= 0) & (out < 0)
                out[hit] = sa[hit, i]
        return out

    def vertex_triangles(self):
        """CSR incidence ``(offsets, tris)`` of triangles around each vertex."""
        flat = self.triangles.ravel()
        order = np.argsort(flat, kind="stable")
        counts = np.bincount(flat, minlength=self.n_vertices)
        offsets = np.concatenate([[0], np.cumsum(counts)])
        return offsets, order // 3


def signed_areas(coords) -> np.ndarray:
    """Signed areas of triangles given as (..., 3, 2) coordinates."""
    p0, p1, p2 = coords[..., 0, :], coords[..., 1, :], coords[..., 2, :]
    return 0.5 * ((p1[..., 0] - p0[..., 0]) * (p2[..., 1] - p0[..., 1])
                  - (p2[..., 0] - p0[..., 0]) * (p1[..., 1] - p0[..., 1]))


def triangle_aspect_ratios(coords) -> np.ndarray:
    """Longest edge over shortest altitude for (..., 3, 2) triangle coordinates."""
    coords = np.asarray(coords, dtype=float)
    e = coords[..., [1, 2, 0], :] - coords[..., [2, 0, 1], :]
    lmax = np.sqrt(np.max(np.sum(e * e, axis=-1), axis=-1))
    area = np.abs(signed_areas(coords))
    bad = area <= DEGENERACY_TOL * lmax**2
    if np.any(bad):
        raise DegenerateElement(f"{int(np.count_nonzero(bad))} degenerate triangle(s)")
    # shortest altitude is the one onto the longest edge
    return lmax / (2.0 * area / lmax)


def aspect_ratio(mesh: Mesh, t: int) -> float:
    return float(triangle_aspect_ratios(mesh.points[mesh.triangles[t]]))


def aspect_ratios(mesh: Mesh) -> np.ndarray:
    return triangle_aspect_ratios(mesh.points[mesh.triangles])


def max_aspect_ratio(mesh: Mesh) -> float:
    return float(np.max(aspect_ratios(mesh)))


def initial_lshape_mesh() -> Mesh:
    """Six right triangles covering the L-shaped domain (three unit squares)."""
    pts = np.array([[-1, -1], [0, -1], [0, 0], [1, 0], [1, 1], [-1, 1], [-1, 0], [0, 1]],
                   dtype=float)
    tags = np.array([corner_tag(c) for c in range(6)] + [5, 4])
    tris = np.array([[0, 1, 2], [0, 2, 6],
                     [6, 2, 7], [6, 7, 5],
                     [2, 3, 4], [2, 4, 7]])
    return Mesh(pts, tags, tris, LSHAPE)


def unit_square_mesh(n: int = 1, center: bool = False) -> Mesh:
    """Structured mesh of the unit square with ``n`` x ``n`` cells.

    Each cell is cut along its diagonal, or into four triangles around its
    center when ``center`` is set.
    """
    dom = Polygon(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]))
    g = np.linspace(0.0, 1.0, n + 1)
    X, Y = np.meshgrid(g, g, indexing="xy")
    pts = [np.column_stack([X.ravel(), Y.ravel()])]
    idx = np.arange((n + 1) ** 2).reshape(n + 1, n + 1)
    a, b = idx[:-1, :-1].ravel(), idx[:-1, 1:].ravel()
    c, d = idx[1:, 1:].ravel(), idx[1:, :-1].ravel()
    if center:
        m = (n + 1) ** 2 + np.arange(n * n)
        cx = 0.5 * (g[:-1] + g[1:])
        CX, CY = np.meshgrid(cx, cx, indexing="xy")
        pts.append(np.column_stack([CX.ravel(), CY.ravel()]))
        tris = np.concatenate([np.column_stack(v) for v in
                               ([a, b, m], [b, c, m], [c, d, m], [d, a, m])])
    else:
        tris = np.concatenate([np.column_stack([a, b, c]), np.column_stack([a, c, d])])
    pts = np.concatenate(pts)
    tags = _tags_from_geometry(pts, dom)
    return Mesh(pts, tags, tris, dom)


def _tags_from_geometry(pts, dom: Polygon) -> np.ndarray:
    tags = np.full(len(pts), INTERIOR, dtype=np.int64)
    for s in range(dom.n_segments):
        on = dom.distance_to_segment(pts, s) <= GEOM_TOL
        tags[on & (tags == INTERIOR)] = s
    for c, corner in enumerate(dom.corners):
        tags[np.linalg.norm(pts - corner, axis=1) <= GEOM_TOL] = corner_tag(c)
    return tags


def refine_uniform(mesh: Mesh) -> Mesh:
    """Red refinement: every triangle is split into four similar children."""
    edges, tri_edges = mesh.edge_table
    nv = mesh.n_vertices
    mids = 0.5 * (mesh.points[edges[:, 0]] + mesh.points[edges[:, 1]])
    mid_tags = np.full(len(edges), INTERIOR, dtype=np.int64)
    bnd = mesh.boundary_edges
    mid_tags[bnd] = mesh.edge_segments(bnd)
    t = mesh.triangles
    m = tri_edges + nv
    tris = np.concatenate([
        np.column_stack([t[:, 0], m[:, 2], m[:, 1]]),
        np.column_stack([t[:, 1], m[:, 0], m[:, 2]]),
        np.column_stack([t[:, 2], m[:, 1], m[:, 0]]),
        np.column_stack([m[:, 0], m[:, 1], m[:, 2]]),
    ])
    return Mesh(np.concatenate([mesh.points, mids]), np.concatenate([mesh.tags, mid_tags]),
                tris, mesh.domain)


def _point_in_open_segment(p, a, b, tol=GEOM_TOL):
    d = b - a
    L2 = float(d @ d)
    t = ((p - a) @ d) / L2
    dist = np.abs(d[0] * (p[..., 1] - a[1]) - d[1] * (p[..., 0] - a[0])) / np.sqrt(L2)
    return (dist <= tol) & (t > tol) & (t < 1 - tol)


def validate(mesh: Mesh) -> list[Violation]:
    """Check the mesh invariants; an empty list means the mesh is valid."""
    out: list[Violation] = []
    pts, tris, dom = mesh.points, mesh.triangles, mesh.domain
    bad = np.flatnonzero(~np.all(np.isfinite(pts), axis=1))
    out += [Violation("position", (int(v),), "non-finite coordinates") for v in bad]
    if len(tris) == 0:
        out.append(Violation("empty", (), "no triangles"))
        return out
    if tris.min() < 0 or tris.max() >= len(pts):
        out.append(Violation("index", (), "triangle references a missing vertex"))
        return out

    sa = mesh.signed_areas
    for t in np.flatnonzero(sa <= 0):
        out.append(Violation("orientation", (int(t),), f"signed area {sa[t]:.3e} <= 0"))

    unused = np.setdiff1d(np.arange(len(pts)), tris.ravel())
    out += [Violation("orphan", (int(v),), "vertex used by no triangle") for v in unused]

    edges, tri_edges = mesh.edge_table
    uses = np.bincount(tri_edges.ravel(), minlength=len(edges))
    for e in np.flatnonzero(uses > 2):
        out.append(Violation("conformity", tuple(int(v) for v in edges[e]),
                             f"edge shared by {uses[e]} triangles"))

    # unpaired edges must lie on the domain boundary, otherwise they indicate
    # a hanging node (or a hole)
    single = np.flatnonzero(uses == 1)
    seg_of = mesh.edge_segments(single)
    a, b = pts[edges[single, 0]], pts[edges[single, 1]]
    on_boundary = np.zeros(len(single), dtype=bool)
    for s in range(dom.n_segments):
        on_boundary |= ((dom.distance_to_segment(a, s) <= GEOM_TOL)
                        & (dom.distance_to_segment(b, s) <= GEOM_TOL))
    off = single[~on_boundary]
    explained = np.zeros(len(off), dtype=bool)
    for k, e in enumerate(off):
        pa, pb = pts[edges[e, 0]], pts[edges[e, 1]]
        inside = np.flatnonzero(_point_in_open_segment(pts, pa, pb))
        if len(inside) == 0:
            continue
        explained[k] = True
        out.append(Violation("conformity", tuple(int(v) for v in edges[e]),
                             f"hanging node(s) {inside.tolist()} on edge"))
        # sub-edges of the split side are part of the same defect
        for j, f in enumerate(off):
            if not explained[j]:
                qa, qb = pts[edges[f, 0]], pts[edges[f, 1]]
                ends = np.stack([qa, qb])
                d = pb - pa
                t = ((ends - pa) @ d) / (d @ d)
                dist = np.abs(d[0] * (ends[:, 1] - pa[1]) - d[1] * (ends[:, 0] - pa[0]))
                if np.all(dist <= GEOM_TOL * np.sqrt(d @ d)) and np.all((t > -GEOM_TOL) & (t < 1 + GEOM_TOL)):
                    explained[j] = True
    for e in off[~explained]:
        out.append(Violation("boundary", tuple(int(v) for v in edges[e]),
                             "unpaired edge off the domain boundary"))

    # tags
    for k, e in enumerate(single[on_boundary]):
        for v in edges[e]:
            if mesh.tags[v] == INTERIOR:
                out.append(Violation("tag", (int(v),), "boundary vertex tagged interior"))
    for v in np.flatnonzero(mesh.tags >= dom.n_segments):
        out.append(Violation("tag", (int(v),), "unknown segment id"))
    for v in np.flatnonzero((mesh.tags >= 0) & (mesh.tags < dom.n_segments)):
        if dom.distance_to_segment(pts[v], mesh.tags[v]) > GEOM_TOL:
            out.append(Violation("tag", (int(v),), f"vertex off its segment {mesh.tags[v]}"))
    for v in np.flatnonzero(is_corner(mesh.tags)):
        c = -mesh.tags[v] - 2
        if c >= dom.n_segments or np.linalg.norm(pts[v] - dom.corners[c]) > GEOM_TOL:
            out.append(Violation("tag", (int(v),), "corner tag away from polygon corner"))

    covered = float(np.sum(np.abs(sa)))
    if abs(covered - dom.area) > GEOM_TOL * max(1.0, dom.area) * max(1, len(tris)) ** 0.5:
        out.append(Violation("coverage", (), f"element areas sum to {covered!r}, domain {dom.area!r}"))
    return out


def write_mesh(mesh: Mesh, path) -> None:
    """Write ``V T``, then ``x y tag`` rows, then ``i j k`` rows."""
    lines = [f"{mesh.n_vertices} {mesh.n_triangles}"]
    lines += [f"{x:.17g} {y:.17g} {int(t)}" for (x, y), t in zip(mesh.points, mesh.tags)]
    lines += [f"{i} {j} {k}" for i, j, k in mesh.triangles]
    Path(path).write_text("\n".join(lines) + "\n")


def read_mesh(path, domain: Polygon = LSHAPE) -> Mesh:
    tokens = Path(path).read_text().split("\n")
    rows = [r.split() for r in tokens if r.strip()]
    nv, nt = int(rows[0][0]), int(rows[0][1])
    if len(rows) != 1 + nv + nt:
        raise ValueError(f"expected {1 + nv + nt} rows, found {len(rows)}")
    vrows = rows[1:1 + nv]
    pts = np.array([[float(r[0]), float(r[1])] for r in vrows]).reshape(-1, 2)
    tags = np.array([int(r[2]) for r in vrows], dtype=np.int64)
    tris = np.array([[int(v) for v in r] for r in rows[1 + nv:]], dtype=np.int64).reshape(-1, 3)
    return Mesh(pts, tags, tris, domain)
