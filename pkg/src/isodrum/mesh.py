"""Uniform red refinement of a triangle-tiled domain, and the mesh text format."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .unfolding import COLORS, PlanarDomain


@dataclass(frozen=True)
class Mesh:
    """Conforming P1 mesh refined from the placed copies of a base triangle.

    Attributes
    ----------
    points : (nv, 2) float array
    triangles : (ne, 3) int array, counter-clockwise
    boundary : (nb, 2) int array of boundary edge endpoints
    boundary_tag : (nb,) gluing color of the originating base edge
    boundary_owner : (nb,) base-triangle (node) index the edge came from
    element_owner : (ne,) node index of each element
    node_vertices : (n_nodes, n_ref) global vertex id of every reference
        grid point in every copy; the same reference index means the same
        barycentric position in every copy, which is what transplantation uses.
    level : refinement level L (each copy holds 4**L elements)
    """

    points: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray
    boundary_tag: np.ndarray
    boundary_owner: np.ndarray
    element_owner: np.ndarray
    node_vertices: np.ndarray
    level: int

    @property
    def n_vertices(self) -> int:
        return len(self.points)

    @property
    def n_elements(self) -> int:
        return len(self.triangles)

    def element_areas(self) -> np.ndarray:
        p = self.points[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def boundary_vertices(self, tags=None) -> np.ndarray:
        sel = np.ones(len(self.boundary), bool) if tags is None else np.isin(self.boundary_tag, list(tags))
        return np.unique(self.boundary[sel])


@lru_cache(maxsize=16)
def reference_grid(level: int) -> tuple[np.ndarray, np.ndarray, dict]:
    """Barycentric grid of one copy at ``level``.

    Returns ``(ij, tris, edge_points)``: integer grid coordinates ``(i, j)``
    with ``i + j <= N`` (weights ``(N-i-j, i, j) / N`` on vertices 0, 1, 2),
    the ``N**2`` small triangles as local index triples, and for each color
    the local indices along edge ``c`` ordered from its lower-labelled end.
    """
    n = 2**level
    ij = np.array([(i, j) for i in range(n + 1) for j in range(n + 1 - i)], dtype=np.int64)
    local = {tuple(p): k for k, p in enumerate(ij)}
    tris = []
    for i in range(n):
        for j in range(n - i):
            tris.append((local[i, j], local[i + 1, j], local[i, j + 1]))
            if i + j <= n - 2:
                tris.append((local[i + 1, j], local[i + 1, j + 1], local[i, j + 1]))
    # edge c is where the weight of vertex c vanishes
    edges = {
        0: [local[n - t, t] for t in range(n + 1)],  # from vertex 1 to vertex 2
        1: [local[0, t] for t in range(n + 1)],  # from vertex 0 to vertex 2
        2: [local[t, 0] for t in range(n + 1)],  # from vertex 0 to vertex 1
    }
    return ij, np.array(tris, dtype=np.int64), edges


def refine(domain: PlanarDomain, level: int) -> Mesh:
    """Red-refine every copy ``level`` times and merge shared vertices exactly."""
    if level < 0:
        raise ValueError("refinement level must be nonnegative")
    n = 2**level
    ij, ref_tris, ref_edges = reference_grid(level)
    den = 1
    for tri in domain.triangles:
        for p in tri:
            for v in p:
                den = den * v.denominator // math.gcd(den, v.denominator)
    w = np.column_stack([n - ij[:, 0] - ij[:, 1], ij[:, 0], ij[:, 1]])

    keys = []
    for tri in domain.triangles:
        corners = np.array([[int(v * den) for v in p] for p in tri], dtype=np.int64)
        keys.append(w @ corners)  # = n * den * point, exact
    keys = np.concatenate(keys)
    unique, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    n_ref = len(ij)
    node_vertices = inverse.reshape(domain.size, n_ref)
    points = unique.astype(float) / (n * den)

    triangles = np.concatenate([node_vertices[x][ref_tris] for x in range(domain.size)])
    element_owner = np.repeat(np.arange(domain.size), len(ref_tris))
    p = points[triangles]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    flip = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0] < 0
    triangles[flip] = triangles[flip][:, [0, 2, 1]]

    bnd, tag, owner = [], [], []
    for x in range(domain.size):
        for c in COLORS:
            if domain.neighbor(x, c) is not None:
                continue
            ids = node_vertices[x][ref_edges[c]]
            bnd.append(np.column_stack([ids[:-1], ids[1:]]))
            tag.append(np.full(n, c))
            owner.append(np.full(n, x))
    return Mesh(
        points=points,
        triangles=triangles,
        boundary=np.concatenate(bnd) if bnd else np.zeros((0, 2), np.int64),
        boundary_tag=np.concatenate(tag) if tag else np.zeros(0, np.int64),
        boundary_owner=np.concatenate(owner) if owner else np.zeros(0, np.int64),
        element_owner=element_owner,
        node_vertices=node_vertices,
        level=level,
    )


def scaled(mesh: Mesh, factor: float) -> Mesh:
    return Mesh(
        mesh.points * factor,
        mesh.triangles,
        mesh.boundary,
        mesh.boundary_tag,
        mesh.boundary_owner,
        mesh.element_owner,
        mesh.node_vertices,
        mesh.level,
    )


def write_mesh(mesh: Mesh, path) -> None:
    """Text format: ``nv ne nb`` then ``v x y``, ``e i j k``, ``b i j tag`` lines."""
    lines = [f"{mesh.n_vertices} {mesh.n_elements} {len(mesh.boundary)}"]
    lines += [f"v {x!r} {y!r}" for x, y in mesh.points.tolist()]
    lines += [f"e {i} {j} {k}" for i, j, k in mesh.triangles.tolist()]
    lines += [f"b {i} {j} {t}" for (i, j), t in zip(mesh.boundary.tolist(), mesh.boundary_tag.tolist())]
    Path(path).write_text("\n".join(lines) + "\n")


def read_mesh(path) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Parse the text format into ``(points, triangles, boundary, tags)``."""
    with open(path) as fh:
        nv, ne, nb = (int(s) for s in fh.readline().split())
        pts, tris, bnd, tags = [], [], [], []
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                pts.append((float(parts[1]), float(parts[2])))
            elif parts[0] == "e":
                tris.append(tuple(int(s) for s in parts[1:4]))
            elif parts[0] == "b":
                bnd.append((int(parts[1]), int(parts[2])))
                tags.append(int(parts[3]))
            else:
                raise ValueError(f"unknown record {parts[0]!r}")
    if (len(pts), len(tris), len(bnd)) != (nv, ne, nb):
        raise ValueError("record counts do not match the header")
    return (
        np.array(pts, float).reshape(-1, 2),
        np.array(tris, np.int64).reshape(-1, 3),
        np.array(bnd, np.int64).reshape(-1, 2),
        np.array(tags, np.int64),
    )
