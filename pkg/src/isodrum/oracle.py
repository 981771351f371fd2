"""Independent reference values: closed-form spectra and a 5-point stencil.

Nothing here touches the finite element code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .unfolding import PlanarDomain


def square_dirichlet(count: int, side: float = 1.0) -> np.ndarray:
    """Lowest ``pi^2 (m^2 + n^2) / side^2`` with ``m, n >= 1``."""
    r = int(math.isqrt(4 * count)) + 2
    vals = sorted(m * m + n * n for m in range(1, r + 1) for n in range(1, r + 1))
    return math.pi**2 * np.array(vals[:count], float) / side**2


def isosceles_right_dirichlet(count: int) -> np.ndarray:
    """Right isosceles triangle with legs 1: ``pi^2 (m^2 + n^2)``, ``m > n >= 1``."""
    r = int(math.isqrt(8 * count)) + 3
    vals = sorted(m * m + n * n for m in range(2, r + 1) for n in range(1, m))
    return math.pi**2 * np.array(vals[:count], float)


@dataclass(frozen=True)
class GridLaplacian:
    matrix: sp.csr_matrix
    points: np.ndarray  # integer grid coordinates of the unknowns
    h: float


def _grid_scaled(domain: PlanarDomain, m: int) -> list:
    tris = []
    for tri in domain.triangles:
        pts = []
        for p in tri:
            x, y = p[0] * m, p[1] * m
            if x.denominator != 1 or y.denominator != 1:
                raise ValueError(f"vertex {p} is not on the grid of spacing 1/{m}")
            pts.append((int(x), int(y)))
        tris.append(pts)
    return tris


def grid_laplacian(domain: PlanarDomain, m: int) -> GridLaplacian:
    """Dirichlet 5-point Laplacian with spacing ``h = 1/m`` on the grid points
    strictly inside the domain.

    Every boundary edge must run along a grid line or a grid diagonal; then
    the four neighbours of an interior grid point are interior or on the
    boundary, so no stencil reaches outside.
    """
    tris = _grid_scaled(domain, m)
    for _, _, p, q in domain.boundary_edges():
        dx, dy = abs(p[0] - q[0]), abs(p[1] - q[1])
        if not (dx == 0 or dy == 0 or dx == dy):
            raise ValueError("boundary edges must be axis-parallel or diagonal")
    allpts = np.array([v for t in tris for v in t])
    lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    X, Y = np.meshgrid(np.arange(lo[0], hi[0] + 1), np.arange(lo[1], hi[1] + 1), indexing="ij")
    X, Y = X.ravel(), Y.ravel()

    inside = np.zeros(X.shape, bool)
    for t in tris:
        s = []
        for i in range(3):
            (ax, ay), (bx, by) = t[i], t[(i + 1) % 3]
            s.append(np.sign((bx - ax) * (Y - ay) - (by - ay) * (X - ax)))
        s = np.stack(s)
        inside |= ~((s > 0).any(axis=0) & (s < 0).any(axis=0))

    on_boundary = np.zeros(X.shape, bool)
    for _, _, p, q in domain.boundary_edges():
        ax, ay = int(p[0] * m), int(p[1] * m)
        bx, by = int(q[0] * m), int(q[1] * m)
        col = (bx - ax) * (Y - ay) - (by - ay) * (X - ax) == 0
        box = (np.minimum(ax, bx) <= X) & (X <= np.maximum(ax, bx)) & (np.minimum(ay, by) <= Y) & (Y <= np.maximum(ay, by))
        on_boundary |= col & box

    interior = inside & ~on_boundary
    pts = np.column_stack([X[interior], Y[interior]])
    index = {tuple(p): k for k, p in enumerate(pts.tolist())}
    rows, cols, vals = [], [], []
    h = 1.0 / m
    for k, (x, y) in enumerate(pts.tolist()):
        rows.append(k)
        cols.append(k)
        vals.append(4.0)
        for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            j = index.get(nb)
            if j is not None:
                rows.append(k)
                cols.append(j)
                vals.append(-1.0)
    n = len(pts)
    L = sp.csr_matrix((np.array(vals) / h**2, (rows, cols)), shape=(n, n))
    return GridLaplacian(L, pts, h)


def fd_dirichlet_lowest(domain: PlanarDomain, m: int, k: int = 1, seed: int = 0) -> np.ndarray:
    """Lowest ``k`` eigenvalues of the 5-point Dirichlet Laplacian, spacing ``1/m``."""
    L = grid_laplacian(domain, m).matrix
    if L.shape[0] <= 400:
        return np.linalg.eigvalsh(L.toarray())[:k]
    v0 = np.random.default_rng(seed).standard_normal(L.shape[0])
    vals = eigsh(L.tocsc(), k, sigma=0.0, which="LM", v0=v0, return_eigenvectors=False)
    return np.sort(vals)
