"""P1 finite elements for the Laplacian on a refined drum, and spectrum tooling."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, eigsh

from .mesh import Mesh
from .unfolding import COLORS

DIRICHLET = "dirichlet"
NEUMANN = "neumann"
MIXED = "mixed"

# below this size the dense solver is used
DENSE_LIMIT = 400


class ConvergenceError(RuntimeError):
    """Eigensolver failed; ``partial`` holds whatever eigenvalues were found."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = np.asarray(partial if partial is not None else [])


@dataclass(frozen=True)
class BCSpec:
    mode: str = DIRICHLET
    mixed: Optional[Mapping[int, str]] = None

    def __post_init__(self):
        if self.mode not in (DIRICHLET, NEUMANN, MIXED):
            raise ValueError(f"unknown boundary condition {self.mode!r}")
        if self.mode == MIXED:
            if self.mixed is None:
                raise ValueError("mixed mode needs a color -> condition map")
            bad = {v for v in self.mixed.values()} - {DIRICHLET, NEUMANN}
            if bad:
                raise ValueError(f"unknown conditions in mixed map: {sorted(bad)}")

    @classmethod
    def parse_mixed(cls, text: str) -> "BCSpec":
        """``"0=dirichlet,1=neumann,2=dirichlet"``; ``d``/``n`` abbreviations allowed."""
        short = {"d": DIRICHLET, "n": NEUMANN}
        mapping = {}
        for item in text.split(","):
            key, _, value = item.partition("=")
            value = value.strip().lower()
            mapping[int(key)] = short.get(value, value)
        return cls(MIXED, mapping)

    def condition(self, tag: int) -> str:
        if self.mode != MIXED:
            return self.mode
        try:
            return self.mixed[int(tag)]
        except KeyError:
            raise ValueError(f"mixed map leaves boundary tag {tag} unassigned") from None

    @property
    def name(self) -> str:
        if self.mode != MIXED:
            return self.mode
        return "mixed(" + ",".join(f"{k}={v}" for k, v in sorted(self.mixed.items())) + ")"


@dataclass(frozen=True)
class AssembledSystem:
    """Stiffness ``A`` and mass ``B`` restricted to the free vertices."""

    A: sp.csr_matrix
    B: sp.csr_matrix
    free: np.ndarray
    n_vertices: int
    bc: BCSpec
    level: int = 0

    @property
    def constrained(self) -> np.ndarray:
        mask = np.ones(self.n_vertices, bool)
        mask[self.free] = False
        return np.flatnonzero(mask)

    def expand(self, x: np.ndarray) -> np.ndarray:
        """Lift free-vertex vectors to all vertices (zeros on Dirichlet vertices)."""
        out = np.zeros((self.n_vertices,) + x.shape[1:])
        out[self.free] = x
        return out


def element_matrices(points: np.ndarray, triangles: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-element P1 stiffness and mass, each of shape ``(ne, 3, 3)``; exact integration."""
    p = points[triangles]
    x, y = p[..., 0], p[..., 1]
    b = np.stack([y[:, 1] - y[:, 2], y[:, 2] - y[:, 0], y[:, 0] - y[:, 1]], axis=1)
    c = np.stack([x[:, 2] - x[:, 1], x[:, 0] - x[:, 2], x[:, 1] - x[:, 0]], axis=1)
    area = 0.5 * (b[:, 0] * c[:, 1] - b[:, 1] * c[:, 0])
    stiff = (b[:, :, None] * b[:, None, :] + c[:, :, None] * c[:, None, :]) / (4 * area)[:, None, None]
    mass = (np.ones((3, 3)) + np.eye(3)) / 12.0 * area[:, None, None]
    return stiff, mass


def _global(values: np.ndarray, triangles: np.ndarray, n: int) -> sp.csr_matrix:
    rows = np.repeat(triangles, 3, axis=1).ravel()
    cols = np.tile(triangles, (1, 3)).ravel()
    return sp.csr_matrix((values.ravel(), (rows, cols)), shape=(n, n))


def assemble_full(mesh: Mesh) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    stiff, mass = element_matrices(mesh.points, mesh.triangles)
    n = mesh.n_vertices
    return _global(stiff, mesh.triangles, n), _global(mass, mesh.triangles, n)


def dirichlet_vertices(mesh: Mesh, bc: BCSpec) -> np.ndarray:
    tags = [c for c in np.unique(mesh.boundary_tag).tolist() if bc.condition(c) == DIRICHLET]
    if not tags:
        return np.zeros(0, np.int64)
    return mesh.boundary_vertices(tags)


def assemble(mesh: Mesh, bc: BCSpec) -> AssembledSystem:
    """Assemble ``A x = lambda B x`` with Dirichlet vertices eliminated.

    Neumann edges need nothing (natural condition).  A mixed spec is applied
    per boundary tag and must assign every tag that occurs.
    """
    if bc.mode == MIXED:
        for c in COLORS:
            bc.condition(c)
    A, B = assemble_full(mesh)
    fixed = dirichlet_vertices(mesh, bc)
    mask = np.ones(mesh.n_vertices, bool)
    mask[fixed] = False
    free = np.flatnonzero(mask)
    A = A[free][:, free].tocsr()
    B = B[free][:, free].tocsr()
    return AssembledSystem(A, B, free, mesh.n_vertices, bc, mesh.level)


@dataclass
class Spectrum:
    """Lowest eigenpairs; ``vectors`` are B-normalized and live on all vertices."""

    values: np.ndarray
    residuals: np.ndarray
    level: int
    bc: str
    vectors: Optional[np.ndarray] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.values)


def relative_residuals(A, B, values, vectors) -> np.ndarray:
    """``||A x - lam B x|| / ||A x||``.

    For a null mode ``A x`` is pure round-off, so the residual is measured
    against ``||A||_inf ||x||`` instead.
    """
    Ax = A @ vectors
    Bx = B @ vectors
    r = np.linalg.norm(Ax - Bx * values, axis=0)
    ax = np.linalg.norm(Ax, axis=0)
    anorm = abs(A).sum(axis=1).max() * np.linalg.norm(vectors, axis=0)
    denom = np.where(ax > math.sqrt(np.finfo(float).eps) * anorm, ax, anorm)
    return r / denom


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[idx, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1
    return vectors * signs


def solve_lowest(
    system: AssembledSystem,
    k: int,
    tol: float = 1e-8,
    seed: int = 0,
    sigma: float = -1.0,
    maxiter: Optional[int] = None,
) -> Spectrum:
    """The ``k`` smallest eigenpairs by shift-invert Lanczos (ARPACK).

    ``sigma`` sits below zero so the shifted operator stays definite under
    pure Neumann conditions.  The start vector comes from ``seed``.
    """
    n = system.A.shape[0]
    if k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= {n} free vertices, got k={k}")
    A, B = system.A, system.B
    if n <= DENSE_LIMIT or k >= n - 1:
        values, vectors = scipy.linalg.eigh(A.toarray(), B.toarray(), subset_by_index=[0, k - 1])
    else:
        v0 = np.random.default_rng(seed).standard_normal(n)
        try:
            values, vectors = eigsh(A.tocsc(), k, M=B.tocsc(), sigma=sigma, which="LM", v0=v0, maxiter=maxiter)
        except ArpackNoConvergence as exc:
            raise ConvergenceError(f"ARPACK did not converge: {exc}", np.sort(exc.eigenvalues)) from exc
    order = np.argsort(values)
    values = values[order]
    vectors = vectors[:, order]
    norms = np.sqrt(np.einsum("ij,ij->j", vectors, B @ vectors))
    vectors = _fix_signs(vectors / norms)
    residuals = relative_residuals(A, B, values, vectors)
    if np.any(residuals > tol):
        bad = np.flatnonzero(residuals > tol)
        raise ConvergenceError(f"residual above {tol:g} for indices {bad.tolist()}", values)
    return Spectrum(values, residuals, system.level, system.bc.name, system.expand(vectors))


def drum_spectrum(domain, level: int, k: int, bc: BCSpec = BCSpec(), tol: float = 1e-8, seed: int = 0) -> Spectrum:
    from .mesh import refine

    return solve_lowest(assemble(refine(domain, level), bc), k, tol=tol, seed=seed)


# ---------------------------------------------------------------------------
# post-processing


@dataclass(frozen=True)
class Extrapolation:
    limits: np.ndarray
    orders: np.ndarray
    flagged: np.ndarray  # True where the finest raw value was returned instead


def extrapolate(values: Sequence, noise: float = 1e-10) -> Extrapolation:
    """Richardson extrapolation from three consecutive levels, per index.

    ``values`` has rows for levels L, L+1, L+2.  The order is fitted from
    the data, ``p = log2(d1 / d2)`` with ``d1 = lam_L - lam_{L+1}`` and
    ``d2 = lam_{L+1} - lam_{L+2}``, and the limit is
    ``lam_{L+2} - d2 / (2**p - 1)``.  Indices whose differences are below
    ``noise`` (relative), change sign, or fail to contract are flagged and
    get the finest value.
    """
    v = np.asarray(values, dtype=float)
    if v.ndim == 1:
        v = v[:, None]
    if v.shape[0] != 3:
        raise ValueError("need values at exactly three consecutive levels")
    d1 = v[0] - v[1]
    d2 = v[1] - v[2]
    floor = noise * np.maximum(np.abs(v[2]), 1.0)
    ok = (np.abs(d2) > floor) & (np.abs(d1) > floor) & (d1 * d2 > 0)
    ok &= np.abs(d1) > np.abs(d2)
    ratio = np.where(ok, d1 / np.where(ok, d2, 1.0), 2.0)
    orders = np.where(ok, np.log2(ratio), np.nan)
    limits = np.where(ok, v[2] - d2 / (ratio - 1.0), v[2])
    return Extrapolation(limits, orders, ~ok)


@dataclass(frozen=True)
class WeylFit:
    a: float
    b: float
    expected_a: float
    expected_b: float
    count: int

    @property
    def a_error(self) -> float:
        return abs(self.a - self.expected_a) / self.expected_a


def weyl_fit(eigenvalues: Sequence, area: float, perimeter: float, bc: str = DIRICHLET, min_count: int = 50) -> WeylFit:
    """Least-squares fit ``N(lam) ~ a lam + b sqrt(lam)``.

    The counting function is sampled at each eigenvalue with the midpoint
    convention ``N(lam_i) = i - 1/2``.  Expected values are ``area / 4pi`` and
    ``-/+ perimeter / 4pi`` (Dirichlet / Neumann).
    """
    lam = np.sort(np.asarray(eigenvalues, dtype=float))
    if len(lam) < min_count:
        raise ValueError(f"need at least {min_count} eigenvalues, got {len(lam)}")
    lam = np.clip(lam, 0.0, None)
    counts = np.arange(1, len(lam) + 1) - 0.5
    design = np.column_stack([lam, np.sqrt(lam)])
    (a, b), *_ = np.linalg.lstsq(design, counts, rcond=None)
    sign = -1.0 if bc == DIRICHLET else 1.0
    return WeylFit(float(a), float(b), area / (4 * math.pi), sign * perimeter / (4 * math.pi), len(lam))


@dataclass(frozen=True)
class SpectrumComparison:
    indices: np.ndarray
    relative: np.ndarray

    @property
    def max(self) -> float:
        return float(self.relative.max()) if len(self.relative) else 0.0


def _values(s) -> np.ndarray:
    return np.asarray(s.values if isinstance(s, Spectrum) else s, dtype=float)


def compare_spectra(s1, s2, count: int, skip_zero: Optional[bool] = None) -> SpectrumComparison:
    """Index-by-index relative differences of two sorted spectra.

    Under Neumann conditions index 0 (the shared zero mode) is skipped, so
    ``count`` indices 1..count are compared.
    """
    a, b = _values(s1), _values(s2)
    if skip_zero is None:
        skip_zero = isinstance(s1, Spectrum) and s1.bc == NEUMANN
    start = 1 if skip_zero else 0
    stop = start + count
    if len(a) < stop or len(b) < stop:
        raise ValueError(f"need {stop} eigenvalues in both spectra")
    idx = np.arange(start, stop)
    rel = np.abs(a[idx] - b[idx]) / np.abs(a[idx])
    return SpectrumComparison(idx, rel)


def is_decreasing(values: Sequence) -> bool:
    v = list(values)
    return all(x > y for x, y in zip(v, v[1:]))


def write_spectrum_csv(spectrum: Spectrum, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "lambda", "residual", "level", "bc"])
        for i, (lam, res) in enumerate(zip(spectrum.values, spectrum.residuals)):
            w.writerow([i, repr(float(lam)), repr(float(res)), spectrum.level, spectrum.bc])


def read_spectrum_csv(path) -> Spectrum:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    values = np.array([float(r["lambda"]) for r in rows])
    residuals = np.array([float(r["residual"]) for r in rows])
    level = int(rows[0]["level"]) if rows else 0
    bc = rows[0]["bc"] if rows else DIRICHLET
    return Spectrum(values, residuals, level, bc)
