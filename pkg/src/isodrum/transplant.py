"""Triangle-by-triangle transplantation of eigenfunctions between the drums.

A function on a drum is cut into its restrictions to the 7 copies of the
base triangle, each pulled back to the reference triangle.  The
transplanted function on the other drum is ``g_j = sum_i T[j, i] f_i``.

Gluing along color ``c`` is encoded by the 7x7 matrix ``P_c`` with
``P_c[x, y] = 1`` when ``x`` and ``y`` are glued and ``P_c[x, x] = s``
when edge ``c`` of copy ``x`` is on the boundary, where ``s = +1`` for a
Neumann edge and ``-1`` for a Dirichlet edge.  ``T`` carries admissible
functions to admissible functions exactly when ``T P_c = P'_c T`` for all
three colors.  With Neumann conditions ``P_c`` is the permutation matrix
of the involution ``g_c`` on cosets, so the group intertwiner works; with
Dirichlet conditions the signs change and ``T`` is solved for afresh.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .gassmann import Intertwiner, solve_intertwiner
from .mesh import Mesh, reference_grid, refine
from .spectral import (
    DIRICHLET,
    NEUMANN,
    AssembledSystem,
    BCSpec,
    assemble,
    _global,
    element_matrices,
    solve_lowest,
)
from .unfolding import COLORS, GluingDiagram, PlanarDomain


class TransplantationError(ValueError):
    pass


class LevelMismatch(ValueError):
    pass


def reflection_matrices(diagram: GluingDiagram, bc: BCSpec) -> list[np.ndarray]:
    n = diagram.size
    mats = []
    for c in COLORS:
        sign = -1 if bc.condition(c) == DIRICHLET else 1
        m = np.zeros((n, n), dtype=np.int64)
        for x, y in enumerate(diagram.partner[c]):
            if y is None:
                m[x, x] = sign
            else:
                m[x, y] = 1
        mats.append(m)
    return mats


@dataclass(frozen=True)
class Transplantation:
    exact: Intertwiner
    matrix: np.ndarray  # orthogonal float version of ``exact``
    source: GluingDiagram
    target: GluingDiagram
    bc: BCSpec

    @property
    def size(self) -> int:
        return self.exact.size


def build_transplantation(
    source: GluingDiagram,
    target: GluingDiagram,
    bc: BCSpec = BCSpec(NEUMANN),
    intertwiner: Optional[Intertwiner] = None,
    seed: int = 0,
) -> Transplantation:
    """Check (or find) ``T`` against the gluing structure of both diagrams.

    Raises :class:`TransplantationError` naming the first color whose
    reflection matrices ``T`` fails to intertwine.
    """
    if source.size != target.size:
        raise TransplantationError("diagrams have different sizes")
    src = reflection_matrices(source, bc)
    dst = reflection_matrices(target, bc)
    if intertwiner is None:
        intertwiner = solve_intertwiner(src, dst, seed=seed)
    for c in COLORS:
        if not intertwiner.intertwines([src[c]], [dst[c]]):
            raise TransplantationError(f"intertwining fails for color {c}")
    return Transplantation(intertwiner, intertwiner.orthogonal(), source, target, bc)


@dataclass(frozen=True)
class PiecewiseFunction:
    """Values on the reference grid of every copy: shape ``(n_nodes, n_ref)``."""

    values: np.ndarray
    level: int

    @classmethod
    def restrict(cls, mesh: Mesh, x: np.ndarray) -> "PiecewiseFunction":
        return cls(np.asarray(x)[mesh.node_vertices], mesh.level)

    def norm(self, mass) -> float:
        """Broken L2 norm ``sqrt(sum_x f_x^T M f_x)`` with reference mass ``M``."""
        return float(np.sqrt(np.sum(self.values * (mass @ self.values.T).T)))


def reference_mass(mesh: Mesh) -> np.ndarray:
    """Mass matrix of one refined copy; every copy is congruent, so any will do."""
    _, ref_tris, _ = reference_grid(mesh.level)
    pts = mesh.points[mesh.node_vertices[0]]
    _, mass = element_matrices(pts, ref_tris)
    return _global(mass, ref_tris, len(pts))


def apply(t: Transplantation, f: PiecewiseFunction) -> PiecewiseFunction:
    if f.values.shape[0] != t.size:
        raise ValueError(f"function lives on {f.values.shape[0]} copies, transplantation on {t.size}")
    return PiecewiseFunction(t.matrix @ f.values, f.level)


def to_vertex_vector(f: PiecewiseFunction, mesh: Mesh) -> tuple[np.ndarray, float]:
    """Average the copies at shared vertices; also return the largest spread
    between copies at any vertex (the continuity defect)."""
    if f.level != mesh.level:
        raise LevelMismatch(f"function at level {f.level}, mesh at level {mesh.level}")
    ids = mesh.node_vertices.ravel()
    vals = f.values.ravel()
    n = mesh.n_vertices
    total = np.zeros(n)
    count = np.zeros(n)
    hi = np.full(n, -np.inf)
    lo = np.full(n, np.inf)
    np.add.at(total, ids, vals)
    np.add.at(count, ids, 1)
    np.maximum.at(hi, ids, vals)
    np.minimum.at(lo, ids, vals)
    return total / count, float(np.max(hi - lo))


@dataclass(frozen=True)
class EigenWitness:
    residual: float
    rayleigh_gap: float
    boundary_trace: float
    continuity_defect: float

    def to_json(self) -> dict:
        return {
            "residual": self.residual,
            "rayleigh_gap": self.rayleigh_gap,
            "boundary_trace": self.boundary_trace,
            "continuity_defect": self.continuity_defect,
        }


def verify_eigen(transplanted: PiecewiseFunction, mesh: Mesh, system: AssembledSystem, lam: float) -> EigenWitness:
    """How well a transplanted function solves ``A x = lam B x`` on the target.

    ``boundary_trace`` and ``continuity_defect`` are relative to the
    function's maximum modulus.
    """
    x, defect = to_vertex_vector(transplanted, mesh)
    scale = float(np.max(np.abs(x))) or 1.0
    xf = x[system.free]
    Ax = system.A @ xf
    Bx = system.B @ xf
    residual = float(np.linalg.norm(Ax - lam * Bx) / np.linalg.norm(Ax))
    rq = float(xf @ Ax / (xf @ Bx))
    constrained = system.constrained
    trace = float(np.max(np.abs(x[constrained])) / scale) if len(constrained) else 0.0
    return EigenWitness(residual, abs(rq - lam) / abs(lam), trace, defect / scale)


def transplant_study(
    domain1: PlanarDomain,
    domain2: PlanarDomain,
    levels: Sequence[int],
    count: int,
    bc: BCSpec = BCSpec(DIRICHLET),
    tol: float = 1e-8,
    seed: int = 0,
) -> dict:
    """Transplant the lowest ``count`` eigenfunctions of drum 1 to drum 2 at each level."""
    t = build_transplantation(domain1.diagram, domain2.diagram, bc, seed=seed)
    out = {"bc": bc.name, "matrix": t.exact.to_json(), "levels": []}
    for level in levels:
        mesh1, mesh2 = refine(domain1, level), refine(domain2, level)
        sys1, sys2 = assemble(mesh1, bc), assemble(mesh2, bc)
        spec = solve_lowest(sys1, count if bc.mode != NEUMANN else count + 1, tol=tol, seed=seed)
        mass = reference_mass(mesh1)
        rows = []
        first = 1 if bc.mode == NEUMANN else 0
        for i in range(first, len(spec.values)):
            f = PiecewiseFunction.restrict(mesh1, spec.vectors[:, i])
            g = apply(t, f)
            w = verify_eigen(g, mesh2, sys2, float(spec.values[i]))
            row = {"index": i, "lambda": float(spec.values[i]), **w.to_json()}
            row["norm_ratio"] = g.norm(mass) / f.norm(mass)
            rows.append(row)
        out["levels"].append({"level": level, "eigenfunctions": rows})
    return out
