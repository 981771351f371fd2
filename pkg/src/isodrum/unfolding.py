"""Gluing diagrams and their unfolding into plane polygons.

A gluing diagram is three partial matchings on the nodes (one per edge
color).  Node ``x`` stands for a copy of the base triangle; a color-``c``
match between ``x`` and ``y`` glues the two copies along their edge ``c``
(the edge opposite vertex ``c``), an unmatched slot is a boundary edge.
Unfolding places the copies in the plane by successive reflections.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from . import geometry as geo
from .gassmann import (
    CosetAction,
    PermutationGroup,
    Subgroup,
    conjugacy_classes,
    coset_action,
    element_order,
)

COLORS = (0, 1, 2)


class DiagramSearchError(LookupError):
    pass


@dataclass(frozen=True)
class GluingDiagram:
    """``partner[c][x]`` is the node glued to ``x`` along color ``c``, or None."""

    partner: tuple

    def __post_init__(self):
        n = self.size
        for c, match in enumerate(self.partner):
            if len(match) != n:
                raise ValueError("every color needs one slot per node")
            for x, y in enumerate(match):
                if y is None:
                    continue
                if y == x:
                    raise ValueError(f"color {c}: node {x} matched to itself")
                if match[y] != x:
                    raise ValueError(f"color {c}: matching is not symmetric at {x}")

    @property
    def size(self) -> int:
        return len(self.partner[0])

    @classmethod
    def from_action(cls, action: CosetAction, involutions: Sequence) -> "GluingDiagram":
        """Schreier graph: ``x`` joined by color ``c`` to ``x . g_c`` when moved."""
        partner = []
        for g in involutions:
            p = action(g)
            partner.append(tuple(None if p[x] == x else p[x] for x in range(len(p))))
        return cls(tuple(partner))

    def edges(self) -> list[tuple[int, int, int]]:
        """Matched pairs as ``(x, y, color)`` with ``x < y``."""
        return [
            (x, y, c)
            for c, match in enumerate(self.partner)
            for x, y in enumerate(match)
            if y is not None and x < y
        ]

    def boundary_counts(self) -> tuple[int, ...]:
        return tuple(sum(y is None for y in match) for match in self.partner)

    def is_connected(self) -> bool:
        seen = {0}
        queue = deque([0])
        while queue:
            x = queue.popleft()
            for match in self.partner:
                y = match[x]
                if y is not None and y not in seen:
                    seen.add(y)
                    queue.append(y)
        return len(seen) == self.size

    def is_tree(self) -> bool:
        return len(self.edges()) == self.size - 1 and self.is_connected()

    def to_json(self) -> dict:
        return {"nodes": self.size, "matchings": [list(m) for m in self.partner]}

    @classmethod
    def from_json(cls, data: dict) -> "GluingDiagram":
        return cls(tuple(tuple(m) for m in data["matchings"]))


@dataclass(frozen=True)
class BaseTriangle:
    vertices: tuple  # three exact points; edge c is opposite vertex c

    def __post_init__(self):
        pts = tuple(geo.as_point(v) for v in self.vertices)
        if len(pts) != 3:
            raise ValueError("a triangle has three vertices")
        if geo.signed_area2(pts) == 0:
            raise ValueError("degenerate base triangle")
        object.__setattr__(self, "vertices", pts)

    @classmethod
    def right_isosceles(cls) -> "BaseTriangle":
        return cls(((0, 0), (1, 0), (0, 1)))

    @classmethod
    def parse(cls, text: str) -> "BaseTriangle":
        """From ``"x0,y0,x1,y1,x2,y2"``; entries may be fractions like ``1/3``."""
        vals = [Fraction(s.strip()) for s in text.split(",")]
        if len(vals) != 6:
            raise ValueError("expected six comma separated coordinates")
        return cls(tuple(zip(vals[0::2], vals[1::2])))

    @property
    def area(self) -> Fraction:
        return abs(geo.signed_area2(self.vertices)) / 2


@dataclass(frozen=True)
class DiagramPair:
    first: GluingDiagram
    second: GluingDiagram
    involutions: tuple


def involutions(group: PermutationGroup) -> list:
    return [g for g in group.elements if element_order(g) == 2]


def derive_diagrams(
    group: PermutationGroup,
    H: Subgroup,
    K: Subgroup,
    base: Optional[BaseTriangle] = None,
) -> DiagramPair:
    """Lexicographically first involution triple whose Schreier graphs on
    ``H\\G`` and ``K\\G`` are both trees.

    With ``base`` given, the triple must in addition unfold to two embedded,
    noncongruent domains with that base triangle.  Symmetric bases need the
    second condition: on a right isosceles base, swapping the two leg colors
    is a reflection, so some tree pairs unfold to mirror images.
    """
    act_h = coset_action(group, H)
    act_k = coset_action(group, K)
    for triple in itertools.product(involutions(group), repeat=3):
        d1 = GluingDiagram.from_action(act_h, triple)
        if not d1.is_tree():
            continue
        d2 = GluingDiagram.from_action(act_k, triple)
        if not d2.is_tree():
            continue
        if base is not None:
            e1, e2 = unfold(d1, base), unfold(d2, base)
            if not (check_embedding(e1) and check_embedding(e2)):
                continue
            if boundary_signature(e1) == boundary_signature(e2):
                continue
        return DiagramPair(d1, d2, tuple(triple))
    raise DiagramSearchError("no involution triple gives tree diagrams in both actions")


def involution_class_size(group: PermutationGroup) -> int:
    table = conjugacy_classes(group)
    return sum(len(c) for c, r in zip(table.classes, table.representatives) if element_order(r) == 2)


# ---------------------------------------------------------------------------
# unfolding


@dataclass(frozen=True)
class PlanarDomain:
    base: BaseTriangle
    diagram: GluingDiagram
    triangles: tuple  # node -> (v0, v1, v2) exact, labelled like the base
    root: int = 0
    _polygon: object = field(default=None, repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.triangles)

    def neighbor(self, node: int, color: int) -> Optional[int]:
        return self.diagram.partner[color][node]

    def edge(self, node: int, color: int) -> tuple:
        """Endpoints of edge ``color`` of triangle ``node``, in increasing label order."""
        tri = self.triangles[node]
        a, b = [k for k in COLORS if k != color]
        return tri[a], tri[b]

    def boundary_edges(self) -> list[tuple[int, int, tuple, tuple]]:
        """``(node, color, p, q)`` for every unglued edge."""
        return [
            (x, c) + self.edge(x, c)
            for x in range(self.size)
            for c in COLORS
            if self.neighbor(x, c) is None
        ]

    def boundary_color_counts(self) -> tuple[int, ...]:
        counts = [0, 0, 0]
        for _, c, _, _ in self.boundary_edges():
            counts[c] += 1
        return tuple(counts)

    @property
    def area(self) -> Fraction:
        return sum((abs(geo.signed_area2(t)) for t in self.triangles), Fraction(0)) / 2

    @property
    def perimeter(self) -> float:
        return sum(math.sqrt(geo.squared_length(p, q)) for _, _, p, q in self.boundary_edges())

    @property
    def boundary_polygon(self) -> Optional[list]:
        """Boundary as a counter-clockwise vertex cycle, or None if the
        boundary edges do not chain into one closed curve."""
        if self._polygon is None:
            object.__setattr__(self, "_polygon", _chain_boundary(self.boundary_edges()) or False)
        return self._polygon or None

    def bounding_box(self) -> tuple:
        xs = [p[0] for t in self.triangles for p in t]
        ys = [p[1] for t in self.triangles for p in t]
        return min(xs), min(ys), max(xs), max(ys)

    def transformed(self, cos, sin, shift=(0, 0), mirror: bool = False) -> "PlanarDomain":
        """Image under a rigid motion; ``cos``/``sin`` should be exact rationals."""
        tris = tuple(tuple(geo.rigid_motion(t, cos, sin, shift, mirror)) for t in self.triangles)
        base = BaseTriangle(tuple(geo.rigid_motion(self.base.vertices, cos, sin, shift, mirror)))
        return PlanarDomain(base, self.diagram, tris, self.root)

    def to_json(self) -> dict:
        def exact(p):
            return [[p[0].numerator, p[0].denominator], [p[1].numerator, p[1].denominator]]

        status = []
        for x in range(self.size):
            row = []
            for c in COLORS:
                y = self.neighbor(x, c)
                row.append({"color": c, "kind": "boundary"} if y is None else {"color": c, "kind": "interior", "node": y})
            status.append(row)
        poly = self.boundary_polygon
        return {
            "base": [exact(v) for v in self.base.vertices],
            "root": self.root,
            "diagram": self.diagram.to_json(),
            "triangles": [[exact(v) for v in t] for t in self.triangles],
            "triangles_decimal": [[[float(v[0]), float(v[1])] for v in t] for t in self.triangles],
            "edge_status": status,
            "boundary_polygon": None if poly is None else [exact(v) for v in poly],
            "area": [self.area.numerator, self.area.denominator],
            "perimeter": self.perimeter,
            "boundary_color_counts": list(self.boundary_color_counts()),
            "signature": signature_to_json(boundary_signature(self)) if poly is not None else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> "PlanarDomain":
        """Rebuild from the base triangle, diagram and root alone."""
        base = BaseTriangle(tuple((Fraction(*x), Fraction(*y)) for x, y in data["base"]))
        return unfold(GluingDiagram.from_json(data["diagram"]), base, data.get("root", 0))


def _reflect_across_edge(tri: tuple, color: int) -> tuple:
    a, b = [tri[k] for k in COLORS if k != color]
    out = list(tri)
    out[color] = geo.reflect(tri[color], a, b)
    return tuple(out)


def unfold(diagram: GluingDiagram, base: BaseTriangle, root: int = 0) -> PlanarDomain:
    """Breadth-first placement by reflection; the root copy is ``base`` itself."""
    placed: list = [None] * diagram.size
    placed[root] = base.vertices
    queue = deque([root])
    while queue:
        x = queue.popleft()
        for c in COLORS:
            y = diagram.partner[c][x]
            if y is not None and placed[y] is None:
                placed[y] = _reflect_across_edge(placed[x], c)
                queue.append(y)
    if any(t is None for t in placed):
        raise ValueError("diagram is not connected")
    return PlanarDomain(base, diagram, tuple(placed), root)


def _chain_boundary(edges) -> Optional[list]:
    adjacency: dict = {}
    for _, _, p, q in edges:
        adjacency.setdefault(p, []).append(q)
        adjacency.setdefault(q, []).append(p)
    if not adjacency or any(len(v) != 2 for v in adjacency.values()):
        return None
    start = min(adjacency)
    cycle = [start]
    prev, cur = start, adjacency[start][0]
    while cur != start:
        cycle.append(cur)
        a, b = adjacency[cur]
        prev, cur = cur, (b if a == prev else a)
        if len(cycle) > len(edges):
            return None
    if len(cycle) != len(edges):
        return None
    if geo.signed_area2(cycle) < 0:
        cycle = [cycle[0]] + cycle[:0:-1]
    return cycle


def check_embedding(domain: PlanarDomain) -> bool:
    """Exact test that the copies tile a simply connected polygon.

    Triangle interiors must be pairwise disjoint and the boundary edges must
    form a single simple closed curve.
    """
    tris = domain.triangles
    for i, j in itertools.combinations(range(len(tris)), 2):
        if geo.triangle_interiors_overlap(tris[i], tris[j]):
            return False
    edges = domain.boundary_edges()
    if domain.boundary_polygon is None:
        return False
    for (_, _, a, b), (_, _, c, d) in itertools.combinations(edges, 2):
        shared = {a, b} & {c, d}
        if len(shared) == 2:
            return False
        if shared:
            s = shared.pop()
            u = b if a == s else a
            w = d if c == s else c
            # adjacent edges may only meet at their common endpoint
            if geo.orient(s, u, w) == 0 and geo.dot(geo.sub(u, s), geo.sub(w, s)) > 0:
                return False
        elif geo.segments_intersect(a, b, c, d):
            return False
    return abs(geo.signed_area2(domain.boundary_polygon)) == 2 * domain.area


# ---------------------------------------------------------------------------
# nonisometry certificate


def _angle_key(prev, v, nxt) -> tuple:
    """Exact encoding of the interior angle at ``v`` of a CCW polygon."""
    a = geo.sub(prev, v)
    b = geo.sub(nxt, v)
    s = geo.cross(b, a)
    d = geo.dot(a, b)
    cos2 = Fraction(d * d) / (geo.dot(a, a) * geo.dot(b, b))
    return ((s > 0) - (s < 0), (d > 0) - (d < 0), cos2)


def _drop_straight(poly: list) -> list:
    out = []
    n = len(poly)
    for i in range(n):
        prev, v, nxt = poly[i - 1], poly[i], poly[(i + 1) % n]
        if geo.orient(prev, v, nxt) == 0 and geo.dot(geo.sub(v, prev), geo.sub(nxt, v)) > 0:
            continue
        out.append(v)
    return out


def boundary_signature(domain: PlanarDomain) -> tuple:
    """Canonical cyclic (squared side, interior angle) sequence.

    Straight-angle vertices are dropped first; the result is the
    lexicographic minimum over rotations and both traversal directions, so
    congruent polygons get identical signatures.
    """
    poly = domain.boundary_polygon
    if poly is None:
        raise ValueError("domain has no simple boundary polygon")
    poly = _drop_straight(poly)
    n = len(poly)
    sides = [geo.squared_length(poly[i], poly[(i + 1) % n]) for i in range(n)]
    angles = [_angle_key(poly[i - 1], poly[i], poly[(i + 1) % n]) for i in range(n)]
    forward = [(sides[i], angles[(i + 1) % n]) for i in range(n)]
    backward = [(sides[i], angles[i]) for i in reversed(range(n))]
    candidates = [seq[k:] + seq[:k] for seq in (forward, backward) for k in range(n)]
    return tuple(min(candidates))


def signature_to_json(signature: tuple) -> list:
    return [
        {"side2": [s.numerator, s.denominator], "sin_sign": a[0], "cos_sign": a[1], "cos2": [a[2].numerator, a[2].denominator]}
        for s, a in signature
    ]


# ---------------------------------------------------------------------------
# drawing

EDGE_COLORS = ("#d62728", "#1f77b4", "#2ca02c")


def to_svg(domain: PlanarDomain, scale: float = 80.0, margin: float = 20.0, labels: bool = True) -> str:
    """Deterministic SVG: one ``<polygon>`` per triangle, glued edges colored
    by gluing color, boundary stroked as a closed ``<path>``."""
    x0, y0, x1, y1 = (float(v) for v in domain.bounding_box())
    width = (x1 - x0) * scale + 2 * margin
    height = (y1 - y0) * scale + 2 * margin

    def xy(p):
        # flip y so the picture is not mirrored
        return f"{(float(p[0]) - x0) * scale + margin:.4f},{(y1 - float(p[1])) * scale + margin:.4f}"

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.4f}" height="{height:.4f}" '
        f'viewBox="0 0 {width:.4f} {height:.4f}">',
        '<g id="triangles" fill="#f2f2f2" stroke="none">',
    ]
    for node, tri in enumerate(domain.triangles):
        pts = " ".join(xy(p) for p in tri)
        out.append(f'<polygon data-node="{node}" points="{pts}"/>')
    out.append("</g>")
    out.append('<g id="glued-edges" stroke-width="1" stroke-dasharray="4,3">')
    for x, y, c in domain.diagram.edges():
        p, q = domain.edge(x, c)
        a, b = xy(p).split(","), xy(q).split(",")
        out.append(
            f'<line data-color="{c}" x1="{a[0]}" y1="{a[1]}" x2="{b[0]}" y2="{b[1]}" stroke="{EDGE_COLORS[c]}"/>'
        )
    out.append("</g>")
    poly = domain.boundary_polygon
    if poly is not None:
        d = "M " + " L ".join(xy(p) for p in poly) + " Z"
        out.append(f'<path id="boundary" d="{d}" fill="none" stroke="#000000" stroke-width="2"/>')
    if labels:
        out.append('<g id="labels" font-family="sans-serif" font-size="12" text-anchor="middle">')
        for node, tri in enumerate(domain.triangles):
            cx = sum(p[0] for p in tri) / 3
            cy = sum(p[1] for p in tri) / 3
            px, py = xy((cx, cy)).split(",")
            out.append(f'<text x="{px}" y="{py}">{escape(str(node))}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
