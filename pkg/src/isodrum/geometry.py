"""Exact planar predicates on rational points.

Points are pairs of :class:`fractions.Fraction` (ints also work).  No
tolerance anywhere: every predicate is decided by integer/rational signs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Point = tuple


def as_point(p) -> Point:
    return (Fraction(p[0]), Fraction(p[1]))


def sub(p: Point, q: Point) -> Point:
    return (p[0] - q[0], p[1] - q[1])


def cross(u: Point, v: Point):
    return u[0] * v[1] - u[1] * v[0]


def dot(u: Point, v: Point):
    return u[0] * v[0] + u[1] * v[1]


def orient(a: Point, b: Point, c: Point) -> int:
    """Sign of the turn a -> b -> c: +1 left, -1 right, 0 collinear."""
    d = cross(sub(b, a), sub(c, a))
    return (d > 0) - (d < 0)


def signed_area2(poly: Sequence[Point]):
    """Twice the signed area (shoelace)."""
    s = 0
    n = len(poly)
    for i in range(n):
        s += cross(poly[i], poly[(i + 1) % n])
    return s


def reflect(p: Point, a: Point, b: Point) -> Point:
    """Mirror image of ``p`` across the line through ``a`` and ``b``."""
    d = sub(b, a)
    w = sub(p, a)
    t = Fraction(dot(w, d)) / dot(d, d)
    foot = (a[0] + t * d[0], a[1] + t * d[1])
    return (2 * foot[0] - p[0], 2 * foot[1] - p[1])


def squared_length(a: Point, b: Point):
    d = sub(b, a)
    return dot(d, d)


def on_segment(p: Point, a: Point, b: Point) -> bool:
    """``p`` lies on the closed segment ab."""
    if orient(a, b, p) != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool:
    """Closed segments ab and cd share at least one point."""
    o1, o2 = orient(a, b, c), orient(a, b, d)
    o3, o4 = orient(c, d, a), orient(c, d, b)
    if o1 != o2 and o3 != o4 and 0 not in (o1, o2, o3, o4):
        return True
    return (
        (o1 == 0 and on_segment(c, a, b))
        or (o2 == 0 and on_segment(d, a, b))
        or (o3 == 0 and on_segment(a, c, d))
        or (o4 == 0 and on_segment(b, c, d))
    )


def _ccw(tri: Sequence[Point]) -> list:
    tri = list(tri)
    if signed_area2(tri) < 0:
        tri.reverse()
    return tri


def triangle_interiors_overlap(t1: Sequence[Point], t2: Sequence[Point]) -> bool:
    """True iff the open triangles intersect.

    Separating axis test restricted to the six edge normals, which is exact
    for convex polygons: interiors are disjoint iff one edge line has the
    other triangle in its closed outer half-plane.
    """
    for P, Q in ((_ccw(t1), _ccw(t2)), (_ccw(t2), _ccw(t1))):
        for i in range(3):
            a, b = P[i], P[(i + 1) % 3]
            if all(orient(a, b, q) <= 0 for q in Q):
                return False
    return True


def point_in_triangle(p: Point, tri: Sequence[Point]) -> bool:
    """Closed containment."""
    s = [orient(tri[i], tri[(i + 1) % 3], p) for i in range(3)]
    return not (any(x > 0 for x in s) and any(x < 0 for x in s))


def rigid_motion(points, cos, sin, shift, mirror: bool = False):
    """Apply ``x -> R x + shift`` (``R`` a rotation, optionally preceded by ``y -> -y``)."""
    out = []
    for x, y in points:
        if mirror:
            y = -y
        out.append((cos * x - sin * y + shift[0], sin * x + cos * y + shift[1]))
    return out
