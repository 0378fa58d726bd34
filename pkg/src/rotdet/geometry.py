"""2-D geometry for inclined text boxes.

Coordinates follow the image convention: x to the right, y DOWN.  "Clockwise"
means clockwise as drawn on screen, which under y-down is a positive shoelace
signed area ``0.5 * sum(x_i * y_{i+1} - x_{i+1} * y_i)``.

An inclined rectangle is stored as its first edge plus a perpendicular height,
``RotRect(p1, p2, height)``.  The remaining corners are ``p2 + height * n`` and
``p1 + height * n`` with ``n = (-u.y, u.x)`` the clockwise normal of the unit
edge direction ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from rotdet.errors import DegenerateInput

EPS = 1e-9

Coord = tuple[float, float]


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")

    def as_tuple(self) -> Coord:
        return (self.x, self.y)


def _as_point(p) -> Point2:
    if isinstance(p, Point2):
        return p
    x, y = p
    return Point2(float(x), float(y))


def shoelace_area(points: Sequence[Coord]) -> float:
    """Signed area of a polygon; positive for clockwise-on-screen order."""
    n = len(points)
    s = 0.0
    for i in range(n):
        x0, y0 = points[i]
        x1, y1 = points[(i + 1) % n]
        s += x0 * y1 - x1 * y0
    return 0.5 * s


def _cross(o: Coord, a: Coord, b: Coord) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _segments_intersect(p1, p2, p3, p4) -> bool:
    d1 = _cross(p3, p4, p1)
    d2 = _cross(p3, p4, p2)
    d3 = _cross(p1, p2, p3)
    d4 = _cross(p1, p2, p4)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and (
        (d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)
    ):
        return True

    def on_segment(a, b, c):
        return (
            min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
            and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])
        )

    if d1 == 0 and on_segment(p3, p4, p1):
        return True
    if d2 == 0 and on_segment(p3, p4, p2):
        return True
    if d3 == 0 and on_segment(p1, p2, p3):
        return True
    if d4 == 0 and on_segment(p1, p2, p4):
        return True
    return False


@dataclass(frozen=True)
class Quad:
    """Four-vertex simple polygon listed clockwise on screen."""

    vertices: tuple[Point2, Point2, Point2, Point2]

    def __post_init__(self):
        verts = tuple(_as_point(v) for v in self.vertices)
        if len(verts) != 4:
            raise ValueError(f"a quad needs 4 vertices, got {len(verts)}")
        object.__setattr__(self, "vertices", verts)
        pts = [v.as_tuple() for v in verts]
        if shoelace_area(pts) <= 0:
            raise ValueError("quad vertices are not clockwise (signed area <= 0)")
        # Non-adjacent edges of a simple quadrilateral never meet.
        if _segments_intersect(pts[0], pts[1], pts[2], pts[3]) or _segments_intersect(
            pts[1], pts[2], pts[3], pts[0]
        ):
            raise ValueError("quad is self-intersecting")

    @classmethod
    def from_coords(cls, coords: Sequence[float]) -> "Quad":
        """Build from a flat ``(x1, y1, ..., x4, y4)`` sequence."""
        if len(coords) != 8:
            raise ValueError(f"expected 8 coordinates, got {len(coords)}")
        return cls(tuple(Point2(float(coords[i]), float(coords[i + 1])) for i in range(0, 8, 2)))

    def points(self) -> list[Coord]:
        return [v.as_tuple() for v in self.vertices]

    def coords(self) -> tuple[float, ...]:
        return tuple(c for v in self.vertices for c in (v.x, v.y))

    @property
    def area(self) -> float:
        return shoelace_area(self.points())

    def is_convex(self) -> bool:
        pts = self.points()
        return all(_cross(pts[i], pts[(i + 1) % 4], pts[(i + 2) % 4]) >= 0 for i in range(4))


@dataclass(frozen=True)
class AABB:
    """Axis-aligned box given by center and size."""

    cx: float
    cy: float
    w: float
    h: float

    def __post_init__(self):
        for name in ("cx", "cy", "w", "h"):
            object.__setattr__(self, name, float(getattr(self, name)))
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"AABB.{name} is not finite")
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"AABB needs w > 0 and h > 0, got w={self.w}, h={self.h}")

    @classmethod
    def from_corners(cls, x1: float, y1: float, x2: float, y2: float) -> "AABB":
        return cls((x1 + x2) / 2.0, (y1 + y2) / 2.0, x2 - x1, y2 - y1)

    @property
    def x1(self) -> float:
        return self.cx - self.w / 2.0

    @property
    def y1(self) -> float:
        return self.cy - self.h / 2.0

    @property
    def x2(self) -> float:
        return self.cx + self.w / 2.0

    @property
    def y2(self) -> float:
        return self.cy + self.h / 2.0

    @property
    def area(self) -> float:
        return self.w * self.h

    def corners(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)

    def to_rotrect(self) -> "RotRect":
        """Lift to an inclined rectangle with p1 at the top-left corner."""
        x1, y1, x2, y2 = self.corners()
        return RotRect(Point2(x1, y1), Point2(x2, y1), y2 - y1)


@dataclass(frozen=True)
class RotRect:
    """Inclined rectangle ``(p1, p2, height)``.

    ``p1 -> p2`` is the first edge; the rectangle extends ``height`` pixels
    along the clockwise normal of that edge.
    """

    p1: Point2
    p2: Point2
    height: float
    # Exact corner coordinates when this rect was re-based from another one;
    # keeps the vertex set bit-identical across canonicalization.
    _corners: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "p1", _as_point(self.p1))
        object.__setattr__(self, "p2", _as_point(self.p2))
        object.__setattr__(self, "height", float(self.height))
        if not math.isfinite(self.height):
            raise ValueError("RotRect.height is not finite")
        if self.width <= EPS:
            raise ValueError(f"RotRect width {self.width} is not > {EPS}")
        if self.height <= EPS:
            raise ValueError(f"RotRect height {self.height} is not > {EPS}")

    @classmethod
    def from_coords(cls, x1, y1, x2, y2, h) -> "RotRect":
        return cls(Point2(float(x1), float(y1)), Point2(float(x2), float(y2)), float(h))

    @property
    def width(self) -> float:
        return math.hypot(self.p2.x - self.p1.x, self.p2.y - self.p1.y)

    @property
    def area(self) -> float:
        return self.width * self.height

    def direction(self) -> Coord:
        dx = self.p2.x - self.p1.x
        dy = self.p2.y - self.p1.y
        d = math.hypot(dx, dy)
        return (dx / d, dy / d)

    def corners(self) -> tuple[Coord, Coord, Coord, Coord]:
        """Corner coordinates ``(p1, p2, p3, p4)`` as plain tuples."""
        if self._corners is not None:
            return self._corners
        ux, uy = self.direction()
        nx, ny = -uy * self.height, ux * self.height
        x1, y1 = self.p1.x, self.p1.y
        x2, y2 = self.p2.x, self.p2.y
        return ((x1, y1), (x2, y2), (x2 + nx, y2 + ny), (x1 + nx, y1 + ny))

    @property
    def vertices(self) -> tuple[Point2, Point2, Point2, Point2]:
        return tuple(Point2(x, y) for x, y in self.corners())

    def to_quad(self) -> Quad:
        return Quad(self.vertices)

    def as_tuple(self) -> tuple[float, float, float, float, float]:
        return (self.p1.x, self.p1.y, self.p2.x, self.p2.y, self.height)


def rebase(r: RotRect, k: int) -> RotRect:
    """Same rectangle with the first point moved to corner ``k``."""
    if k == 0:
        return r
    c = r.corners()
    corners = c[k:] + c[:k]
    # Edges alternate width, height, width, height.
    height = r.height if k % 2 == 0 else r.width
    return RotRect(Point2(*corners[0]), Point2(*corners[1]), height, corners)


def canonicalize(r: RotRect) -> RotRect:
    """Pick ``p1`` as the top-most corner (leftmost on ties), ``p2`` its clockwise successor."""
    c = r.corners()
    scale = max(1.0, max(abs(v) for xy in c for v in xy))
    tol = EPS * scale
    min_y = min(y for _, y in c)
    candidates = [i for i, (_, y) in enumerate(c) if y <= min_y + tol]
    k = min(candidates, key=lambda i: (c[i][0], i))
    return rebase(r, k)


def convex_hull(points: Iterable[Coord]) -> list[Coord]:
    """Monotone-chain hull with positive (clockwise-on-screen) orientation.

    Collinear points are dropped.
    """
    pts = sorted(set((float(x), float(y)) for x, y in points))
    if len(pts) <= 2:
        return pts
    lower: list[Coord] = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[Coord] = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def min_area_rect_points(points: Iterable[Coord]) -> RotRect:
    """Minimum-area enclosing rectangle of a point set by rotating calipers.

    An optimal rectangle has one side collinear with a hull edge, so each hull
    edge is tried once while three caliper pointers (far end along the edge,
    farthest from the edge, near end along the edge) advance monotonically.
    """
    hull = convex_hull(points)
    n = len(hull)
    if n < 3 or shoelace_area(hull) <= EPS * EPS:
        raise DegenerateInput("points are collinear; no enclosing rectangle with positive area")

    def frame(i):
        (x0, y0), (x1, y1) = hull[i], hull[(i + 1) % n]
        d = math.hypot(x1 - x0, y1 - y0)
        return (x0, y0), ((x1 - x0) / d, (y1 - y0) / d)

    def along(k, o, u):
        return (hull[k][0] - o[0]) * u[0] + (hull[k][1] - o[1]) * u[1]

    def across(k, o, u):
        return -(hull[k][0] - o[0]) * u[1] + (hull[k][1] - o[1]) * u[0]

    o, u = frame(0)
    right = max(range(n), key=lambda k: along(k, o, u))
    far = max(range(n), key=lambda k: across(k, o, u))
    left = min(range(n), key=lambda k: along(k, o, u))

    best = None
    for i in range(n):
        o, u = frame(i)
        for _ in range(n):
            if along((right + 1) % n, o, u) > along(right, o, u):
                right = (right + 1) % n
            else:
                break
        for _ in range(n):
            if across((far + 1) % n, o, u) > across(far, o, u):
                far = (far + 1) % n
            else:
                break
        for _ in range(n):
            if along((left + 1) % n, o, u) < along(left, o, u):
                left = (left + 1) % n
            else:
                break
        a_min = along(left, o, u)
        a_max = along(right, o, u)
        b_max = across(far, o, u)
        area = (a_max - a_min) * b_max
        if best is None or area < best[0]:
            best = (area, o, u, a_min, a_max, b_max)

    _, o, u, a_min, a_max, b_max = best
    p1 = Point2(o[0] + a_min * u[0], o[1] + a_min * u[1])
    p2 = Point2(o[0] + a_max * u[0], o[1] + a_max * u[1])
    return canonicalize(RotRect(p1, p2, b_max))


def min_area_rect(q: Quad) -> RotRect:
    """Minimum-area rectangle enclosing a quad (its convex hull if non-convex)."""
    return min_area_rect_points(q.points())


def enclosing_aabb(r: RotRect) -> AABB:
    c = r.corners()
    xs = [x for x, _ in c]
    ys = [y for _, y in c]
    return AABB.from_corners(min(xs), min(ys), max(xs), max(ys))


def clip_convex(subject: Sequence[Coord], clipper: Sequence[Coord]) -> list[Coord]:
    """Sutherland-Hodgman: clip ``subject`` by a convex, positively oriented ``clipper``.

    The subject may be non-convex; the result then can contain zero-width
    spurs but its shoelace area is still the intersection area.
    """
    output = list(subject)
    m = len(clipper)
    for i in range(m):
        if not output:
            break
        cx0, cy0 = clipper[i]
        cx1, cy1 = clipper[(i + 1) % m]
        ex, ey = cx1 - cx0, cy1 - cy0
        inputs = output
        output = []
        sx, sy = inputs[-1]
        ds = ex * (sy - cy0) - ey * (sx - cx0)
        for px, py in inputs:
            dp = ex * (py - cy0) - ey * (px - cx0)
            if dp >= 0:
                if ds < 0:
                    t = ds / (ds - dp)
                    output.append((sx + t * (px - sx), sy + t * (py - sy)))
                output.append((px, py))
            elif ds >= 0:
                t = ds / (ds - dp)
                output.append((sx + t * (px - sx), sy + t * (py - sy)))
            sx, sy, ds = px, py, dp
    return output


def convex_intersection_area(subject: Sequence[Coord], clipper: Sequence[Coord]) -> float:
    poly = clip_convex(subject, clipper)
    if len(poly) < 3:
        return 0.0
    return max(0.0, shoelace_area(poly))


def polygon_intersection_area(a: Quad, b: Quad) -> float:
    """Area of ``a`` intersected with ``b``; ``b`` must be convex."""
    return convex_intersection_area(a.points(), b.points())


def _bounds_disjoint(ca, cb) -> bool:
    return (
        max(x for x, _ in ca) <= min(x for x, _ in cb)
        or max(x for x, _ in cb) <= min(x for x, _ in ca)
        or max(y for _, y in ca) <= min(y for _, y in cb)
        or max(y for _, y in cb) <= min(y for _, y in ca)
    )


def rotated_iou(a: RotRect, b: RotRect) -> float:
    """IoU of two inclined rectangles by convex clipping."""
    if a == b:
        return 1.0
    # Fixed argument order makes the float result exactly symmetric.
    if b.as_tuple() < a.as_tuple():
        a, b = b, a
    ca, cb = a.corners(), b.corners()
    if _bounds_disjoint(ca, cb):
        return 0.0
    area_a, area_b = a.area, b.area
    inter = min(convex_intersection_area(ca, cb), area_a, area_b)
    union = area_a + area_b - inter
    if union <= 0:
        return 0.0
    return min(1.0, max(0.0, inter / union))


def aabb_iou(a: AABB, b: AABB) -> float:
    iw = min(a.x2, b.x2) - max(a.x1, b.x1)
    ih = min(a.y2, b.y2) - max(a.y1, b.y1)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def cos_sin_deg(angle: float) -> Coord:
    # Exact values at quarter turns so 90-degree rotations map integers to integers.
    q, r = divmod(angle, 90.0)
    if r == 0:
        return [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)][int(q) % 4]
    t = math.radians(angle)
    return math.cos(t), math.sin(t)


def rotate_point(p: Coord, angle: float, center: Coord) -> Coord:
    """Rotate by ``angle`` degrees, clockwise on screen for positive angles."""
    c, s = cos_sin_deg(angle)
    dx, dy = p[0] - center[0], p[1] - center[1]
    return (center[0] + c * dx - s * dy, center[1] + s * dx + c * dy)


def rotate_quad(q: Quad, angle: float, center) -> Quad:
    center = _as_point(center).as_tuple()
    return Quad(tuple(Point2(*rotate_point(p, angle, center)) for p in q.points()))
