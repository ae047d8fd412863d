"""Planar primitives: points, polylines, hulls, support functions, half-planes.

Lines are parameterized by ``(rho, theta)``: the line is ``{p : p . n = rho}``
with ``n = (cos theta, sin theta)`` and ``rho >= 0``.  A :class:`DirectedLine`
additionally picks one closed side as the disaster half-plane.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

EPS = 1e-9
TWO_PI = 2.0 * math.pi


class Point2(NamedTuple):
    x: float
    y: float


def as_point(p) -> Point2:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise ValueError(f"non-finite point {p!r}")
    return Point2(x, y)


def normalize_angle(theta: float) -> float:
    """Map an angle into [-pi, pi)."""
    t = math.fmod(theta + math.pi, TWO_PI)
    if t < 0:
        t += TWO_PI
    t -= math.pi
    return -math.pi if t >= math.pi else t


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Polyline:
    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        if len(v) < 2:
            raise ValueError("a polyline needs at least 2 vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("polyline has non-finite coordinates")
        steps = np.hypot(*np.diff(v, axis=0).T)
        if np.any(steps <= EPS):
            raise ValueError("polyline has coincident consecutive vertices")
        object.__setattr__(self, "vertices", _readonly(v))

    @property
    def start(self) -> Point2:
        return Point2(*self.vertices[0])

    @property
    def end(self) -> Point2:
        return Point2(*self.vertices[-1])

    @property
    def length(self) -> float:
        return float(np.hypot(*np.diff(self.vertices, axis=0).T).sum())

    def reversed(self) -> "Polyline":
        return Polyline(self.vertices[::-1])

    def translated(self, dx: float, dy: float) -> "Polyline":
        return Polyline(self.vertices + (dx, dy))

    def __len__(self):
        return len(self.vertices)

    def __repr__(self):
        return f"Polyline({len(self.vertices)} vertices, {self.start} -> {self.end})"


def concat_polylines(parts: Sequence[Polyline]) -> Polyline:
    """Join polylines end to start; shared junction vertices appear once."""
    out = [parts[0].vertices]
    for prev, part in zip(parts, parts[1:]):
        if np.hypot(*(part.vertices[0] - prev.vertices[-1])) > 1e-7:
            raise ValueError("polylines do not join")
        out.append(part.vertices[1:])
    return Polyline(np.vstack(out))


Geometry = Union[Polyline, Point2, Sequence[float], np.ndarray]


def vertices_of(geoms: Iterable[Geometry]) -> np.ndarray:
    """Stack the vertices of a mixed list of polylines, points and arrays."""
    chunks = []
    for g in geoms:
        if isinstance(g, Polyline):
            chunks.append(g.vertices)
        elif isinstance(g, HullPolygon):
            chunks.append(g.vertices)
        else:
            chunks.append(np.asarray(g, dtype=float).reshape(-1, 2))
    if not chunks:
        return np.empty((0, 2))
    return np.vstack(chunks)


# ---------------------------------------------------------------- lines


@dataclass(frozen=True)
class DirectedLine:
    """A line plus the closed side that is destroyed.

    ``side="far"`` is ``{p . n >= rho}`` (away from the origin),
    ``side="near"`` is ``{p . n <= rho}``.
    """

    rho: float
    theta: float
    side: str = "far"

    def __post_init__(self):
        if not self.rho >= 0:
            raise ValueError(f"rho must be >= 0, got {self.rho}")
        if self.side not in ("far", "near"):
            raise ValueError(f"side must be 'far' or 'near', got {self.side!r}")
        object.__setattr__(self, "rho", float(self.rho))
        object.__setattr__(self, "theta", normalize_angle(float(self.theta)))

    @property
    def normal(self) -> np.ndarray:
        return np.array([math.cos(self.theta), math.sin(self.theta)])


def signed_offset(line: DirectedLine, p) -> float:
    """Non-negative iff ``p`` lies in the disaster half-plane of ``line``."""
    d = p[0] * math.cos(line.theta) + p[1] * math.sin(line.theta) - line.rho
    return d if line.side == "far" else -d


def segment_meets_halfplane(a, b, line: DirectedLine) -> bool:
    return max(signed_offset(line, a), signed_offset(line, b)) >= 0


# ---------------------------------------------------------------- hulls


@dataclass(frozen=True, eq=False)
class HullPolygon:
    """Counter-clockwise convex hull; 1 vertex (point) or 2 (segment) allowed."""

    vertices: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vertices", _readonly(np.asarray(self.vertices).reshape(-1, 2)))

    @property
    def is_degenerate(self) -> bool:
        return len(self.vertices) < 3

    @property
    def perimeter(self) -> float:
        v = self.vertices
        if len(v) == 1:
            return 0.0
        if len(v) == 2:
            # a segment is met by lines like a flattened convex body: twice its length
            return 2.0 * float(np.hypot(*(v[1] - v[0])))
        closed = np.vstack([v, v[:1]])
        return float(np.hypot(*np.diff(closed, axis=0).T).sum())

    @property
    def area(self) -> float:
        v = self.vertices
        if len(v) < 3:
            return 0.0
        x, y = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def support(self, theta):
        """Support function ``max_p p . n(theta)``, vectorized over ``theta``."""
        return support_from_table(support_table(self.vertices), theta)

    def same_as(self, other: "HullPolygon", tol: float = EPS) -> bool:
        a, b = self.vertices, other.vertices
        if a.shape != b.shape:
            return False
        for k in range(len(b)):
            if np.allclose(a, np.roll(b, k, axis=0), atol=tol, rtol=0):
                return True
        return False


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _prune_collinear(ring: list) -> list:
    # drop vertices within EPS of the chord joining their neighbours
    changed = True
    while changed and len(ring) >= 3:
        changed = False
        for k in range(len(ring)):
            o, a, b = ring[k - 1], ring[k], ring[(k + 1) % len(ring)]
            if _cross(o, a, b) <= EPS * math.hypot(b[0] - o[0], b[1] - o[1]):
                del ring[k]
                changed = True
                break
    return ring


def convex_hull(points) -> HullPolygon:
    """Monotone-chain hull; drops interior, duplicate and collinear points."""
    pts = vertices_of([points]) if not isinstance(points, np.ndarray) else points.reshape(-1, 2)
    if len(pts) == 0:
        raise ValueError("convex hull of an empty point set")
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite coordinates")
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    ps = [tuple(p) for p in pts[order]]
    uniq = [ps[0]]
    for p in ps[1:]:
        if math.hypot(p[0] - uniq[-1][0], p[1] - uniq[-1][1]) > EPS:
            uniq.append(p)
    if len(uniq) == 1:
        return HullPolygon(np.array(uniq))

    lower: list = []
    for p in uniq:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(uniq):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = _prune_collinear(lower[:-1] + upper[:-1])
    if len(hull) < 3:
        # (near-)collinear input: keep the two extremes along the spread direction
        u = np.array(uniq)
        far = u[np.argmax(np.hypot(*(u - u[0]).T))]
        proj = (u - u[0]) @ (far - u[0])
        hull = [uniq[int(np.argmin(proj))], uniq[int(np.argmax(proj))]]
    return HullPolygon(np.array(hull))


def hull_perimeter(geoms) -> float:
    """Perimeter of the convex hull of every vertex in ``geoms``.

    A segment hull counts twice its length and a single point counts zero.
    """
    v = vertices_of(geoms)
    if len(v) == 0:
        raise ValueError("hull perimeter of empty geometry")
    return convex_hull(v).perimeter


def support_table(vertices: np.ndarray):
    """Lookup table for the support function of a CCW convex vertex list.

    Returns ``(angles, verts)``: for ``theta`` in ``[angles[k], angles[k+1])``
    (cyclically) the maximizing vertex is ``verts[k]``.
    """
    v = np.asarray(vertices, dtype=float).reshape(-1, 2)
    if len(v) == 1:
        return np.array([-math.pi]), v.copy()
    edges = np.roll(v, -1, axis=0) - v
    # outward normal of edge j (CCW order) is (ey, -ex); vertex j+1 wins from there on
    ang = np.arctan2(-edges[:, 0], edges[:, 1])
    nxt = np.roll(v, -1, axis=0)
    order = np.argsort(ang, kind="stable")
    return ang[order], nxt[order]


def support_from_table(table, theta):
    angles, verts = table
    th = np.asarray(theta, dtype=float)
    idx = np.searchsorted(angles, th, side="right") - 1  # -1 wraps to the last entry
    vx, vy = verts[idx, 0], verts[idx, 1]
    out = vx * np.cos(th) + vy * np.sin(th)
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------- regions


class ConvexRegion:
    """Area of interest. Subclasses: :class:`Disk`, :class:`ConvexPolygon`."""

    def support(self, theta):
        raise NotImplementedError

    @property
    def perimeter(self) -> float:
        raise NotImplementedError

    @property
    def centroid(self) -> Point2:
        raise NotImplementedError

    def translated(self, dx: float, dy: float) -> "ConvexRegion":
        raise NotImplementedError

    def contains(self, pts, tol: float = 1e-7) -> np.ndarray:
        raise NotImplementedError

    def contains_origin(self) -> bool:
        raise NotImplementedError

    @property
    def h_max(self) -> float:
        raise NotImplementedError


@dataclass(frozen=True)
class Disk(ConvexRegion):
    center: Point2
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_point(self.center))
        if not self.radius > 0:
            raise ValueError("disk radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    def support(self, theta):
        th = np.asarray(theta, dtype=float)
        out = self.center.x * np.cos(th) + self.center.y * np.sin(th) + self.radius
        return float(out) if np.ndim(out) == 0 else out

    @property
    def perimeter(self) -> float:
        return TWO_PI * self.radius

    @property
    def centroid(self) -> Point2:
        return self.center

    @property
    def h_max(self) -> float:
        return math.hypot(*self.center) + self.radius

    def translated(self, dx, dy):
        return Disk(Point2(self.center.x + dx, self.center.y + dy), self.radius)

    def contains(self, pts, tol=1e-7):
        p = np.asarray(pts, dtype=float).reshape(-1, 2) - self.center
        return np.hypot(p[:, 0], p[:, 1]) <= self.radius + tol

    def contains_origin(self):
        return math.hypot(*self.center) < self.radius - EPS


@dataclass(frozen=True, eq=False)
class ConvexPolygon(ConvexRegion):
    vertices: np.ndarray

    def __post_init__(self):
        hull = convex_hull(np.asarray(self.vertices, dtype=float).reshape(-1, 2))
        if hull.is_degenerate or hull.area <= EPS:
            raise ValueError("convex polygon must have positive area")
        given = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        if len(given) != len(hull.vertices) and not _all_on_hull(given, hull):
            raise ValueError("polygon vertices are not in convex position")
        object.__setattr__(self, "vertices", hull.vertices)
        object.__setattr__(self, "_table", support_table(hull.vertices))

    def support(self, theta):
        return support_from_table(self._table, theta)

    @property
    def perimeter(self) -> float:
        return HullPolygon(self.vertices).perimeter

    @property
    def centroid(self) -> Point2:
        v = self.vertices
        x, y = v[:, 0], v[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        c = x * yn - xn * y
        a = c.sum() / 2.0
        return Point2(float(((x + xn) * c).sum() / (6 * a)), float(((y + yn) * c).sum() / (6 * a)))

    @property
    def h_max(self) -> float:
        return float(np.hypot(self.vertices[:, 0], self.vertices[:, 1]).max())

    def translated(self, dx, dy):
        return ConvexPolygon(self.vertices + (dx, dy))

    def contains(self, pts, tol=1e-7):
        p = np.asarray(pts, dtype=float).reshape(-1, 2)
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        lens = np.hypot(e[:, 0], e[:, 1])
        # signed distance to each edge line, positive outside
        d = (e[:, 1] * (p[:, None, 0] - v[:, 0]) - e[:, 0] * (p[:, None, 1] - v[:, 1])) / lens
        return np.all(d <= tol, axis=1)

    def contains_origin(self):
        v = self.vertices
        e = np.roll(v, -1, axis=0) - v
        d = (e[:, 1] * -v[:, 0] - e[:, 0] * -v[:, 1]) / np.hypot(e[:, 0], e[:, 1])
        return bool(np.all(d < -EPS))


def _all_on_hull(points: np.ndarray, hull: HullPolygon) -> bool:
    # collinear extra vertices are merged; anything strictly inside is rejected
    v = hull.vertices
    e = np.roll(v, -1, axis=0) - v
    d = (e[:, 1] * (points[:, None, 0] - v[:, 0]) - e[:, 0] * (points[:, None, 1] - v[:, 1])) / np.hypot(
        e[:, 0], e[:, 1]
    )
    return bool(np.all(np.abs(d).min(axis=1) <= 1e-7))


def _require_origin_inside(region: ConvexRegion):
    if not region.contains_origin():
        raise ValueError("frame origin must lie in the interior of the region; recenter first")


def support_distance(region: ConvexRegion, theta):
    _require_origin_inside(region)
    return region.support(theta)


def line_meets_convex(line: DirectedLine, region: ConvexRegion) -> bool:
    return line.rho <= support_distance(region, line.theta)


def recentered(region: ConvexRegion):
    """Translate ``region`` so its centroid is the origin; returns (region, (dx, dy))."""
    c = region.centroid
    return region.translated(-c.x, -c.y), (-c.x, -c.y)


# ---------------------------------------------------------------- arcs


def _cos_sin(angle: float):
    # exact values at quarter turns so arc endpoints land on axis-aligned points
    q = angle / (math.pi / 2)
    k = round(q)
    if abs(q - k) < 1e-12:
        return ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))[k % 4]
    return math.cos(angle), math.sin(angle)


def discretize_arc(center, radius: float, angle_start: float, angle_end: float, max_sagitta: float | None = None) -> Polyline:
    """Chordal approximation of a circular arc, swept from start to end angle.

    The sweep direction follows the sign of ``angle_end - angle_start``. Every
    chord stays within ``max_sagitta`` (default ``1e-4 * radius``) of the arc.
    """
    if not radius > 0:
        raise ValueError("arc radius must be positive")
    if max_sagitta is None:
        max_sagitta = 1e-4 * radius
    if not max_sagitta > 0:
        raise ValueError("max_sagitta must be positive")
    sweep = angle_end - angle_start
    if abs(sweep) * radius <= EPS:
        raise ValueError("degenerate arc: start and end angles coincide")
    cx, cy = as_point(center)
    half_step = math.acos(max(1.0 - max_sagitta / radius, -1.0))
    n = max(1, math.ceil(abs(sweep) / (2 * half_step)))
    pts = []
    for k in range(n + 1):
        c, s = _cos_sin(angle_start + sweep * k / n)
        pts.append((cx + radius * c, cy + radius * s))
    return Polyline(np.array(pts))


# ---------------------------------------------------------------- segments


def point_segment_distance(p: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Distance from points ``p`` (m,2) to segments ``a``-``b`` (k,2); shape (m,k)."""
    p = np.asarray(p, dtype=float).reshape(-1, 2)
    ab = b - a
    denom = np.maximum((ab * ab).sum(axis=1), 1e-300)
    ap = p[:, None, :] - a[None, :, :]
    t = np.clip((ap * ab[None]).sum(axis=2) / denom, 0.0, 1.0)
    closest = a[None] + t[..., None] * ab[None]
    return np.hypot(*(p[:, None, :] - closest).transpose(2, 0, 1))


def segment_crossings(a: np.ndarray, b: np.ndarray, c: np.ndarray, d: np.ndarray):
    """Parameters along ``a``-``b`` where it properly meets segments ``c``-``d``.

    ``a``, ``b`` are single points; ``c``, ``d`` arrays of shape (k, 2).
    Returns sorted ``t`` values in the open interval (0, 1). Collinear overlaps
    are reported by their overlap endpoints.
    """
    r = b - a
    s = d - c
    denom = r[0] * s[:, 1] - r[1] * s[:, 0]
    qp = c - a
    ts = []
    nonpar = np.abs(denom) > 1e-15
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / denom
        u = (qp[:, 0] * r[1] - qp[:, 1] * r[0]) / denom
    hit = nonpar & (t > -EPS) & (t < 1 + EPS) & (u > -EPS) & (u < 1 + EPS)
    ts.extend(t[hit].tolist())
    rr = float(r @ r)
    if (~nonpar).any():
        for k in np.flatnonzero(~nonpar):
            # parallel: only collinear pieces matter
            if abs(qp[k, 0] * r[1] - qp[k, 1] * r[0]) > EPS * math.sqrt(rr):
                continue
            for q in (c[k], d[k]):
                ts.append(float((q - a) @ r) / rr)
    ts = sorted(x for x in ts if EPS < x * math.sqrt(rr) and (1 - x) * math.sqrt(rr) > EPS)
    return ts


def segments_intersect(a, b, c, d) -> bool:
    """Closed-segment intersection test (touching counts)."""
    a, b, c, d = (np.asarray(x, dtype=float) for x in (a, b, c, d))
    d1 = _cross(c, d, a)
    d2 = _cross(c, d, b)
    d3 = _cross(a, b, c)
    d4 = _cross(a, b, d)
    if ((d1 > 0 and d2 < 0) or (d1 < 0 and d2 > 0)) and ((d3 > 0 and d4 < 0) or (d3 < 0 and d4 > 0)):
        return True
    for p, q, r in ((c, d, a), (c, d, b), (a, b, c), (a, b, d)):
        if point_segment_distance(r, q[None], p[None])[0, 0] <= EPS:
            return True
    return False


def polyline_distance(p: Polyline, q: Polyline) -> np.ndarray:
    """Pairwise closest distances between the segments of ``p`` and ``q``.

    Returns an (m-1, n-1) array; zero where the segments touch or cross.
    """
    a, b = p.vertices[:-1], p.vertices[1:]
    c, d = q.vertices[:-1], q.vertices[1:]
    out = np.minimum(
        np.minimum(point_segment_distance(a, c, d), point_segment_distance(b, c, d)),
        np.minimum(point_segment_distance(c, a, b), point_segment_distance(d, a, b)).T,
    )
    # proper crossings have positive endpoint distances; detect them by orientation
    o1 = _orient(c[None], d[None], a[:, None])
    o2 = _orient(c[None], d[None], b[:, None])
    o3 = _orient(a[:, None], b[:, None], c[None])
    o4 = _orient(a[:, None], b[:, None], d[None])
    crossing = (o1 * o2 < 0) & (o3 * o4 < 0)
    out[crossing] = 0.0
    return out


def _orient(o, a, b):
    return np.sign((a[..., 0] - o[..., 0]) * (b[..., 1] - o[..., 1]) - (a[..., 1] - o[..., 1]) * (b[..., 0] - o[..., 0]))


def points_in_ring(pts, ring: np.ndarray) -> np.ndarray:
    """Even-odd containment of points in the closed ring ``ring`` (k, 2)."""
    p = np.asarray(pts, dtype=float).reshape(-1, 2)
    a = ring
    b = np.roll(ring, -1, axis=0)
    px, py = p[:, None, 0], p[:, None, 1]
    straddle = (a[:, 1] > py) != (b[:, 1] > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = a[:, 0] + (py - a[:, 1]) * (b[:, 0] - a[:, 0]) / (b[:, 1] - a[:, 1])
    hits = straddle & (px < xint)
    return (hits.sum(axis=1) % 2) == 1


def ring_boundary_distance(pts, ring: np.ndarray) -> np.ndarray:
    return point_segment_distance(pts, ring, np.roll(ring, -1, axis=0)).min(axis=1)
