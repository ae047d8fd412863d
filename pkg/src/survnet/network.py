"""Cable network model, validation, inner parts and disaster destruction."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .geometry import (
    EPS,
    ConvexRegion,
    DirectedLine,
    Point2,
    Polyline,
    as_point,
    concat_polylines,
    convex_hull,
    point_segment_distance,
    points_in_ring,
    polyline_distance,
    ring_boundary_distance,
    segment_crossings,
    signed_offset,
)

# tolerance for "geometry lies inside / on" checks on discretized input
CONTAIN_TOL = 1e-7


class NetworkError(ValueError):
    """Raised when an operation needs a valid network and did not get one."""

    def __init__(self, message: str, diagnostics: Sequence[str] = ()):
        super().__init__(message if not diagnostics else f"{message}: " + "; ".join(diagnostics))
        self.diagnostics = list(diagnostics)


@dataclass(frozen=True)
class Link:
    id: str
    endpoints: tuple[str, str]
    geometry: Polyline
    de_level: int = 1
    protected: bool = False


@dataclass(frozen=True, eq=False)
class NetworkModel:
    nodes: Mapping[str, Point2]
    links: tuple[Link, ...]
    s: str
    t: str
    routes: tuple[tuple[str, ...], ...]
    omega: ConvexRegion
    outer: tuple[int, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "nodes", {str(k): as_point(v) for k, v in dict(self.nodes).items()})
        object.__setattr__(self, "links", tuple(self.links))
        object.__setattr__(self, "routes", tuple(tuple(r) for r in self.routes))
        if self.outer is not None:
            object.__setattr__(self, "outer", tuple(int(i) for i in self.outer))

    def link(self, link_id: str) -> Link:
        for lk in self.links:
            if lk.id == link_id:
                return lk
        raise KeyError(link_id)

    @property
    def link_ids(self) -> tuple[str, ...]:
        return tuple(lk.id for lk in self.links)

    @property
    def st_segment(self) -> Polyline:
        return Polyline([self.nodes[self.s], self.nodes[self.t]])

    def route_polyline(self, k: int) -> Polyline:
        """Geometry of route ``k`` oriented from s to t."""
        return concat_polylines([g for _, g in _walk_route(self, self.routes[k])])

    def outer_polyline(self, i: int) -> Polyline:
        if self.outer is None:
            raise NetworkError("network has no outer routes")
        return self.route_polyline(self.outer[i - 1])

    def translated(self, dx: float, dy: float) -> "NetworkModel":
        return replace(
            self,
            nodes={k: Point2(p.x + dx, p.y + dy) for k, p in self.nodes.items()},
            links=tuple(replace(lk, geometry=lk.geometry.translated(dx, dy)) for lk in self.links),
            omega=self.omega.translated(dx, dy),
        )

    def all_vertices(self) -> np.ndarray:
        return np.vstack([lk.geometry.vertices for lk in self.links] + [np.array(list(self.nodes.values()))])


@dataclass(frozen=True)
class Arrangement:
    """Which links a disaster can destroy.

    ``weakest``: every link touching the disaster half-plane is cut.
    ``partial_protect``: links in ``gamma`` are immune, all others weakest.
    ``leveled``: a link is cut iff it touches the half-plane and its DE level
    does not exceed the disaster level.
    """

    kind: str = "weakest"
    gamma: frozenset = frozenset()

    def __post_init__(self):
        if self.kind not in ("weakest", "partial_protect", "leveled"):
            raise ValueError(f"unknown arrangement kind {self.kind!r}")
        object.__setattr__(self, "gamma", frozenset(self.gamma))
        if self.kind != "partial_protect" and self.gamma:
            raise ValueError("gamma only applies to partial_protect")

    @classmethod
    def weakest(cls):
        return cls("weakest")

    @classmethod
    def partial_protect(cls, gamma: Iterable[str]):
        return cls("partial_protect", frozenset(gamma))

    @classmethod
    def leveled(cls):
        return cls("leveled")

    def vulnerable(self, link: Link, disaster_level: int) -> bool:
        if self.kind == "weakest":
            return True
        if self.kind == "partial_protect":
            return link.id not in self.gamma
        return link.de_level <= disaster_level


@dataclass(frozen=True)
class Scenario:
    network: NetworkModel
    arrangement: Arrangement = field(default_factory=Arrangement)
    disaster_level: int = 1
    id: str = "scenario"

    def __post_init__(self):
        if not (isinstance(self.disaster_level, int) and self.disaster_level >= 1):
            raise ValueError("disaster_level must be a positive integer")


@dataclass(frozen=True)
class InnerPart:
    route_index: int
    piece: Polyline


# ---------------------------------------------------------------- routes


class _RouteBroken(Exception):
    pass


def _walk_route(net: NetworkModel, route: Sequence[str]):
    """Yield (link, geometry oriented along travel) from s; raise _RouteBroken."""
    by_id = {lk.id: lk for lk in net.links}
    at = net.s
    seen = {at}
    out = []
    if not route:
        raise _RouteBroken("is empty")
    for lid in route:
        lk = by_id.get(lid)
        if lk is None:
            raise _RouteBroken(f"uses unknown link {lid}")
        u, v = lk.endpoints
        if u == at:
            nxt, geom = v, lk.geometry
        elif v == at:
            nxt, geom = u, lk.geometry.reversed()
        else:
            if at == net.s and not out:
                raise _RouteBroken("does not start at s")
            raise _RouteBroken(f"is not a connected path at link {lid}")
        if nxt in seen:
            raise _RouteBroken(f"revisits node {nxt}")
        seen.add(nxt)
        out.append((lk, geom))
        at = nxt
        if at == net.t and lid != route[-1]:
            raise _RouteBroken("passes through t before its last link")
    if at != net.t:
        raise _RouteBroken("does not terminate at t")
    return out


def validate(network: NetworkModel) -> list[str]:
    """Check every model invariant; returns human-readable diagnostics."""
    net = network
    diags: list[str] = []
    for name, node in (("s", net.s), ("t", net.t)):
        if node not in net.nodes:
            diags.append(f"node {node} ({name}) is not defined")
    if net.s == net.t:
        diags.append("s and t must differ")

    seen_ids = set()
    for lk in net.links:
        if lk.id in seen_ids:
            diags.append(f"link {lk.id}: duplicate id")
        seen_ids.add(lk.id)
        if not (isinstance(lk.de_level, (int, np.integer)) and lk.de_level >= 1):
            diags.append(f"link {lk.id}: de_level must be a positive integer")
        for end, vert in zip(lk.endpoints, (lk.geometry.vertices[0], lk.geometry.vertices[-1])):
            if end not in net.nodes:
                diags.append(f"link {lk.id}: unknown node {end}")
            elif math.dist(net.nodes[end], vert) > 1e-7:
                diags.append(f"link {lk.id}: geometry does not meet node {end}")
        if not np.all(net.omega.contains(lk.geometry.vertices, CONTAIN_TOL)):
            diags.append(f"link {lk.id}: geometry leaves omega")
    for node_id, p in net.nodes.items():
        if not net.omega.contains([p], CONTAIN_TOL)[0]:
            diags.append(f"node {node_id}: outside omega")
    if diags:
        return diags

    route_ok = []
    for k, route in enumerate(net.routes):
        try:
            _walk_route(net, route)
            route_ok.append(True)
        except _RouteBroken as exc:
            diags.append(f"route {k} {exc}")
            route_ok.append(False)
    if not net.routes:
        diags.append("network has no routes")

    if len(net.routes) >= 2 and net.outer is None:
        diags.append("outer routes must be declared when there are several routes")
    if net.outer is not None:
        i, j = net.outer
        if not all(0 <= x < len(net.routes) for x in (i, j)) or i == j:
            diags.append(f"outer routes {net.outer} are not two distinct route indices")
        elif route_ok[i] and route_ok[j]:
            diags.extend(_check_outer(net, i, j, route_ok))
    return diags


def _check_outer(net: NetworkModel, i: int, j: int, route_ok) -> list[str]:
    diags = []
    shared = set(net.routes[i]) & set(net.routes[j])
    if shared:
        diags.append(f"outer routes {i} and {j} share links {sorted(shared)}")
        return diags
    o1, o2 = net.route_polyline(i), net.route_polyline(j)
    dist = polyline_distance(o1, o2)
    last1, last2 = dist.shape[0] - 1, dist.shape[1] - 1
    for a, b in zip(*np.nonzero(dist <= EPS)):
        # the first (last) segments meet at s (t); anything else is a crossing
        if (a, b) == (0, 0) and _touch_only_at(o1.vertices[:2], o2.vertices[:2]):
            continue
        if (a, b) == (last1, last2) and _touch_only_at(o1.vertices[-2:][::-1], o2.vertices[-2:][::-1]):
            continue
        diags.append(f"outer routes {i} and {j} intersect away from s and t")
        break

    ring = _outer_ring(o1, o2)
    for k, route in enumerate(net.routes):
        if k in (i, j) or not route_ok[k]:
            continue
        v = net.route_polyline(k).vertices
        probe = np.vstack([v, 0.5 * (v[1:] + v[:-1])])
        inside = points_in_ring(probe, ring) | (ring_boundary_distance(probe, ring) <= CONTAIN_TOL)
        if not inside.all():
            diags.append(f"route {k} leaves the region enclosed by the outer routes")
    return diags


def _touch_only_at(seg_a: np.ndarray, seg_b: np.ndarray) -> bool:
    # both segments start at the shared point; their far ends must stay clear
    return (
        point_segment_distance(seg_a[1], seg_b[:1], seg_b[1:])[0, 0] > EPS
        and point_segment_distance(seg_b[1], seg_a[:1], seg_a[1:])[0, 0] > EPS
    )


def _outer_ring(o1: Polyline, o2: Polyline) -> np.ndarray:
    return np.vstack([o1.vertices, o2.vertices[::-1][1:-1]])


def require_valid(network: NetworkModel):
    diags = validate(network)
    if diags:
        raise NetworkError("invalid network", diags)


# ---------------------------------------------------------------- inner parts


def _split_by_region(route: Polyline, ring: np.ndarray):
    """Cut ``route`` at the ring boundary; return [(strictly_inside, vertices)]."""
    ra, rb = ring, np.roll(ring, -1, axis=0)
    pieces: list[tuple[bool, list]] = []
    v = route.vertices
    for p, q in zip(v[:-1], v[1:]):
        ts = [0.0] + segment_crossings(p, q, ra, rb) + [1.0]
        for t0, t1 in zip(ts, ts[1:]):
            if (t1 - t0) * math.dist(p, q) <= EPS:
                continue
            a, b = p + t0 * (q - p), p + t1 * (q - p)
            mid = 0.5 * (a + b)
            inside = bool(points_in_ring(mid, ring)[0]) and ring_boundary_distance(mid, ring)[0] > EPS
            if pieces and pieces[-1][0] == inside:
                pieces[-1][1].append(b)
            else:
                pieces.append((inside, [a, b]))
    return pieces


def _region_ring(net: NetworkModel, j: int) -> np.ndarray:
    # closed curve: outer route j from s to t, closed by the chord t -> s
    return net.outer_polyline(j).vertices


def inner_parts(network: NetworkModel, i: int) -> list[InnerPart]:
    """Maximal pieces of outer route ``i`` (1 or 2) strictly inside the region
    bounded by the other outer route and the chord between t and s."""
    require_valid(network)
    if i not in (1, 2):
        raise ValueError("outer route index must be 1 or 2")
    return _inner_parts(network, i)


def _inner_parts(net: NetworkModel, i: int) -> list[InnerPart]:
    ring = _region_ring(net, 3 - i)
    return [
        InnerPart(i, Polyline(np.array(verts)))
        for inside, verts in _split_by_region(net.outer_polyline(i), ring)
        if inside
    ]


def outer_is_inner_plus_chord(network: NetworkModel, i: int, tol: float = CONTAIN_TOL) -> bool:
    """True when outer route ``i`` is its inner parts joined by pieces of the chord s-t."""
    ring = _region_ring(network, 3 - i)
    st = network.st_segment.vertices
    for inside, verts in _split_by_region(network.outer_polyline(i), ring):
        if inside:
            continue
        d = point_segment_distance(np.array(verts), st[:1], st[1:])
        if d.max() > tol:
            return False
    return True


def default_almost_convex_eps(network: NetworkModel) -> float:
    return 1e-6 * network.omega.perimeter


def is_almost_convex(network: NetworkModel, eps: float | None = None) -> bool:
    """s and t both on the boundary of the hull of the two outer routes."""
    require_valid(network)
    if eps is None:
        eps = default_almost_convex_eps(network)
    hull = convex_hull(np.vstack([network.outer_polyline(1).vertices, network.outer_polyline(2).vertices]))
    ring = hull.vertices
    if len(ring) < 3:
        return True
    pts = np.array([network.nodes[network.s], network.nodes[network.t]])
    return bool(np.all(ring_boundary_distance(pts, ring) <= eps))


def equivalent_single_route(network: NetworkModel) -> NetworkModel:
    """Single route made of the inner parts joined along the chord s-t."""
    require_valid(network)
    if len(network.routes) < 2:
        raise NetworkError("equivalent single route needs a multi-route network")
    if not is_almost_convex(network):
        raise NetworkError("network is not almost convex")
    s, t = np.array(network.nodes[network.s]), np.array(network.nodes[network.t])
    axis = (t - s) / np.linalg.norm(t - s)

    pieces = []
    for i in (1, 2):
        for part in _inner_parts(network, i):
            g = part.piece
            if (g.vertices[-1] - s) @ axis < (g.vertices[0] - s) @ axis:
                g = g.reversed()
            pieces.append((float((g.vertices[0] - s) @ axis), i, g))
    pieces.sort(key=lambda x: x[0])

    nodes = {network.s: network.nodes[network.s], network.t: network.nodes[network.t]}
    links = []
    at_id, at = network.s, s
    count = 0

    def join(to_id, to_pt):
        nonlocal at_id, at, count
        if math.dist(at, to_pt) > EPS:
            count += 1
            links.append(Link(f"chord{count}", (at_id, to_id), Polyline([at, to_pt])))
            at_id, at = to_id, to_pt

    for k, (_, i, g) in enumerate(pieces, 1):
        start, end = g.vertices[0], g.vertices[-1]
        start_id = _node_at(nodes, start) or f"j{k}a"
        nodes.setdefault(start_id, Point2(*start))
        join(start_id, start)
        end_id = _node_at(nodes, end) or f"j{k}b"
        nodes.setdefault(end_id, Point2(*end))
        links.append(Link(f"I{i}_{k}", (at_id, end_id), g))
        at_id, at = end_id, end
    join(network.t, t)
    return NetworkModel(
        nodes=nodes,
        links=tuple(links),
        s=network.s,
        t=network.t,
        routes=(tuple(lk.id for lk in links),),
        omega=network.omega,
    )


def _node_at(nodes: Mapping[str, Point2], p) -> str | None:
    for k, q in nodes.items():
        if math.dist(q, p) <= EPS:
            return k
    return None


# ---------------------------------------------------------------- destruction


def link_meets(link: Link, line: DirectedLine) -> bool:
    # a closed half-plane meets a polyline iff it contains one of its vertices
    return any(signed_offset(line, p) >= 0 for p in link.geometry.vertices)


def destroyed_links(scenario: Scenario, line: DirectedLine) -> frozenset:
    arr, level = scenario.arrangement, scenario.disaster_level
    return frozenset(
        lk.id for lk in scenario.network.links if arr.vulnerable(lk, level) and link_meets(lk, line)
    )


def is_connected_after(network: NetworkModel, destroyed: Iterable[str]) -> bool:
    destroyed = set(destroyed)
    unknown = destroyed - set(network.link_ids)
    if unknown:
        raise ValueError(f"unknown link ids {sorted(unknown)}")
    adj: dict[str, list[str]] = {}
    for lk in network.links:
        if lk.id in destroyed:
            continue
        u, v = lk.endpoints
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    seen = {network.s}
    queue = deque([network.s])
    while queue:
        u = queue.popleft()
        if u == network.t:
            return True
        for v in adj.get(u, ()):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return False


def validate_scenario(scenario: Scenario) -> list[str]:
    diags = validate(scenario.network)
    arr = scenario.arrangement
    if arr.kind == "partial_protect" and not diags:
        net = scenario.network
        unknown = arr.gamma - set(net.link_ids)
        if unknown:
            diags.append(f"gamma references unknown links {sorted(unknown)}")
        elif arr.gamma:
            if net.outer is not None:
                outer_links = set(net.routes[net.outer[0]]) | set(net.routes[net.outer[1]])
            else:
                outer_links = set(net.routes[0])
            if not arr.gamma <= outer_links:
                diags.append(f"gamma links {sorted(arr.gamma - outer_links)} are not on the outer routes")
            if not _links_connected(net, arr.gamma):
                diags.append("gamma is not a continuous part")
    return diags


def _links_connected(net: NetworkModel, ids: frozenset) -> bool:
    links = [net.link(i) for i in sorted(ids)]
    reached = {links[0].id}
    nodes = set(links[0].endpoints)
    grew = True
    while grew:
        grew = False
        for lk in links:
            if lk.id not in reached and nodes & set(lk.endpoints):
                reached.add(lk.id)
                nodes |= set(lk.endpoints)
                grew = True
    return len(reached) == len(links)
