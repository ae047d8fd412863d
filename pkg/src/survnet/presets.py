"""Network builders for the shipped experiments.

``example1`` follows the two-route half-circle network: s=(-1,0), t=(1,0),
route 1 = half circles I1 (radius a, below the chord) and A (radius 1-a,
above), route 2 = half circles B, C, D (radii b, c, 1-b-c). Route 2 hangs on a
baseline ``depth`` below the chord, reached by vertical drops at s and t, so it
encloses I1 for every a < depth without touching it.

``nonconvex`` and ``realistic`` are stand-ins: the original figures give no
coordinates, so these geometries only reproduce the qualitative setting.
"""

from __future__ import annotations

import itertools
import math


from .geometry import Disk, Polyline, concat_polylines, discretize_arc
from .network import Link, NetworkModel

PI = math.pi


def _arc(center, r, a0, a1, sagitta=None):
    return discretize_arc(center, r, a0, a1, None if sagitta is None else sagitta * r)


def example1(a: float = 0.5, b: float = 0.3, c: float = 0.3, depth: float = 1.0, r_omega: float = 2.0, sagitta: float | None = None) -> NetworkModel:
    if not 0.0 <= a < min(1.0, depth):
        raise ValueError("example1 needs 0 <= a < min(1, depth)")
    if not (b > 0 and c > 0 and b + c < 1):
        raise ValueError("example1 needs b, c > 0 and b + c < 1")
    s, t = (-1.0, 0.0), (1.0, 0.0)
    nodes = {"s": s, "t": t}
    links = []
    if a > 0:
        m = (-1.0 + 2 * a, 0.0)
        nodes["m"] = m
        links.append(Link("I1", ("s", "m"), _arc((-1.0 + a, 0.0), a, PI, 2 * PI, sagitta)))
        links.append(Link("A", ("m", "t"), _arc((a, 0.0), 1.0 - a, PI, 0.0, sagitta)))
        route1 = ("I1", "A")
    else:
        links.append(Link("A", ("s", "t"), _arc((0.0, 0.0), 1.0, PI, 0.0, sagitta)))
        route1 = ("A",)

    y = -depth
    q1, q2 = (-1.0 + 2 * b, y), (-1.0 + 2 * b + 2 * c, y)
    nodes.update(q1=q1, q2=q2)
    d = 1.0 - b - c
    links.append(
        Link("B", ("s", "q1"), concat_polylines([Polyline([s, (-1.0, y)]), _arc((-1.0 + b, y), b, PI, 2 * PI, sagitta)]))
    )
    links.append(Link("C", ("q1", "q2"), _arc((-1.0 + 2 * b + c, y), c, PI, 2 * PI, sagitta)))
    links.append(
        Link("D", ("q2", "t"), concat_polylines([_arc((1.0 - d, y), d, PI, 2 * PI, sagitta), Polyline([(1.0, y), t])]))
    )
    return NetworkModel(
        nodes=nodes,
        links=tuple(links),
        s="s",
        t="t",
        routes=(route1, ("B", "C", "D")),
        outer=(0, 1),
        omega=Disk((0.0, 0.0), r_omega),
    )


# the notch pushes route 1 behind s so s leaves the hull boundary
NOTCH = [(-2.3, -0.5), (-3.6, -1.5), (-4.3, 0.8), (-2.6, 2.4)]


def nonconvex() -> NetworkModel:
    s, t = (-2.0, 0.0), (2.0, 0.0)
    nodes = {"s": s, "t": t, "p1": NOTCH[0], "p4": NOTCH[-1], "m": (0.0, -2.2)}
    links = (
        Link("u1", ("s", "p1"), Polyline([s, NOTCH[0]])),
        Link("notch", ("p1", "p4"), Polyline(NOTCH), protected=True),
        Link("u2", ("p4", "t"), Polyline([NOTCH[-1], (0.0, 2.4), (1.6, 1.6), t])),
        Link("l1", ("s", "m"), Polyline([s, (-1.6, -1.6), (0.0, -2.2)])),
        Link("l2", ("m", "t"), Polyline([(0.0, -2.2), (1.6, -1.6), t])),
    )
    return NetworkModel(
        nodes=nodes,
        links=links,
        s="s",
        t="t",
        routes=(("u1", "notch", "u2"), ("l1", "l2")),
        outer=(0, 1),
        omega=Disk((0.0, 0.0), 5.0),
    )


# six-node ring with node 3 pushed inward on the 2-4 side, plus two chords
REALISTIC_NODES = {
    "1": (-1.5, 1.5),
    "2": (-2.5, -1.0),
    "3": (0.2, 0.0),
    "4": (2.5, -1.0),
    "5": (2.0, 1.0),
    "6": (0.5, 2.0),
}
RING = ["1", "2", "3", "4", "5", "6"]
CHORDS = [("2", "6"), ("4", "6")]
REALISTIC_R_OMEGA = 4.0


def _realistic_links():
    pairs = [(RING[k], RING[(k + 1) % len(RING)]) for k in range(len(RING))] + CHORDS
    return tuple(
        Link(f"{u}-{v}", (u, v), Polyline([REALISTIC_NODES[u], REALISTIC_NODES[v]])) for u, v in pairs
    )


def simple_routes(links, s: str, t: str) -> list[tuple[str, ...]]:
    """Every simple s-t path as a tuple of link ids, in a deterministic order."""
    adj: dict[str, list] = {}
    for lk in links:
        u, v = lk.endpoints
        adj.setdefault(u, []).append((v, lk.id))
        adj.setdefault(v, []).append((u, lk.id))
    for k in adj:
        adj[k].sort()
    out = []

    def dfs(node, seen, path):
        if node == t:
            out.append(tuple(path))
            return
        for nxt, lid in adj.get(node, ()):
            if nxt not in seen:
                dfs(nxt, seen | {nxt}, path + [lid])

    dfs(s, {s}, [])
    return out


def _ring_arc(s: str, t: str, step: int) -> tuple[str, ...]:
    n = len(RING)
    k = RING.index(s)
    path = []
    while RING[k] != t:
        nxt = (k + step) % n
        u, v = (RING[k], RING[nxt]) if step == 1 else (RING[nxt], RING[k])
        path.append(f"{u}-{v}")
        k = nxt
    return tuple(path)


def realistic(s: str = "2", t: str = "4") -> NetworkModel:
    s, t = str(s), str(t)
    if s == t or s not in REALISTIC_NODES or t not in REALISTIC_NODES:
        raise ValueError(f"bad node pair ({s}, {t})")
    links = _realistic_links()
    routes = simple_routes(links, s, t)
    o1, o2 = _ring_arc(s, t, 1), _ring_arc(s, t, -1)
    return NetworkModel(
        nodes=REALISTIC_NODES,
        links=links,
        s=s,
        t=t,
        routes=tuple(routes),
        outer=(routes.index(o1), routes.index(o2)),
        omega=Disk((0.0, 0.0), REALISTIC_R_OMEGA),
    )


def realistic_pairs() -> list[tuple[str, str]]:
    return list(itertools.combinations(RING, 2))


TEMPLATES = {"example1": example1, "nonconvex": nonconvex, "realistic": realistic}
