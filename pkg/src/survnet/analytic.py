"""Closed-form connection probabilities for a random half-plane disaster.

All formulas condition on the disaster boundary meeting the area of interest
and use the line measure ``m(G meets C) = perimeter(cv C)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ConvexRegion, hull_perimeter, vertices_of
from .network import (
    CONTAIN_TOL,
    NetworkError,
    NetworkModel,
    _inner_parts,
    is_almost_convex,
    outer_is_inner_plus_chord,
    require_valid,
)


@dataclass(frozen=True)
class ConnectionReport:
    p_connect: float
    applicability: str  # "exact" | "approximate"
    terms: dict = field(default_factory=dict)

    @property
    def p_disconnect(self) -> float:
        return 1.0 - self.p_connect


def measure_lines_meeting(C) -> float:
    """Measure of the lines meeting ``C``: the perimeter of its convex hull."""
    return hull_perimeter(C)


def _check_inside(omega: ConvexRegion, C):
    v = vertices_of(C)
    if len(v) == 0:
        raise ValueError("empty geometry")
    if not np.all(omega.contains(v, CONTAIN_TOL)):
        raise ValueError("geometry is not contained in omega")


def prob_avoid(omega: ConvexRegion, C) -> float:
    """Probability that the disaster half-plane misses ``C``."""
    _check_inside(omega, C)
    L = omega.perimeter
    return (L - hull_perimeter(C)) / (2.0 * L)


def prob_connect_single(omega: ConvexRegion, n_phi) -> ConnectionReport:
    """Single route: connected iff the destroyable parts ``n_phi`` are all missed."""
    _check_inside(omega, n_phi)
    L = omega.perimeter
    hull = hull_perimeter(n_phi)
    return ConnectionReport((L - hull) / (2.0 * L), "exact", {"omega": L, "cv_n_phi": hull})


def prob_connect_weakest(omega: ConvexRegion, network: NetworkModel) -> ConnectionReport:
    """Two-outer-route network under the weakest arrangement.

    Exact when the network is almost convex, or when one outer route is its
    inner parts joined along the chord s-t; otherwise labelled approximate.
    """
    require_valid(network)
    if len(network.routes) < 2 or network.outer is None:
        raise NetworkError("single-route network: use prob_connect_single")
    _check_inside(omega, [network.all_vertices()])
    st = network.st_segment
    L = omega.perimeter
    st_term = hull_perimeter([st])
    terms = {"omega": L, "st": st_term}
    total = 0.0
    for i in (1, 2):
        parts = [p.piece for p in _inner_parts(network, i)]
        h = hull_perimeter(parts + [st])
        terms[f"inner_hull_{i}"] = h
        total += h
    p = (L + st_term - total) / (2.0 * L)
    exact = is_almost_convex(network) or any(outer_is_inner_plus_chord(network, i) for i in (1, 2))
    return ConnectionReport(p, "exact" if exact else "approximate", terms)


def weakest_bound(omega: ConvexRegion, network: NetworkModel) -> float:
    """Upper bound on the disconnection probability over all arrangements."""
    return prob_connect_weakest(omega, network).p_disconnect


def example1_inner_hull_perimeter(a: float, d: float) -> float:
    """Hull perimeter of a half circle of radius ``a`` hanging from s together
    with the chord s-t of length ``d``: tangent from t, wrapped arc, chord."""
    if not (0.0 < a < d / 2.0):
        raise ValueError(f"need 0 < a < d/2, got a={a}, d={d}")
    return math.sqrt((d - a) ** 2 - a * a) + a * (math.pi - math.acos(a / (d - a))) + d

