"""Survivability of planar networks under a random half-plane disaster."""

from .analytic import (
    ConnectionReport,
    example1_inner_hull_perimeter,
    measure_lines_meeting,
    prob_avoid,
    prob_connect_single,
    prob_connect_weakest,
    weakest_bound,
)
from .geometry import ConvexPolygon, DirectedLine, Disk, Polyline, convex_hull, discretize_arc, hull_perimeter
from .montecarlo import (
    Estimate,
    LineSampler,
    arrangement_dominance_test,
    estimate_disconnect,
    per_sample_equivalence,
    sample_disaster,
    sampler_self_test,
)
from .network import (
    Arrangement,
    Link,
    NetworkError,
    NetworkModel,
    Scenario,
    destroyed_links,
    equivalent_single_route,
    inner_parts,
    is_almost_convex,
    is_connected_after,
    validate,
)
from .scenario import ScenarioError, ScenarioInvalid, parse_scenario

__version__ = "0.1.0"
