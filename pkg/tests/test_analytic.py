import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import exact_disconnect
from survnet import presets
from survnet.analytic import (
    example1_inner_hull_perimeter,
    measure_lines_meeting,
    prob_avoid,
    prob_connect_single,
    prob_connect_weakest,
    weakest_bound,
)
from survnet.geometry import ConvexPolygon, Disk, Polyline
from survnet.network import Link, NetworkError, NetworkModel
from test_network import square_net

OMEGA = Disk((0.0, 0.0), 2.0)


def test_measure_is_hull_perimeter():
    assert measure_lines_meeting([Polyline([(0, 0), (1, 0)])]) == pytest.approx(2.0)
    assert measure_lines_meeting([np.array([[0.0, 0.0]])]) == 0.0


def test_prob_avoid_closed_forms():
    seg = Polyline([(-1.0, 0.0), (1.0, 0.0)])
    assert prob_avoid(OMEGA, [seg]) == pytest.approx((4 * math.pi - 4) / (8 * math.pi), abs=1e-15)
    assert prob_avoid(OMEGA, [np.array([[0.3, 0.1]])]) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        prob_avoid(OMEGA, [Polyline([(0, 0), (3, 0)])])
    with pytest.raises(ValueError):
        prob_avoid(OMEGA, [])


def test_prob_avoid_polygon_region():
    sq = ConvexPolygon(np.array([[-2, -2], [2, -2], [2, 2], [-2, 2.0]]))
    assert prob_avoid(sq, [Polyline([(0, 0), (1, 0)])]) == pytest.approx((16 - 2) / 32)


@settings(max_examples=60, deadline=None)
@given(
    st.floats(-math.pi, math.pi),
    st.floats(-3, 3),
    st.floats(-3, 3),
    st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=8),
)
def test_prob_avoid_motion_invariant(ang, dx, dy, pts):
    c, s = math.cos(ang), math.sin(ang)
    rot = np.array([[c, s], [-s, c]])
    p = np.array(pts)
    moved = p @ rot + (dx, dy)
    omega_moved = Disk((dx, dy), 2.0)
    assert prob_avoid(omega_moved, [moved]) == pytest.approx(prob_avoid(OMEGA, [p]), abs=1e-9)


def test_single_route_half_circle():
    arc = presets.example1(0.0, 0.3, 0.3).link("A").geometry
    r = prob_connect_single(OMEGA, [arc])
    assert r.p_connect == pytest.approx((3 * math.pi - 2) / (8 * math.pi), abs=1e-5)
    assert r.applicability == "exact"


@pytest.mark.parametrize("a", [0.0, 0.1, 0.35, 0.5, 0.8, 0.95])
def test_weakest_matches_inclusion_exclusion_on_example1(a):
    net = presets.example1(a, 0.3, 0.3)
    r = prob_connect_weakest(net.omega, net)
    assert r.applicability == "exact"
    assert r.p_disconnect == pytest.approx(exact_disconnect(net), abs=1e-12)


def test_weakest_example1_closed_form():
    # hull of I1 + chord is the tangent construction; route 2 has no inner part
    a = 0.5
    net = presets.example1(a, 0.3, 0.3)
    L = 4 * math.pi
    closed = (L + 4 - example1_inner_hull_perimeter(a, 2.0) - 4) / (2 * L)
    assert prob_connect_weakest(net.omega, net).p_connect == pytest.approx(closed, abs=1e-5)


def test_no_inner_parts_reduces_to_chord():
    net = square_net()
    r = prob_connect_weakest(net.omega, net)
    L = net.omega.perimeter
    assert r.p_connect == pytest.approx((L - 4.0) / (2 * L), abs=1e-15)
    assert r.p_disconnect == pytest.approx(exact_disconnect(net), abs=1e-12)


@pytest.mark.parametrize("pair", presets.realistic_pairs())
def test_realistic_labels_agree_with_oracle(pair):
    net = presets.realistic(*pair)
    r = prob_connect_weakest(net.omega, net)
    exact = exact_disconnect(net)
    if r.applicability == "exact":
        assert r.p_disconnect == pytest.approx(exact, abs=1e-12)
    else:
        # outside its assumptions the formula under-counts disconnections
        assert r.p_disconnect <= exact + 1e-12


def test_nonconvex_is_approximate_and_undercounts():
    net = presets.nonconvex()
    r = prob_connect_weakest(net.omega, net)
    assert r.applicability == "approximate"
    assert r.p_disconnect < exact_disconnect(net)


def test_weakest_requires_two_routes():
    arc = Polyline([(-1, 0), (1, 0)])
    net = NetworkModel({"s": (-1, 0), "t": (1, 0)}, (Link("A", ("s", "t"), arc),), "s", "t", (("A",),), OMEGA)
    with pytest.raises(NetworkError):
        prob_connect_weakest(OMEGA, net)


def test_weakest_bound_is_disconnect_probability():
    net = presets.example1(0.5, 0.3, 0.3)
    assert weakest_bound(net.omega, net) == pytest.approx(0.6738568, abs=1e-6)


def test_example1_formula_domain():
    with pytest.raises(ValueError):
        example1_inner_hull_perimeter(0.0, 2.0)
    with pytest.raises(ValueError):
        example1_inner_hull_perimeter(1.0, 2.0)


def test_probability_monotone_in_a():
    ps = [prob_connect_weakest(OMEGA, presets.example1(a, 0.3, 0.3)).p_connect for a in np.linspace(0, 0.9, 10)]
    assert all(0 <= p <= 1 for p in ps)
    assert all(x > y for x, y in zip(ps, ps[1:]))
    hs = [example1_inner_hull_perimeter(a, 2.0) for a in np.linspace(0.05, 0.95, 19)]
    assert all(x < y for x, y in zip(hs, hs[1:]))
