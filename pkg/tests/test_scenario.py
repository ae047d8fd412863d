import copy
import json
import math
from pathlib import Path

import pytest

from survnet.analytic import prob_connect_weakest
from survnet.scenario import (
    ScenarioError,
    ScenarioInvalid,
    parse_scenario,
    scenario_from_dict,
    sweep_names,
    with_param,
)

ROOT = Path(__file__).resolve().parents[1]

EXPLICIT = {
    "schema_version": 1,
    "id": "two-routes",
    "omega": {"disk": {"center": [3, 1], "radius": 2}},
    "nodes": {"s": [2, 1], "t": [4, 1], "m": [3, 0]},
    "links": [
        {"id": "up", "endpoints": ["s", "t"], "geometry": [{"arc": {"center": [3, 1], "radius": 1, "start_deg": 180, "end_deg": 0}}]},
        {"id": "d1", "endpoints": ["s", "m"], "geometry": [{"line": [[2, 1], [3, 0]]}], "de_level": 2},
        {"id": "d2", "endpoints": ["m", "t"], "protected": True},
    ],
    "routes": [["up"], ["d1", "d2"]],
    "outer": [0, 1],
    "s": "s",
    "t": "t",
    "arrangement": {"kind": "partial_protect"},
}


def test_shipped_scenarios_parse():
    sc = parse_scenario(ROOT / "scenarios" / "example1.json")
    assert sc.id == "example1"
    p = prob_connect_weakest(sc.network.omega, sc.network).p_disconnect
    assert p == pytest.approx(0.6738568, abs=1e-6)
    for path in (ROOT / "scenarios").glob("*.json"):
        parse_scenario(path)


def test_explicit_form_recenters_and_defaults_gamma():
    sc = scenario_from_dict(EXPLICIT)
    assert sc.network.omega.centroid == pytest.approx((0.0, 0.0))
    assert sc.network.nodes["s"] == pytest.approx((-1.0, 0.0))
    assert sc.arrangement.gamma == {"d2"}
    assert sc.network.link("d1").de_level == 2
    arc = sc.network.link("up").geometry
    assert arc.length == pytest.approx(math.pi, rel=1e-4)


def test_explicit_arc_matches_template():
    doc = {
        "schema_version": 1,
        "omega": {"disk": {"center": [0, 0], "radius": 2}},
        "nodes": {"s": [-1, 0], "t": [1, 0], "m": [0, 0], "q1": [-0.4, -1], "q2": [0.2, -1]},
        "links": [
            {"id": "I1", "endpoints": ["s", "m"], "geometry": [{"arc": {"center": [-0.5, 0], "radius": 0.5, "start_deg": 180, "end_deg": 360}}]},
            {"id": "A", "endpoints": ["m", "t"], "geometry": [{"arc": {"center": [0.5, 0], "radius": 0.5, "start_deg": 180, "end_deg": 0}}]},
            {"id": "B", "endpoints": ["s", "q1"], "geometry": [{"line": [[-1, 0], [-1, -1]]}, {"arc": {"center": [-0.7, -1], "radius": 0.3, "start_deg": 180, "end_deg": 360}}]},
            {"id": "C", "endpoints": ["q1", "q2"], "geometry": [{"arc": {"center": [-0.1, -1], "radius": 0.3, "start_deg": 180, "end_deg": 360}}]},
            {"id": "D", "endpoints": ["q2", "t"], "geometry": [{"arc": {"center": [0.6, -1], "radius": 0.4, "start_deg": 180, "end_deg": 360}}, {"line": [[1, -1], [1, 0]]}]},
        ],
        "routes": [["I1", "A"], ["B", "C", "D"]],
        "outer": [0, 1],
        "s": "s",
        "t": "t",
    }
    explicit = scenario_from_dict(doc)
    tpl = parse_scenario(ROOT / "scenarios" / "example1.json")
    pe = prob_connect_weakest(explicit.network.omega, explicit.network).p_disconnect
    pt = prob_connect_weakest(tpl.network.omega, tpl.network).p_disconnect
    assert pe == pytest.approx(pt, abs=1e-12)


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda d: d.pop("t"), "t"),
        (lambda d: d.__setitem__("t", "zz"), "t"),
        (lambda d: d["links"][1].__setitem__("de_level", 0), "links[1].de_level"),
        (lambda d: d.__setitem__("colour", "red"), "colour"),
        (lambda d: d["links"][0].__setitem__("weight", 3), "links[0].weight"),
        (lambda d: d["omega"].__setitem__("disk", {"center": [0, 0], "radius": -1}), "omega.disk.radius"),
        (lambda d: d.__setitem__("schema_version", 2), "schema_version"),
        (lambda d: d["links"][0]["geometry"][0].__setitem__("spline", {}), "links[0].geometry[0]"),
        (lambda d: d["arrangement"].__setitem__("kind", "strongest"), "arrangement.kind"),
        (lambda d: d.__setitem__("disaster_level", 0), "disaster_level"),
    ],
)
def test_malformed_documents_name_the_field(mutate, field):
    doc = copy.deepcopy(EXPLICIT)
    mutate(doc)
    with pytest.raises(ScenarioError) as exc:
        scenario_from_dict(doc)
    assert exc.value.field == field


def test_validation_failures_are_structured():
    doc = copy.deepcopy(EXPLICIT)
    doc["routes"] = [["up"], ["d1"]]
    with pytest.raises(ScenarioInvalid) as exc:
        scenario_from_dict(doc)
    assert any("does not terminate at t" in d for d in exc.value.diagnostics)
    doc = copy.deepcopy(EXPLICIT)
    doc["omega"]["disk"]["radius"] = 1.05
    doc["nodes"]["m"] = [3, -0.5]
    doc["links"][1]["geometry"] = [{"line": [[2, 1], [3, -0.5]]}]
    with pytest.raises(ScenarioInvalid):
        scenario_from_dict(doc)


def test_json_errors_report_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "schema_version": 1,\n  oops\n}')
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(p)
    assert "line 3" in str(exc.value)


def test_template_errors():
    base = {"schema_version": 1, "template": {"name": "example1", "params": {"a": 0.5}}}
    with pytest.raises(ScenarioError):
        scenario_from_dict({**base, "template": {"name": "nope"}})
    with pytest.raises(ScenarioError):
        scenario_from_dict({**base, "template": {"name": "example1", "params": {"zzz": 1}}})
    with pytest.raises(ScenarioError):
        scenario_from_dict({**base, "template": {"name": "example1", "params": {"b": 0.6, "c": 0.6}}})


def test_sweep_params():
    base = {"schema_version": 1, "template": {"name": "example1", "params": {"a": 0.5}}}
    assert "a" in sweep_names(base) and "disaster_level" in sweep_names(base)
    assert scenario_from_dict(with_param(base, "a", 0.2)).network.link("I1").geometry.length == pytest.approx(
        0.2 * math.pi, rel=1e-4
    )
    sc = scenario_from_dict(with_param(base, "de_level:C", 3))
    assert sc.network.link("C").de_level == 3
    assert scenario_from_dict(with_param(base, "disaster_level", 2)).disaster_level == 2
    assert base["template"]["params"] == {"a": 0.5}  # original untouched
    with pytest.raises(ScenarioError):
        with_param(EXPLICIT, "a", 0.1)
    assert scenario_from_dict(with_param(EXPLICIT, "de_level:d1", 5)).network.link("d1").de_level == 5
    with pytest.raises(ScenarioError):
        with_param(EXPLICIT, "de_level:zz", 5)


def test_roundtrip_through_file(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(EXPLICIT))
    assert parse_scenario(p).id == "two-routes"
