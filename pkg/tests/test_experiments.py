import numpy as np
import pytest

from survnet import presets
from survnet.experiments import (
    HEADER,
    SweepSpec,
    compare_row,
    preset_jobs,
    rows_to_csv,
    run_compare,
    run_preset,
    run_selftest,
    theory_for,
)
from survnet.geometry import ConvexPolygon, Disk
from survnet.network import Arrangement, Scenario
from survnet.scenario import scenario_from_dict

EX1 = {"schema_version": 1, "id": "ex1", "template": {"name": "example1", "params": {"b": 0.3, "c": 0.3}}}


def test_sweep_spec_parse_and_values():
    sw = SweepSpec.parse("a=0:0.9:0.1")
    assert sw.values() == [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    assert SweepSpec.parse("b=0.1:0.7:0.2").values() == [0.1, 0.3, 0.5, 0.7]
    for bad in ("a=0:1", "a", "a=0:1:0", "a=1:0:0.1", "a=x:1:0.1"):
        with pytest.raises(ValueError):
            SweepSpec.parse(bad)


def test_theory_applicability_labels():
    net = presets.example1(0.5, 0.3, 0.3)
    assert theory_for(Scenario(net)).applicability == "exact"
    assert theory_for(Scenario(net, Arrangement.partial_protect({"A", "D"}))).applicability == "bound"
    # leveled with every link vulnerable is the weakest case
    assert theory_for(Scenario(net, Arrangement.leveled())).applicability == "exact"
    assert theory_for(Scenario(presets.realistic("3", "5"))).applicability == "approximate"
    # a bound is only claimed when the weakest value is exact
    nc = presets.nonconvex()
    assert theory_for(Scenario(nc, Arrangement.partial_protect({"notch"}))).applicability == "approximate"


def test_theory_single_route_uses_vulnerable_links():
    sc = scenario_from_dict(
        {
            "schema_version": 1,
            "omega": {"disk": {"center": [0, 0], "radius": 2}},
            "nodes": {"s": [-1, 0], "m": [0, 0], "t": [1, 0]},
            "links": [
                {"id": "x", "endpoints": ["s", "m"], "protected": True},
                {"id": "y", "endpoints": ["m", "t"]},
            ],
            "routes": [["x", "y"]],
            "s": "s",
            "t": "t",
            "arrangement": {"kind": "partial_protect"},
        }
    )
    th = theory_for(sc)
    L = 4 * np.pi
    assert th.p_disconnect == pytest.approx(1 - (L - 2.0) / (2 * L))


def test_compare_rows_and_csv():
    rows = run_compare(EX1, SweepSpec.parse("a=0:0.2:0.1"), 20_000, 7)
    assert [r.param_value for r in rows] == [0.0, 0.1, 0.2]
    for r in rows:
        assert r.abs_diff == pytest.approx(abs(r.p_theory_disconnect - r.p_sim_disconnect))
        assert r.pass_flag == "true"
    text = rows_to_csv(rows)
    lines = text.split("\n")
    assert lines[0] == ",".join(HEADER)
    assert len(lines) == 5 and lines[-1] == ""
    # full precision: floats round-trip
    cells = lines[1].split(",")
    assert float(cells[5]) == rows[0].p_theory_disconnect


def test_pass_flags_by_applicability():
    approx = compare_row(Scenario(presets.realistic("3", "5")), 20_000, 1)
    assert approx.pass_flag == "info"
    bound = compare_row(Scenario(presets.example1(0.5, 0.3, 0.3), Arrangement.partial_protect({"A", "D"})), 20_000, 1)
    assert bound.applicability == "bound" and bound.pass_flag == "true"


def test_csv_written_to_disk(tmp_path):
    out = tmp_path / "sub" / "x.csv"
    run_compare(EX1, None, 5_000, 1, out_path=out)
    data = out.read_bytes()
    assert data.startswith(b"scenario_id,") and b"\r\n" not in data


def test_preset_jobs_cover_all_presets():
    assert set(preset_jobs("example1")) == {"example1_a.csv", "example1_b.csv", "example1_c.csv"}
    assert len(preset_jobs("realistic")["realistic.csv"]) == 15
    with pytest.raises(KeyError):
        preset_jobs("nope")


def test_run_preset_small(tmp_path):
    out = run_preset("nonconvex", 20_000, 3, tmp_path)
    rows = out["nonconvex.csv"]
    assert [r.scenario_id for r in rows] == ["unprotected", "protected"]
    assert (tmp_path / "nonconvex.csv").exists()


def test_selftest_battery_passes_and_scales():
    reports, ok = run_selftest(Disk((0.0, 0.0), 2.0), 100_000, 5)
    assert ok and [r.label for r in reports] == ["point", "segment", "triangle", "disk"]
    reports, ok = run_selftest(ConvexPolygon(np.array([[1, 1], [5, 1], [5, 4], [1, 4.0]])), 100_000, 5)
    assert ok
    _, ok = run_selftest(Disk((0.0, 0.0), 2.0), 100_000, 5, rho_power=2.0)
    assert not ok
