"""Theory-vs-simulation comparisons, sweeps and shipped presets; CSV output."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import presets
from .analytic import prob_connect_single, prob_connect_weakest
from .geometry import Disk, Polyline
from .montecarlo import estimate_disconnect, sampler_self_test
from .network import Scenario
from .scenario import scenario_from_dict, with_param

DEFAULT_SEED = 12345
DEFAULT_SAMPLES = 1_000_000
MIN_GATE = 0.005

HEADER = [
    "scenario_id",
    "param_name",
    "param_value",
    "n",
    "seed",
    "p_theory_disconnect",
    "applicability",
    "p_sim_disconnect",
    "stderr",
    "abs_diff",
    "pass",
]


@dataclass(frozen=True)
class Theory:
    p_disconnect: float
    applicability: str  # exact | approximate | bound


@dataclass(frozen=True)
class ResultRow:
    scenario_id: str
    param_name: str
    param_value: object
    n: int
    seed: int
    p_theory_disconnect: float
    applicability: str
    p_sim_disconnect: float
    stderr: float
    abs_diff: float
    pass_flag: str  # true | false | info

    def cells(self) -> list[str]:
        return [
            self.scenario_id,
            self.param_name,
            _fmt(self.param_value),
            str(self.n),
            str(self.seed),
            _fmt(self.p_theory_disconnect),
            self.applicability,
            _fmt(self.p_sim_disconnect),
            _fmt(self.stderr),
            _fmt(self.abs_diff),
            self.pass_flag,
        ]


def _fmt(v) -> str:
    if v is None or v == "":
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass(frozen=True)
class SweepSpec:
    name: str
    start: float
    stop: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("sweep step must be positive")
        if self.start > self.stop:
            raise ValueError("sweep start must not exceed stop")

    @classmethod
    def parse(cls, text: str) -> "SweepSpec":
        try:
            name, rng = text.split("=", 1)
            start, stop, step = (float(x) for x in rng.split(":"))
        except ValueError:
            raise ValueError(f"bad sweep {text!r}, expected NAME=START:STOP:STEP") from None
        return cls(name.strip(), start, stop, step)

    def values(self) -> list[float]:
        k = int(math.floor((self.stop - self.start) / self.step + 1e-9))
        # round away accumulated float noise so 0.1-steps print as 0.1, 0.2, ...
        return [round(self.start + i * self.step, 12) for i in range(k + 1)]


def theory_for(scenario: Scenario) -> Theory:
    """Closed-form disconnection probability (or weakest-case bound)."""
    net, arr = scenario.network, scenario.arrangement
    if len(net.routes) == 1:
        vuln = [lk.geometry for lk in net.links if lk.id in net.routes[0] and arr.vulnerable(lk, scenario.disaster_level)]
        if not vuln:
            return Theory(0.0, "exact")
        return Theory(prob_connect_single(net.omega, vuln).p_disconnect, "exact")
    report = prob_connect_weakest(net.omega, net)
    if arr.kind == "weakest" or all(arr.vulnerable(lk, scenario.disaster_level) for lk in net.links):
        return Theory(report.p_disconnect, report.applicability)
    # the weakest value bounds other arrangements only when it is itself exact
    return Theory(report.p_disconnect, "bound" if report.applicability == "exact" else "approximate")


def compare_row(scenario: Scenario, n: int, seed: int, param_name: str = "", param_value=None, workers: int = 1) -> ResultRow:
    th = theory_for(scenario)
    est = estimate_disconnect(scenario, n, seed, workers=workers)
    se = est.stderr
    diff = abs(th.p_disconnect - est.p_hat)
    if th.applicability == "exact":
        flag = "true" if diff <= max(MIN_GATE, 4 * se) else "false"
    elif th.applicability == "bound":
        flag = "true" if est.p_hat - th.p_disconnect <= 4 * se else "false"
    else:
        flag = "info"
    return ResultRow(
        scenario.id,
        param_name,
        "" if param_value is None else param_value,
        n,
        seed,
        float(th.p_disconnect),
        th.applicability,
        float(est.p_hat),
        float(se),
        float(diff),
        flag,
    )


def run_compare(doc: dict, sweep: SweepSpec | None, n: int, seed: int, out_path=None, workers: int = 1) -> list[ResultRow]:
    """One row per sweep point (or a single row without a sweep)."""
    if sweep is None:
        rows = [compare_row(scenario_from_dict(doc), n, seed, workers=workers)]
    else:
        rows = []
        for v in sweep.values():
            sc = scenario_from_dict(with_param(doc, sweep.name, v))
            rows.append(compare_row(sc, n, seed, sweep.name, v, workers=workers))
    if out_path is not None:
        write_csv(rows, out_path)
    return rows


def rows_to_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow(r.cells())
    return buf.getvalue()


def write_csv(rows: Sequence[ResultRow], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(rows_to_csv(rows))


# ---------------------------------------------------------------- presets


def _tpl(name: str, sid: str, params=None, arrangement=None) -> dict:
    doc = {"schema_version": 1, "id": sid, "template": {"name": name, "params": dict(params or {})}}
    if arrangement is not None:
        doc["arrangement"] = arrangement
    return doc


def _protect(*ids):
    return {"kind": "partial_protect", "gamma": list(ids)}


def preset_jobs(name: str) -> dict[str, list[tuple[dict, SweepSpec | None, str, object]]]:
    """CSV file name -> list of (document, sweep, label name, label value)."""
    if name == "example1":
        return {
            "example1_a.csv": [(_tpl("example1", "example1", {"b": 0.3, "c": 0.3}), SweepSpec("a", 0.0, 0.9, 0.1), "", None)],
            "example1_b.csv": [(_tpl("example1", "example1", {"a": 0.5, "c": 0.2}), SweepSpec("b", 0.1, 0.7, 0.2), "", None)],
            "example1_c.csv": [(_tpl("example1", "example1", {"a": 0.5, "b": 0.2}), SweepSpec("c", 0.1, 0.7, 0.2), "", None)],
        }
    if name == "example1-protect":
        return {
            "example1_protect.csv": [
                (_tpl("example1", "weakest", {"a": 0.5}), None, "a", 0.5),
                (_tpl("example1", "protect_A_D", {"a": 0.5}, _protect("A", "D")), None, "a", 0.5),
                (_tpl("example1", "protect_I1", {"a": 0.5}, _protect("I1")), None, "a", 0.5),
                (_tpl("example1", "weakest_a0", {"a": 0.0}), None, "a", 0.0),
                (_tpl("example1", "protect_C_a0", {"a": 0.0}, _protect("C")), None, "a", 0.0),
            ]
        }
    if name == "nonconvex":
        return {
            "nonconvex.csv": [
                (_tpl("nonconvex", "unprotected"), None, "", None),
                (_tpl("nonconvex", "protected", arrangement={"kind": "partial_protect"}), None, "", None),
            ]
        }
    if name == "realistic":
        return {
            "realistic.csv": [
                (_tpl("realistic", f"pair_{s}_{t}", {"s": s, "t": t}), None, "pair", f"{s}-{t}")
                for s, t in presets.realistic_pairs()
            ]
        }
    raise KeyError(name)


PRESETS = ("example1", "example1-protect", "nonconvex", "realistic")


def run_preset(name: str, n: int, seed: int, out_dir, workers: int = 1) -> dict[str, list[ResultRow]]:
    out = {}
    for fname, jobs in preset_jobs(name).items():
        rows: list[ResultRow] = []
        for doc, sweep, pname, pval in jobs:
            if sweep is not None:
                rows += run_compare(doc, sweep, n, seed, workers=workers)
            else:
                rows.append(compare_row(scenario_from_dict(doc), n, seed, pname, pval, workers=workers))
        if out_dir is not None:
            write_csv(rows, Path(out_dir) / fname)
        out[fname] = rows
    return out


# ---------------------------------------------------------------- self test


def selftest_battery(omega) -> list[tuple[str, list]]:
    """Point, centred segment, triangle and discretized disc, scaled to omega."""
    c = np.array(omega.centroid)
    th = np.linspace(-np.pi, np.pi, 720, endpoint=False)
    inradius = float(np.min(omega.support(th) - (c[0] * np.cos(th) + c[1] * np.sin(th))))
    k = inradius / 2.0  # unit scale for the disk r=2 battery
    tri = c + k * np.array([[-1.0, -0.5], [1.0, -0.5], [0.0, 1.0]])
    ang = np.linspace(0.0, 2 * np.pi, 257)[:-1]
    disc = c + k * np.column_stack([np.cos(ang), np.sin(ang)])
    return [
        ("point", [c.reshape(1, 2)]),
        ("segment", [Polyline([c - (k, 0.0), c + (k, 0.0)])]),
        ("triangle", [tri]),
        ("disk", [disc]),
    ]


def run_selftest(omega=None, n: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED, rho_power: float = 1.0):
    """Returns (reports, all_passed)."""
    omega = omega if omega is not None else Disk((0.0, 0.0), 2.0)
    reports = [
        sampler_self_test(omega, C, n, seed + k, rho_power, label) for k, (label, C) in enumerate(selftest_battery(omega))
    ]
    return reports, all(r.passed for r in reports)

