"""Scenario files: a versioned JSON document describing one experiment.

Two forms are accepted. The explicit form lists ``omega``, ``nodes``,
``links``, ``routes``, ``outer``, ``s`` and ``t``; link geometry is a list of
``{"line": [[x, y], ...]}`` and ``{"arc": {...}}`` pieces, with arcs given
symbolically and discretized on load. The template form names a built-in
network builder and its parameters instead. See docs/scenario-format.md.
"""

from __future__ import annotations

import copy
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from . import presets
from .geometry import ConvexPolygon, Disk, Polyline, concat_polylines, discretize_arc, recentered
from .network import Arrangement, Link, NetworkModel, Scenario, validate_scenario

SCHEMA_VERSION = 1

_TOP_EXPLICIT = {"schema_version", "id", "omega", "nodes", "links", "routes", "outer", "s", "t", "arrangement", "disaster_level", "max_sagitta"}
_TOP_TEMPLATE = {"schema_version", "id", "template", "arrangement", "disaster_level", "links_override"}
_LINK_KEYS = {"id", "endpoints", "geometry", "de_level", "protected"}
_ARC_KEYS = {"center", "radius", "start_deg", "end_deg"}


class ScenarioError(ValueError):
    """Malformed scenario document; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class ScenarioInvalid(ValueError):
    """Well-formed document whose network fails validation."""

    def __init__(self, diagnostics):
        super().__init__("invalid scenario: " + "; ".join(diagnostics))
        self.diagnostics = list(diagnostics)


def _need(doc: dict, key: str, where: str = ""):
    if key not in doc:
        raise ScenarioError(f"{where}{key}", "missing")
    return doc[key]


def _check_keys(doc: dict, allowed: set, where: str):
    if not isinstance(doc, dict):
        raise ScenarioError(where.rstrip("."), "expected an object")
    extra = sorted(set(doc) - allowed)
    if extra:
        raise ScenarioError(f"{where}{extra[0]}", "unknown field")


def _point(v, where: str):
    if not (isinstance(v, (list, tuple)) and len(v) == 2 and all(isinstance(c, (int, float)) for c in v)):
        raise ScenarioError(where, "expected [x, y]")
    if not all(math.isfinite(c) for c in v):
        raise ScenarioError(where, "non-finite coordinate")
    return (float(v[0]), float(v[1]))


def _number(v, where: str, positive: bool = False) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ScenarioError(where, "expected a finite number")
    if positive and v <= 0:
        raise ScenarioError(where, "must be positive")
    return float(v)


def _positive_int(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 1:
        raise ScenarioError(where, "must be a positive integer")
    return v


def _omega(doc, where="omega"):
    if not isinstance(doc, dict) or len(doc) != 1:
        raise ScenarioError(where, 'expected {"disk": {...}} or {"polygon": [...]}')
    (kind, body), = doc.items()
    if kind == "disk":
        _check_keys(body, {"center", "radius"}, f"{where}.disk.")
        return Disk(_point(_need(body, "center", f"{where}.disk."), f"{where}.disk.center"),
                    _number(_need(body, "radius", f"{where}.disk."), f"{where}.disk.radius", positive=True))
    if kind == "polygon":
        pts = [_point(p, f"{where}.polygon[{k}]") for k, p in enumerate(body)]
        try:
            return ConvexPolygon(np.array(pts))
        except ValueError as exc:
            raise ScenarioError(f"{where}.polygon", str(exc)) from None
    raise ScenarioError(where, f"unknown region kind {kind!r}")


def _geometry(pieces, a, b, sagitta, where):
    if pieces is None:
        return Polyline([a, b])
    if not isinstance(pieces, list) or not pieces:
        raise ScenarioError(where, "expected a non-empty list of pieces")
    parts = []
    for k, piece in enumerate(pieces):
        w = f"{where}[{k}]"
        if not isinstance(piece, dict) or len(piece) != 1:
            raise ScenarioError(w, 'expected {"line": [...]} or {"arc": {...}}')
        (kind, body), = piece.items()
        try:
            if kind == "line":
                parts.append(Polyline([_point(p, f"{w}.line[{j}]") for j, p in enumerate(body)]))
            elif kind == "arc":
                _check_keys(body, _ARC_KEYS, f"{w}.arc.")
                r = _number(_need(body, "radius", f"{w}.arc."), f"{w}.arc.radius", positive=True)
                parts.append(
                    discretize_arc(
                        _point(_need(body, "center", f"{w}.arc."), f"{w}.arc.center"),
                        r,
                        math.radians(_number(_need(body, "start_deg", f"{w}.arc."), f"{w}.arc.start_deg")),
                        math.radians(_number(_need(body, "end_deg", f"{w}.arc."), f"{w}.arc.end_deg")),
                        sagitta * r,
                    )
                )
            else:
                raise ScenarioError(w, f"unknown piece kind {kind!r}")
        except ScenarioError:
            raise
        except ValueError as exc:
            raise ScenarioError(w, str(exc)) from None
    try:
        return concat_polylines(parts)
    except ValueError as exc:
        raise ScenarioError(where, str(exc)) from None


def _arrangement(doc, where="arrangement", protected=()):
    if doc is None:
        return Arrangement.weakest()
    _check_keys(doc, {"kind", "gamma"}, f"{where}.")
    kind = _need(doc, "kind", f"{where}.")
    if kind == "partial_protect":
        gamma = doc.get("gamma")
        if gamma is None:
            gamma = list(protected)
        if not isinstance(gamma, list) or not all(isinstance(g, str) for g in gamma):
            raise ScenarioError(f"{where}.gamma", "expected a list of link ids")
        return Arrangement.partial_protect(gamma)
    if "gamma" in doc:
        raise ScenarioError(f"{where}.gamma", "only allowed for partial_protect")
    try:
        return Arrangement(kind)
    except ValueError as exc:
        raise ScenarioError(f"{where}.kind", str(exc)) from None


def _explicit_network(doc) -> NetworkModel:
    sagitta = _number(doc.get("max_sagitta", 1e-4), "max_sagitta", positive=True)
    omega = _omega(_need(doc, "omega"))
    raw_nodes = _need(doc, "nodes")
    if not isinstance(raw_nodes, dict):
        raise ScenarioError("nodes", "expected an object of id -> [x, y]")
    nodes = {str(k): _point(v, f"nodes.{k}") for k, v in raw_nodes.items()}
    s, t = str(_need(doc, "s")), str(_need(doc, "t"))
    for name, node in (("s", s), ("t", t)):
        if node not in nodes:
            raise ScenarioError(name, f"node {node!r} is not defined in nodes")
    links = []
    raw_links = _need(doc, "links")
    if not isinstance(raw_links, list):
        raise ScenarioError("links", "expected a list")
    for k, lk in enumerate(raw_links):
        w = f"links[{k}]."
        _check_keys(lk, _LINK_KEYS, w)
        lid = str(_need(lk, "id", w))
        ends = _need(lk, "endpoints", w)
        if not (isinstance(ends, list) and len(ends) == 2):
            raise ScenarioError(f"{w}endpoints", "expected [node, node]")
        u, v = str(ends[0]), str(ends[1])
        for e in (u, v):
            if e not in nodes:
                raise ScenarioError(f"{w}endpoints", f"unknown node {e!r}")
        geom = _geometry(lk.get("geometry"), nodes[u], nodes[v], sagitta, f"{w}geometry")
        de = _positive_int(lk.get("de_level", 1), f"{w}de_level")
        prot = lk.get("protected", False)
        if not isinstance(prot, bool):
            raise ScenarioError(f"{w}protected", "expected true or false")
        links.append(Link(lid, (u, v), geom, de, prot))
    routes = _need(doc, "routes")
    if not (isinstance(routes, list) and all(isinstance(r, list) for r in routes)):
        raise ScenarioError("routes", "expected a list of link-id lists")
    outer = doc.get("outer")
    if outer is not None and not (
        isinstance(outer, list) and len(outer) == 2 and all(isinstance(i, int) and not isinstance(i, bool) for i in outer)
    ):
        raise ScenarioError("outer", "expected [route index, route index]")
    return NetworkModel(
        nodes=nodes,
        links=tuple(links),
        s=s,
        t=t,
        routes=tuple(tuple(str(x) for x in r) for r in routes),
        outer=tuple(outer) if outer is not None else None,
        omega=omega,
    )


def _template_network(doc) -> NetworkModel:
    tpl = _need(doc, "template")
    _check_keys(tpl, {"name", "params"}, "template.")
    name = _need(tpl, "name", "template.")
    builder = presets.TEMPLATES.get(name)
    if builder is None:
        raise ScenarioError("template.name", f"unknown template {name!r}")
    params = tpl.get("params", {})
    if not isinstance(params, dict):
        raise ScenarioError("template.params", "expected an object")
    try:
        net = builder(**params)
    except TypeError as exc:
        raise ScenarioError("template.params", str(exc)) from None
    except ValueError as exc:
        raise ScenarioError("template.params", str(exc)) from None
    overrides = doc.get("links_override", {})
    if overrides:
        net = _override_links(net, overrides)
    return net


def _override_links(net: NetworkModel, overrides) -> NetworkModel:
    from dataclasses import replace

    if not isinstance(overrides, dict):
        raise ScenarioError("links_override", "expected an object of link id -> fields")
    ids = set(net.link_ids)
    links = list(net.links)
    for lid, fields in overrides.items():
        w = f"links_override.{lid}"
        if lid not in ids:
            raise ScenarioError(w, "unknown link")
        _check_keys(fields, {"de_level", "protected"}, f"{w}.")
        k = net.link_ids.index(lid)
        if "de_level" in fields:
            links[k] = replace(links[k], de_level=_positive_int(fields["de_level"], f"{w}.de_level"))
        if "protected" in fields:
            if not isinstance(fields["protected"], bool):
                raise ScenarioError(f"{w}.protected", "expected true or false")
            links[k] = replace(links[k], protected=fields["protected"])
    return replace(net, links=tuple(links))


def scenario_from_dict(doc: dict[str, Any], recenter: bool = True) -> Scenario:
    """Build and validate a scenario; geometry is moved to omega's centroid frame."""
    if not isinstance(doc, dict):
        raise ScenarioError("", "scenario must be a JSON object")
    version = _need(doc, "schema_version")
    if version != SCHEMA_VERSION:
        raise ScenarioError("schema_version", f"unsupported version {version!r} (expected {SCHEMA_VERSION})")
    if "template" in doc:
        _check_keys(doc, _TOP_TEMPLATE, "")
        net = _template_network(doc)
    else:
        _check_keys(doc, _TOP_EXPLICIT, "")
        net = _explicit_network(doc)
    if recenter:
        _, (dx, dy) = recentered(net.omega)
        if dx or dy:
            net = net.translated(dx, dy)
    protected = [lk.id for lk in net.links if lk.protected]
    arrangement = _arrangement(doc.get("arrangement"), protected=protected)
    level = _positive_int(doc.get("disaster_level", 1), "disaster_level")
    scenario = Scenario(net, arrangement, level, str(doc.get("id", "scenario")))
    diags = validate_scenario(scenario)
    if diags:
        raise ScenarioInvalid(diags)
    return scenario


def load_document(path) -> dict:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None


def parse_scenario(path) -> Scenario:
    return scenario_from_dict(load_document(path))


# ---------------------------------------------------------------- sweeps


def sweep_names(doc: dict) -> list[str]:
    names = ["disaster_level"]
    if "template" in doc:
        names += list(doc["template"].get("params", {}))
    return names


def with_param(doc: dict, name: str, value) -> dict:
    """Copy of ``doc`` with one sweep parameter set.

    ``name`` is a template parameter, ``disaster_level``, or
    ``de_level:<link id>`` for a link's DE level.
    """
    out = copy.deepcopy(doc)
    if name == "disaster_level":
        out["disaster_level"] = int(round(value))
    elif name.startswith("de_level:"):
        lid = name.split(":", 1)[1]
        if "template" in out:
            out.setdefault("links_override", {}).setdefault(lid, {})["de_level"] = int(round(value))
        else:
            for lk in out.get("links", []):
                if lk.get("id") == lid:
                    lk["de_level"] = int(round(value))
                    break
            else:
                raise ScenarioError(name, "unknown link")
    elif "template" in out:
        out["template"].setdefault("params", {})[name] = value
    else:
        raise ScenarioError(name, "geometry parameters can only be swept on template scenarios")
    return out
