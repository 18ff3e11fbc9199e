"""JSON formats: scenario documents, placement tables and solve reports."""
from __future__ import annotations

import json
from pathlib import Path

from .catalog import PROCEDURES
from .model import (
    PhysicalLink,
    PhysicalNode,
    Placement,
    ProcedureSpec,
    Scenario,
    SecurityToggles,
    SliceGuardError,
    SliceRequest,
    Topology,
    VnfTypeSpec,
    Weights,
    canonical_sort,
)


class ScenarioFormatError(SliceGuardError):
    """The document is not valid JSON or does not have the expected shape."""


def _req(d, key, kind, where):
    if not isinstance(d, dict) or key not in d:
        raise ScenarioFormatError(f"{where}: missing field {key!r}")
    v = d[key]
    if kind is float:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ScenarioFormatError(f"{where}.{key}: expected a number, got {v!r}")
        return float(v)
    if kind is int:
        if isinstance(v, bool) or not isinstance(v, int):
            raise ScenarioFormatError(f"{where}.{key}: expected an integer, got {v!r}")
        return v
    if not isinstance(v, kind):
        raise ScenarioFormatError(f"{where}.{key}: expected {kind.__name__}, got {v!r}")
    return v


def scenario_from_dict(doc: dict) -> Scenario:
    if not isinstance(doc, dict):
        raise ScenarioFormatError("scenario document must be a JSON object")
    topo = _req(doc, "topology", dict, "scenario")
    nodes = tuple(
        PhysicalNode(_req(n, "id", (str, int), "node"), _req(n, "max_capacity", float, "node"))
        for n in _req(topo, "nodes", list, "topology")
    )
    links = tuple(
        PhysicalLink(
            _req(l, "from", (str, int), "link"), _req(l, "to", (str, int), "link"),
            _req(l, "delay", float, "link"), _req(l, "bandwidth", float, "link"),
        )
        for l in topo.get("links", [])
    )
    catalog = []
    for v in _req(doc, "catalog", list, "scenario"):
        pseudo = bool(v.get("pseudo", False)) if isinstance(v, dict) else False
        catalog.append(VnfTypeSpec(
            id=_req(v, "id", str, "catalog"),
            base_capacity=float(v.get("base_capacity", 0.0)) if pseudo else _req(v, "base_capacity", float, "catalog"),
            per_unit_capacity=float(v.get("per_unit_capacity", 0.0)) if pseudo else _req(v, "per_unit_capacity", float, "catalog"),
            service_rate=float(v.get("service_rate", 0.0)) if pseudo else _req(v, "service_rate", float, "catalog"),
            max_capacity=float(v.get("max_capacity", 0.0)) if pseudo else _req(v, "max_capacity", float, "catalog"),
            max_traffic_capacity=float(v.get("max_traffic_capacity", 0.0)) if pseudo else _req(v, "max_traffic_capacity", float, "catalog"),
            instance_budget=_req(v, "instance_budget", int, "catalog"),
            is_pseudo=pseudo,
            name=str(v.get("name", v["id"])),
        ))
    slices = []
    for s in _req(doc, "slices", list, "scenario"):
        sid = _req(s, "id", (str, int), "slice")
        procs = []
        for p in _req(s, "procedures", list, f"slice {sid}"):
            where = f"slice {sid} procedure"
            pid = _req(p, "id", (str, int), where)
            kind = p.get("kind", "")
            if "sequence" in p:
                seq = tuple(_req(p, "sequence", list, where))
            elif kind in PROCEDURES:
                seq = PROCEDURES[kind]
            else:
                raise ScenarioFormatError(f"{where} {pid}: needs a sequence or a built-in kind")
            procs.append(ProcedureSpec(
                id=pid, slice=sid, sequence=seq,
                packet_rate=_req(p, "packet_rate", float, where),
                max_delay=_req(p, "max_delay", float, where),
                external=bool(p.get("external", False)), kind=str(kind),
            ))
        slices.append(SliceRequest(sid, tuple(procs)))
    tg = doc.get("toggles", {})
    wt = doc.get("weights", {})
    if not isinstance(tg, dict) or not isinstance(wt, dict):
        raise ScenarioFormatError("toggles and weights must be objects")
    seed = doc.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int)):
        raise ScenarioFormatError(f"seed must be an integer, got {seed!r}")
    return Scenario(
        topology=Topology(nodes, links),
        catalog=tuple(catalog),
        slices=tuple(slices),
        toggles=SecurityToggles(bool(tg.get("exposure", True)), bool(tg.get("max_traffic", True))),
        weights=Weights(float(wt.get("capacity", 1.0)), float(wt.get("delay", 1.0))),
        seed=seed,
    )


def scenario_to_dict(sc: Scenario) -> dict:
    return {
        "topology": {
            "nodes": [{"id": n.id, "max_capacity": n.max_capacity} for n in sc.topology.nodes],
            "links": [
                {"from": l.source, "to": l.target, "delay": l.delay, "bandwidth": l.bandwidth}
                for l in sc.topology.links
            ],
        },
        "catalog": [
            {
                "id": v.id, "name": v.name, "base_capacity": v.base_capacity,
                "per_unit_capacity": v.per_unit_capacity, "service_rate": v.service_rate,
                "max_capacity": v.max_capacity, "max_traffic_capacity": v.max_traffic_capacity,
                "instance_budget": v.instance_budget, "pseudo": v.is_pseudo,
            }
            for v in sc.catalog
        ],
        "slices": [
            {
                "id": s.id,
                "procedures": [
                    {
                        "id": p.id, "kind": p.kind, "sequence": list(p.sequence),
                        "packet_rate": p.packet_rate, "max_delay": p.max_delay, "external": p.external,
                    }
                    for p in s.procedures
                ],
            }
            for s in sc.slices
        ],
        "toggles": {"exposure": sc.toggles.exposure, "max_traffic": sc.toggles.max_traffic},
        "weights": {"capacity": sc.weights.capacity, "delay": sc.weights.delay},
        "seed": sc.seed,
    }


def load_scenario(path) -> Scenario:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as e:
        raise ScenarioFormatError(f"{path}: {e}") from None
    except OSError as e:
        raise ScenarioFormatError(f"{path}: {e.strerror}") from None
    return scenario_from_dict(doc)


def dump_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def save_scenario(sc: Scenario, path) -> None:
    dump_json(scenario_to_dict(sc), path)


def placement_to_dict(pl: Placement) -> dict:
    return {
        "gamma": [
            {"node": n, "vnf_type": t, "index": i, "slice": s, "procedure": p}
            for n, t, i, s, p in canonical_sort(pl.gamma)
        ],
        "chi": [
            {"from": n, "to": m, "slice": s, "procedure": p,
             "src_type": a, "src_index": ia, "dst_type": b, "dst_index": ib}
            for (n, m), s, p, ((a, ia), (b, ib)) in canonical_sort(pl.chi)
        ],
        "beta": [{"node": n, "vnf_type": t, "index": i} for n, t, i in canonical_sort(pl.beta)],
        "omega": [
            {"node": n, "vnf_type": t, "index": i, "slice": s} for n, t, i, s in canonical_sort(pl.omega)
        ],
    }


def placement_from_dict(doc: dict, scenario: Scenario) -> Placement:
    try:
        return Placement(
            scenario,
            gamma=frozenset((g["node"], g["vnf_type"], g["index"], g["slice"], g["procedure"]) for g in doc["gamma"]),
            chi=frozenset(
                ((c["from"], c["to"]), c["slice"], c["procedure"],
                 ((c["src_type"], c["src_index"]), (c["dst_type"], c["dst_index"])))
                for c in doc["chi"]
            ),
            beta=frozenset((b["node"], b["vnf_type"], b["index"]) for b in doc["beta"]),
            omega=frozenset((o["node"], o["vnf_type"], o["index"], o["slice"]) for o in doc["omega"]),
        )
    except (KeyError, TypeError) as e:
        raise ScenarioFormatError(f"malformed placement document: {e}") from None


def load_placement(path, scenario: Scenario) -> Placement:
    with open(path) as fh:
        return placement_from_dict(json.load(fh), scenario)


def report_to_dict(report, extra: dict | None = None) -> dict:
    out = {
        "solver": report.solver,
        "status": report.status,
        "objective": report.objective,
        "proven_optimal": report.proven_optimal,
        "nodes_explored": report.nodes_explored,
        "wall_time": report.wall_time,
        "incumbent_history": [{"time": t, "objective": o} for t, o in report.incumbent_history],
        "encoding": [list(e) for e in report.encoding],
    }
    if extra:
        out.update(extra)
    return out


def write_placement(pl: Placement, path, feasible: bool, violations=()) -> None:
    doc = placement_to_dict(pl)
    doc["feasible"] = feasible
    doc["violations"] = [
        {"family": v.family, "indices": [str(x) for x in v.indices], "slack": v.slack} for v in violations
    ]
    dump_json(doc, Path(path))
