"""Reported metrics of a solved placement and their CSV/JSON serialization."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

from .evaluate import procedure_delay, total_capacity, traffic_capacity
from .model import Placement

EXPOSURE_COLUMNS = ("sweep_value", "exposed_first_vnf", "exposed_any_shared", "activated_instances", "objective")
CAPACITY_COLUMNS = ("node_id", "capacity_used", "capacity_fraction")
VNF_CAPACITY_COLUMNS = ("vnf_type", "node_id", "capacity_units")
UTILIZATION_COLUMNS = ("vnf_type", "instance_index", "node_id", "traffic_capacity", "fraction")
DELAY_COLUMNS = ("procedure_kind", "mean_delay_seconds")


@dataclass
class MetricsBundle:
    exposed_procedures_first_vnf: int = 0
    exposed_procedures_any_shared: int = 0
    activated_instances: int = 0
    node_capacity_used: dict = field(default_factory=dict)        # node -> fraction of C^max
    node_capacity_units: dict = field(default_factory=dict)       # node -> capacity units
    per_vnf_node_capacity: dict = field(default_factory=dict)     # (type, node) -> units
    instance_capacity_fraction: dict = field(default_factory=dict)  # (type, index) -> fraction
    instance_rows: list = field(default_factory=list)             # (type, index, node, traffic, fraction)
    vnf_utilization: dict = field(default_factory=dict)           # type -> mean fraction
    procedure_delays: dict = field(default_factory=dict)          # kind -> seconds
    objective: float | None = None


def _shared_instances(placement: Placement) -> dict:
    """(type, index) -> procedures mapped to it, pseudo types left out."""
    types = placement.scenario.types
    out: dict = {}
    for n, t, i, s, p in placement.gamma:
        if not types[t].is_pseudo:
            out.setdefault((t, i), set()).add((s, p))
    return out


def exposure_metrics(placement: Placement) -> tuple[int, int]:
    """Count internal procedures sharing an external procedure's first VNF, and sharing any VNF."""
    sc = placement.scenario
    external = {p.key for p in sc.procedures if p.external}
    if not external:
        return 0, 0
    users = _shared_instances(placement)
    first_hosts = set()
    for key in external:
        t = sc.structures[key].first_vnf
        for _, i in placement.mapping.get(key + (t,), ()):
            first_hosts.add((t, i))
    first, anyshared = set(), set()
    for inst, procs in users.items():
        if not procs & external:
            continue
        internal = procs - external
        anyshared |= internal
        if inst in first_hosts:
            first |= internal
    return len(first), len(anyshared)


def activation_metrics(placement: Placement) -> MetricsBundle:
    sc = placement.scenario
    types = sc.types
    out = MetricsBundle()
    units = {n: 0.0 for n in sc.topology.node_ids}
    per_vnf: dict = {}
    fractions: dict = {}
    for n, t, i in placement.instances():
        spec = types[t]
        if spec.is_pseudo:
            continue
        if (n, t, i) in placement.beta:
            out.activated_instances += 1
        cap = total_capacity(placement, n, t, i)
        units[n] = units.get(n, 0.0) + cap
        per_vnf[(t, n)] = per_vnf.get((t, n), 0.0) + cap
        traffic = traffic_capacity(placement, n, t, i)
        frac = traffic / spec.max_capacity if spec.max_capacity > 0 else 0.0
        fractions.setdefault(t, []).append(frac)
        out.instance_capacity_fraction[(t, i)] = frac
        out.instance_rows.append((t, i, n, traffic, frac))
    cmax = sc.topology.capacity
    out.node_capacity_units = units
    out.node_capacity_used = {n: units[n] / cmax[n] for n in sc.topology.node_ids}
    order = {v.id: k for k, v in enumerate(sc.catalog)}
    npos = {n: k for k, n in enumerate(sc.topology.node_ids)}
    out.per_vnf_node_capacity = dict(sorted(per_vnf.items(), key=lambda kv: (order[kv[0][0]], npos[kv[0][1]])))
    out.instance_rows.sort(key=lambda r: (order[r[0]], r[1], npos[r[2]]))
    out.vnf_utilization = {
        t: sum(fractions[t]) / len(fractions[t]) for t in sorted(fractions, key=order.get)
    }
    return out


def delay_metrics(placement: Placement) -> dict:
    """Mean end-to-end delay per procedure kind, averaged over the slices that run it."""
    acc: dict = {}
    sc = placement.scenario
    for p in sc.procedures:
        if not all(placement.mapping.get(p.key + (t,)) for t in sc.structures[p.key].type_order):
            continue  # unmapped procedures have no delay to report
        acc.setdefault(p.kind or p.id, []).append(procedure_delay(placement, p.slice, p.id))
    return {kind: sum(v) / len(v) for kind, v in acc.items()}


def compute_metrics(placement: Placement, objective: float | None = None) -> MetricsBundle:
    bundle = activation_metrics(placement)
    bundle.exposed_procedures_first_vnf, bundle.exposed_procedures_any_shared = exposure_metrics(placement)
    bundle.procedure_delays = delay_metrics(placement)
    bundle.objective = objective
    return bundle


def exposure_row(bundle: MetricsBundle, sweep_value="") -> dict:
    return dict(zip(EXPOSURE_COLUMNS, (
        sweep_value, bundle.exposed_procedures_first_vnf, bundle.exposed_procedures_any_shared,
        bundle.activated_instances, bundle.objective,
    )))


def tables(bundle: MetricsBundle, sweep_value="") -> dict:
    """File stem -> (columns, rows as dicts)."""
    return {
        "exposure": (EXPOSURE_COLUMNS, [exposure_row(bundle, sweep_value)]),
        "capacity": (CAPACITY_COLUMNS, [
            dict(zip(CAPACITY_COLUMNS, (n, bundle.node_capacity_units[n], frac)))
            for n, frac in bundle.node_capacity_used.items()
        ]),
        "vnf_capacity": (VNF_CAPACITY_COLUMNS, [
            dict(zip(VNF_CAPACITY_COLUMNS, (t, n, u))) for (t, n), u in bundle.per_vnf_node_capacity.items()
        ]),
        "utilization": (UTILIZATION_COLUMNS, [dict(zip(UTILIZATION_COLUMNS, r)) for r in bundle.instance_rows]),
        "delays": (DELAY_COLUMNS, [
            dict(zip(DELAY_COLUMNS, kv)) for kv in bundle.procedure_delays.items()
        ]),
    }


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_table(path: Path, columns, rows) -> None:
    """CSV plus a JSON mirror with the same field names; floats keep full precision."""
    path = Path(path)
    with open(path.with_suffix(".csv"), "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r[c]) for c in columns])
    with open(path.with_suffix(".json"), "w") as fh:
        json.dump([{c: r[c] for c in columns} for r in rows], fh, indent=2)
        fh.write("\n")


def write_metrics(bundle: MetricsBundle, outdir, sweep_value="") -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for stem, (cols, rows) in tables(bundle, sweep_value).items():
        write_table(outdir / stem, cols, rows)
        written.append(outdir / f"{stem}.csv")
    return written
