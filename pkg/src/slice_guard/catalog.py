"""Built-in 5G catalog, the four standard procedures and the experiment presets."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .model import (
    ProcedureSpec,
    Scenario,
    SecurityToggles,
    SliceRequest,
    Topology,
    UnknownKind,
    VnfTypeSpec,
    Weights,
)

# (id, human-readable name, pseudo); service rates are drawn in this order
ENTITIES = (
    ("AMF", "AMF", False),
    ("SMF", "SMF", False),
    ("UDM", "UDM", False),
    ("AUSF", "AUSF", False),
    ("NRF", "NRF", False),
    ("NSSF", "NSSF", False),
    ("PCF", "PCF", False),
    ("UPF", "UPF", False),
    ("SDM", "SDM", False),
    ("SEAF", "SEAF", False),
    ("ARPF", "ARPF", False),
    ("NewAMF", "New AMF", False),
    ("OldAMF", "Old AMF", False),
    ("InitialAMF", "Initial AMF", False),
    ("TargetAMF", "Target AMF", False),
    ("UE", "UE", True),
    ("RAN", "RAN", True),
    ("SourceRAN", "Source RAN", True),
    ("TargetRAN", "Target RAN", True),
)

PROCEDURES = {
    "general_registration": (
        "UE", "RAN", "NewAMF", "OldAMF", "NewAMF", "AUSF", "UDM", "NewAMF", "UDM",
        "NewAMF", "SDM", "NewAMF", "SDM", "NewAMF", "PCF", "NewAMF", "SMF",
        "NewAMF", "UE", "NewAMF",
    ),
    "registration_amf_reallocation": (
        "RAN", "InitialAMF", "UDM", "InitialAMF", "NSSF", "InitialAMF", "OldAMF",
        "InitialAMF", "NRF", "InitialAMF", "RAN", "InitialAMF", "TargetAMF",
    ),
    "handover": (
        "TargetRAN", "AMF", "SMF", "UPF", "SMF", "SourceRAN", "TargetRAN", "SMF",
        "AMF", "TargetRAN", "SourceRAN",
    ),
    "authentication": (
        "ARPF", "UDM", "AUSF", "SEAF", "UE", "SEAF", "AUSF", "SEAF", "UE",
    ),
}

SLICE_LAYOUT = (
    ("s1", ("registration_amf_reallocation", "handover", "authentication")),
    ("s2", ("general_registration", "handover", "authentication")),
)

# experiment parameters of the reference setup
NODE_COUNT = 3
NODE_CAPACITY = 30.0
LINK_DELAY = 0.005
LINK_BANDWIDTH = 40.0
INSTANCE_MAX_CAPACITY = 10.0
BASE_CAPACITY = 1.0
MAX_TRAFFIC = 2.0
SERVICE_RATE_RANGE = (1000.0, 2000.0)
INSTANCES_PER_TYPE = 4
MAX_DELAY = 1.0
PACKET_RATE = 1.0
UNIT_CAPACITY = 1.0


def builtin_procedure(kind: str, slice_id: str = "s1", *, packet_rate: float = PACKET_RATE,
                      max_delay: float = MAX_DELAY, external: bool = False) -> ProcedureSpec:
    """Return one of the four standard procedures with its full, unstripped entity sequence."""
    try:
        seq = PROCEDURES[kind]
    except KeyError:
        raise UnknownKind(kind) from None
    return ProcedureSpec(
        id=kind, slice=slice_id, sequence=seq, packet_rate=packet_rate,
        max_delay=max_delay, external=external, kind=kind,
    )


def draw_service_rates(seed: int) -> dict:
    """One uniform draw per capacity-bearing entity, in ENTITIES order, from PCG64(seed)."""
    rng = np.random.Generator(np.random.PCG64(seed))
    lo, hi = SERVICE_RATE_RANGE
    return {tid: float(rng.uniform(lo, hi)) for tid, _, pseudo in ENTITIES if not pseudo}


def build_catalog(seed: int, max_traffic: float = MAX_TRAFFIC) -> tuple[VnfTypeSpec, ...]:
    rates = draw_service_rates(seed)
    out = []
    for tid, name, pseudo in ENTITIES:
        if pseudo:
            out.append(VnfTypeSpec(tid, 0.0, 0.0, 0.0, 0.0, 0.0, INSTANCES_PER_TYPE, True, name))
        else:
            out.append(VnfTypeSpec(
                tid, BASE_CAPACITY, UNIT_CAPACITY, rates[tid], INSTANCE_MAX_CAPACITY,
                max_traffic, INSTANCES_PER_TYPE, False, name,
            ))
    return tuple(out)


def build_base_scenario(seed: int = 42, *, external_count: int = 0,
                         toggles: SecurityToggles | None = None,
                         max_traffic: float = MAX_TRAFFIC) -> Scenario:
    """Three-node mesh, two slices with three procedures each; see SLICE_LAYOUT.

    ``external_count`` flags the first k procedures in canonical order as
    externally sourced.
    """
    topo = Topology.mesh(
        {f"n{k + 1}": NODE_CAPACITY for k in range(NODE_COUNT)}, LINK_DELAY, LINK_BANDWIDTH,
    )
    slices = tuple(
        SliceRequest(sid, tuple(builtin_procedure(kind, sid) for kind in kinds))
        for sid, kinds in SLICE_LAYOUT
    )
    sc = Scenario(
        topology=topo,
        catalog=build_catalog(seed, max_traffic),
        slices=slices,
        toggles=toggles or SecurityToggles(),
        weights=Weights(),
        seed=seed,
    )
    return set_external_count(sc, external_count)


def set_external_count(scenario: Scenario, k: int) -> Scenario:
    return scenario.with_procedures(lambda idx, p: replace(p, external=idx < k))


def set_max_traffic(scenario: Scenario, limit: float) -> Scenario:
    catalog = tuple(
        v if v.is_pseudo else replace(v, max_traffic_capacity=float(limit))
        for v in scenario.catalog
    )
    return scenario.replace(catalog=catalog)


SWEEP_VARIABLES = ("external_count", "max_traffic_limit", "time_limit")


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple
    toggles: SecurityToggles | None = None

    def problems(self) -> list[str]:
        out = []
        if self.variable not in SWEEP_VARIABLES:
            out.append(f"unknown sweep variable {self.variable!r}")
        if not self.values:
            out.append("sweep has no values")
        vals = list(self.values)
        if vals != sorted(vals) and vals != sorted(vals, reverse=True):
            out.append("sweep values are not monotone")
        return out


def apply_sweep(scenario: Scenario, sweep: SweepSpec) -> list[tuple]:
    """One (value, scenario) pair per sweep value; ``time_limit`` leaves the scenario unchanged."""
    problems = sweep.problems()
    if problems:
        raise ValueError("; ".join(problems))
    base = scenario if sweep.toggles is None else scenario.replace(toggles=sweep.toggles)
    out = []
    for value in sweep.values:
        if sweep.variable == "external_count":
            variant = set_external_count(base, int(value))
        elif sweep.variable == "max_traffic_limit":
            variant = set_max_traffic(base, value)
        else:
            variant = base
        out.append((value, variant))
    return out


@dataclass(frozen=True)
class Preset:
    name: str
    scenario: Scenario
    sweep: SweepSpec | None = None
    description: str = ""


def _tiny(node_capacity=10.0, max_delay=1.0, external=False, toggles=None) -> Scenario:
    caps = node_capacity if isinstance(node_capacity, tuple) else (node_capacity, node_capacity)
    topo = Topology.mesh({"n1": caps[0], "n2": caps[1]}, LINK_DELAY, LINK_BANDWIDTH)
    catalog = tuple(
        VnfTypeSpec(t, 1.0, 1.0, 1000.0, 10.0, 10.0, 2, False, t) for t in ("A", "B")
    )
    proc = ProcedureSpec("p1", "s1", ("A", "B"), 1.0, max_delay, external, "chain")
    return Scenario(topo, catalog, (SliceRequest("s1", (proc,)),),
                    toggles or SecurityToggles(exposure=False, max_traffic=False), Weights(), None)


def tiny_scenario(**kw) -> Scenario:
    """Two nodes, two types, one procedure A -> B at unit rate.

    ``node_capacity`` is one value for both nodes or a (n1, n2) pair.
    """
    return _tiny(**kw)


def preset(name: str, seed: int = 42) -> Preset:
    on_off = SecurityToggles
    if name == "paper-base":
        sc = build_base_scenario(seed, external_count=1, toggles=on_off(True, True))
        return Preset(name, sc, None, "reference setup, AMF re-allocation external, both constraints on")
    if name == "paper-nodecap":
        sc = build_base_scenario(seed, external_count=1, toggles=on_off(True, True))
        return Preset(name, sc, None, "node capacity study; toggle exposure from the command line")
    if name == "paper-exposure-sweep":
        sc = build_base_scenario(seed, external_count=0, toggles=on_off(True, False))
        return Preset(name, sc, SweepSpec("external_count", (0, 1, 2, 3, 4)),
                      "external procedures 0..4, exposure on, traffic limit off")
    if name == "paper-maxtraffic-sweep":
        sc = build_base_scenario(seed, external_count=1, toggles=on_off(False, True))
        return Preset(name, sc, SweepSpec("max_traffic_limit", (1, 2, 3, 4, 5)),
                      "traffic limit 1..5, one external procedure, exposure off")
    if name == "tiny-t1":
        return Preset(name, _tiny(), None, "two nodes, chain A -> B")
    if name == "tiny-t1-split":
        return Preset(name, _tiny(node_capacity=2.0), None, "node capacity forces a split")
    if name == "tiny-greedy-trap":
        return Preset(name, _tiny(node_capacity=(3.0, 10.0)), None,
                      "greedy splits the chain; the optimum keeps it on n2")
    if name == "tiny-infeasible":
        return Preset(name, _tiny(max_delay=0.0015), None, "deadline below the chain's minimum delay")
    raise KeyError(f"unknown preset {name!r}")


PRESETS = (
    "paper-base", "paper-exposure-sweep", "paper-maxtraffic-sweep", "paper-nodecap",
    "tiny-t1", "tiny-t1-split", "tiny-greedy-trap", "tiny-infeasible",
)


def random_tiny_scenario(seed: int, toggles: SecurityToggles | None = None) -> Scenario:
    """Small random instance for oracle cross-checks: at most 2 nodes, 3 types, 2 procedures.

    A pseudo UE type, when drawn, counts toward the three types.

    Rates and limits are chosen so that capacity, traffic limits, links and
    deadlines all bind now and then.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    n_nodes = int(rng.integers(1, 3))
    caps = {f"n{k + 1}": float(rng.choice([4.0, 6.0, 9.0, 14.0])) for k in range(n_nodes)}
    topo = Topology.mesh(caps, float(rng.choice([0.001, 0.005])), float(rng.choice([2.0, 4.0, 40.0])))
    with_pseudo = bool(rng.random() < 0.3)
    n_types = int(rng.integers(1, 3 if with_pseudo else 4))
    catalog = []
    for k in range(n_types):
        zmax = float(rng.choice([3.0, 5.0, 10.0]))
        catalog.append(VnfTypeSpec(
            f"T{k}", float(rng.choice([0.0, 1.0])), float(rng.choice([0.5, 1.0])),
            float(rng.uniform(20.0, 80.0)), zmax, float(rng.choice([1.0, 2.0, zmax])),
            int(rng.integers(1, 3)), False, f"T{k}",
        ))
    if with_pseudo:
        catalog.append(VnfTypeSpec("UE", 0.0, 0.0, 0.0, 0.0, 0.0, 2, True, "UE"))
    type_ids = [v.id for v in catalog if not v.is_pseudo]
    n_procs = int(rng.integers(1, 3))
    slice_ids = ["s1", "s2"][: int(rng.integers(1, 3))]
    procs = {s: [] for s in slice_ids}
    for k in range(n_procs):
        length = int(rng.integers(2, 5))
        seq = [str(x) for x in rng.choice(type_ids, size=length)]
        if with_pseudo and rng.random() < 0.5:
            seq.insert(int(rng.integers(0, len(seq) + 1)), "UE")
        sid = slice_ids[k % len(slice_ids)]
        procs[sid].append(ProcedureSpec(
            f"p{k + 1}", sid, tuple(seq), float(rng.choice([0.5, 1.0, 2.0])),
            float(rng.choice([0.25, 2.0])), bool(rng.random() < 0.5), "random",
        ))
    slices = tuple(SliceRequest(s, tuple(ps)) for s, ps in procs.items() if ps)
    return Scenario(topo, tuple(catalog), slices, toggles or SecurityToggles(), Weights(), seed)
