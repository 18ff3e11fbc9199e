"""Domain types for the physical substrate, the VNF catalog, slices and placements.

All types are frozen dataclasses. Constructors do not enforce invariants;
:func:`validate_scenario` reports violations so that malformed scenario files
can be diagnosed instead of rejected on the first bad field.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Hashable, Iterable, Mapping

NodeId = Hashable
TypeId = str
SliceId = str
ProcId = str
Instance = tuple  # (type id, index)


class SliceGuardError(Exception):
    """Base class for all errors raised by this package."""


class EmptyAfterStrip(SliceGuardError):
    pass


class UnknownKind(SliceGuardError):
    pass


@dataclass(frozen=True)
class PhysicalNode:
    id: NodeId
    max_capacity: float


@dataclass(frozen=True)
class PhysicalLink:
    source: NodeId
    target: NodeId
    delay: float
    bandwidth: float


@dataclass(frozen=True)
class Topology:
    nodes: tuple[PhysicalNode, ...]
    links: tuple[PhysicalLink, ...]

    @cached_property
    def node_ids(self) -> tuple:
        return tuple(n.id for n in self.nodes)

    @cached_property
    def capacity(self) -> dict:
        return {n.id: n.max_capacity for n in self.nodes}

    @cached_property
    def link_map(self) -> dict:
        return {(l.source, l.target): l for l in self.links}

    @classmethod
    def mesh(cls, capacities: Mapping, delay: float, bandwidth: float) -> "Topology":
        """Full directed mesh: one link per ordered pair of distinct nodes."""
        nodes = tuple(PhysicalNode(k, v) for k, v in capacities.items())
        links = tuple(
            PhysicalLink(a.id, b.id, delay, bandwidth)
            for a in nodes for b in nodes if a.id != b.id
        )
        return cls(nodes, links)


@dataclass(frozen=True)
class VnfTypeSpec:
    id: TypeId
    base_capacity: float
    per_unit_capacity: float
    service_rate: float
    max_capacity: float
    max_traffic_capacity: float
    instance_budget: int
    is_pseudo: bool = False
    name: str = ""


@dataclass(frozen=True)
class ProcedureSpec:
    id: ProcId
    slice: SliceId
    sequence: tuple[TypeId, ...]
    packet_rate: float
    max_delay: float
    external: bool = False
    kind: str = ""

    @property
    def key(self) -> tuple[SliceId, ProcId]:
        return (self.slice, self.id)


@dataclass(frozen=True)
class SliceRequest:
    id: SliceId
    procedures: tuple[ProcedureSpec, ...]


@dataclass(frozen=True)
class VirtualStructure:
    vnf_types: frozenset
    virtual_links: tuple[tuple[TypeId, TypeId], ...]
    traverse_count: Mapping[TypeId, int]
    first_vnf: TypeId
    sequence: tuple[TypeId, ...]

    @cached_property
    def type_order(self) -> tuple[TypeId, ...]:
        """Types in order of first occurrence along the stripped sequence."""
        return tuple(dict.fromkeys(self.sequence))

    @cached_property
    def step_counts(self) -> dict:
        """Occurrences of every inter-type virtual step; self-pairs excluded."""
        return dict(Counter((a, b) for a, b in self.virtual_links if a != b))


@dataclass(frozen=True)
class SecurityToggles:
    exposure: bool = True
    max_traffic: bool = True


@dataclass(frozen=True)
class Weights:
    capacity: float = 1.0
    delay: float = 1.0


@dataclass(frozen=True)
class BigMConstants:
    m_launch: int
    c_exposure: int


@dataclass(frozen=True)
class Scenario:
    topology: Topology
    catalog: tuple[VnfTypeSpec, ...]
    slices: tuple[SliceRequest, ...]
    toggles: SecurityToggles = field(default_factory=SecurityToggles)
    weights: Weights = field(default_factory=Weights)
    seed: int | None = None

    @cached_property
    def types(self) -> dict:
        return {v.id: v for v in self.catalog}

    @cached_property
    def procedures(self) -> tuple[ProcedureSpec, ...]:
        """All procedures in canonical order: slice declaration order, then procedure order."""
        return tuple(p for s in self.slices for p in s.procedures)

    @cached_property
    def procedure_map(self) -> dict:
        return {p.key: p for p in self.procedures}

    @cached_property
    def structures(self) -> dict:
        return {p.key: derive_virtual_structure(p, self.types) for p in self.procedures}

    @cached_property
    def big_m(self) -> BigMConstants:
        n = len(self.procedures)
        return BigMConstants(m_launch=n + 1, c_exposure=n + 1)

    def replace(self, **changes) -> "Scenario":
        return replace(self, **changes)

    def with_procedures(self, fn) -> "Scenario":
        """Return a copy with ``fn(index, procedure)`` applied to every procedure."""
        out, k = [], 0
        for s in self.slices:
            procs = []
            for p in s.procedures:
                procs.append(fn(k, p))
                k += 1
            out.append(replace(s, procedures=tuple(procs)))
        return replace(self, slices=tuple(out))


def derive_virtual_structure(proc: ProcedureSpec, catalog: Mapping[TypeId, VnfTypeSpec]) -> VirtualStructure:
    """Strip leading UE/RAN entities and derive the chain's virtual links and traverse counts.

    Interior pseudo entities stay in the chain as delay-only hops. Unknown type
    ids are treated as capacity-bearing; :func:`validate_scenario` reports them.
    """
    seq = list(proc.sequence)
    if not seq:
        raise EmptyAfterStrip(f"procedure {proc.key} has an empty sequence")

    def pseudo(t):
        spec = catalog.get(t)
        return spec is not None and spec.is_pseudo

    k = 0
    while k < len(seq) and pseudo(seq[k]):
        k += 1
    stripped = tuple(seq[k:])
    if not stripped:
        raise EmptyAfterStrip(f"procedure {proc.key} contains only UE/RAN entities")
    return VirtualStructure(
        vnf_types=frozenset(stripped),
        virtual_links=tuple(zip(stripped, stripped[1:])),
        traverse_count=dict(Counter(stripped)),
        first_vnf=stripped[0],
        sequence=stripped,
    )


@dataclass(frozen=True)
class Violation:
    kind: str
    where: tuple
    detail: str = ""


def validate_scenario(scenario: Scenario) -> list[Violation]:
    """Return every referential-integrity and invariant violation found in ``scenario``."""
    out: list[Violation] = []
    topo = scenario.topology
    add = lambda kind, where, detail="": out.append(Violation(kind, where, detail))

    node_ids = [n.id for n in topo.nodes]
    for nid, c in Counter(node_ids).items():
        if c > 1:
            add("DuplicateId", ("node", nid))
    for n in topo.nodes:
        if not n.max_capacity > 0:
            add("NonPositiveCapacity", ("node", n.id), f"max_capacity={n.max_capacity}")
    known_nodes = set(node_ids)
    pairs = Counter()
    for l in topo.links:
        where = ("link", l.source, l.target)
        pairs[(l.source, l.target)] += 1
        if l.source not in known_nodes or l.target not in known_nodes:
            add("UnknownNode", where)
        if l.source == l.target:
            add("SelfLoop", where)
        if not l.delay >= 0:
            add("NegativeLinkDelay", where, f"delay={l.delay}")
        if not l.bandwidth > 0:
            add("NonPositiveBandwidth", where, f"bandwidth={l.bandwidth}")
    for pair, c in pairs.items():
        if c > 1:
            add("DuplicateLink", ("link",) + pair)

    for tid, c in Counter(v.id for v in scenario.catalog).items():
        if c > 1:
            add("DuplicateId", ("vnf", tid))
    for v in scenario.catalog:
        where = ("vnf", v.id)
        if v.is_pseudo:
            if v.base_capacity != 0 or v.per_unit_capacity != 0:
                add("PseudoWithCapacity", where)
        elif not v.service_rate > 0:
            add("NonPositiveServiceRate", where, f"service_rate={v.service_rate}")
        if v.base_capacity < 0:
            add("NegativeBaseCapacity", where)
        if v.per_unit_capacity < 0:
            add("NegativeUnitCapacity", where)
        if v.max_traffic_capacity > v.max_capacity:
            add("TrafficLimitAboveMax", where)
        if v.instance_budget < 1:
            add("NonPositiveBudget", where)

    types = scenario.types
    for sid, c in Counter(s.id for s in scenario.slices).items():
        if c > 1:
            add("DuplicateId", ("slice", sid))
    for s in scenario.slices:
        if not s.procedures:
            add("EmptySlice", ("slice", s.id))
        for pid, c in Counter(p.id for p in s.procedures).items():
            if c > 1:
                add("DuplicateId", ("procedure", s.id, pid))
        for p in s.procedures:
            where = ("procedure", s.id, p.id)
            if p.slice != s.id:
                add("SliceMismatch", where, f"procedure declares slice {p.slice}")
            unknown = [t for t in p.sequence if t not in types]
            for t in dict.fromkeys(unknown):
                add("UnknownVnfType", where, t)
            if not p.packet_rate > 0:
                add("NonPositiveRate", where, f"packet_rate={p.packet_rate}")
            if not p.max_delay > 0:
                add("NonPositiveDelay", where, f"max_delay={p.max_delay}")
            try:
                vs = derive_virtual_structure(p, types)
            except EmptyAfterStrip as exc:
                add("EmptyAfterStrip", where, str(exc))
                continue
            if unknown or not p.max_delay > 0:
                continue
            for t in vs.type_order:
                spec = types[t]
                if spec.is_pseudo or not spec.service_rate > 0:
                    continue
                if not p.max_delay > 1.0 / spec.service_rate:
                    add("DeadlineBelowProcessing", where, t)
    return out


@dataclass(frozen=True)
class Placement:
    """Explicit decision tables; each table is the set of index tuples whose entry is 1.

    gamma: (node, type, index, slice, procedure)
    chi:   ((node, node), slice, procedure, ((type, index), (type, index)))
    beta:  (node, type, index)
    omega: (node, type, index, slice)
    """

    scenario: Scenario = field(repr=False, compare=False)
    gamma: frozenset = frozenset()
    chi: frozenset = frozenset()
    beta: frozenset = frozenset()
    omega: frozenset = frozenset()

    @classmethod
    def from_assignment(
        cls,
        scenario: Scenario,
        instances: Mapping[Instance, NodeId],
        assignment: Mapping[tuple, int],
        omega: Iterable | None = None,
    ) -> "Placement":
        """Build the tables from instance locations and (slice, proc, type) -> index.

        chi follows the flow rule: a virtual step between instances on distinct
        nodes is carried by the physical link joining them. omega defaults to
        the exposure implied by gamma.
        """
        gamma = set()
        for (s, p, t), i in assignment.items():
            gamma.add((instances[(t, i)], t, i, s, p))
        chi = set()
        for proc in scenario.procedures:
            vs = scenario.structures[proc.key]
            for a, b in vs.step_counts:
                ia, ib = assignment.get(proc.key + (a,)), assignment.get(proc.key + (b,))
                if ia is None or ib is None:
                    continue
                n, m = instances[(a, ia)], instances[(b, ib)]
                if n != m:
                    chi.add(((n, m), proc.slice, proc.id, ((a, ia), (b, ib))))
        beta = frozenset((n, t, i) for (t, i), n in instances.items())
        out = cls(scenario, frozenset(gamma), frozenset(chi), beta)
        if omega is None:
            from .evaluate import compute_exposure
            omega = compute_exposure(out)
        return replace(out, omega=frozenset(omega))

    @cached_property
    def users(self) -> dict:
        """(node, type, index) -> list of (slice, procedure) mapped to it."""
        out: dict = {}
        for n, t, i, s, p in sorted(self.gamma, key=_sort_key):
            out.setdefault((n, t, i), []).append((s, p))
        return out

    @cached_property
    def mapping(self) -> dict:
        """(slice, procedure, type) -> list of (node, index)."""
        out: dict = {}
        for n, t, i, s, p in sorted(self.gamma, key=_sort_key):
            out.setdefault((s, p, t), []).append((n, i))
        return out

    @cached_property
    def instance_nodes(self) -> dict:
        """(type, index) -> sorted list of nodes with beta = 1."""
        out: dict = {}
        for n, t, i in sorted(self.beta, key=_sort_key):
            out.setdefault((t, i), []).append(n)
        return out

    @cached_property
    def chi_by_procedure(self) -> dict:
        out: dict = {}
        for entry in sorted(self.chi, key=_sort_key):
            out.setdefault((entry[1], entry[2]), []).append(entry)
        return out

    def instances(self) -> list:
        """Every (node, type, index) carrying beta or gamma, sorted canonically."""
        keys = set(self.beta) | {(n, t, i) for n, t, i, _, _ in self.gamma}
        return sorted(keys, key=_sort_key)


def _sort_key(x):
    # node ids may be ints or strings; compare by (type name, repr) elementwise
    if isinstance(x, tuple):
        return tuple(_sort_key(e) for e in x)
    if isinstance(x, bool):
        return (0, int(x))
    if isinstance(x, (int, float)):
        return (0, x)
    return (1, str(x))


def canonical_sort(items):
    return sorted(items, key=_sort_key)


