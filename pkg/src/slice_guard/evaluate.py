"""Objective, derived quantities and constraint checks for a candidate placement.

Everything here reads a :class:`~slice_guard.model.Placement` and never mutates
it. The solvers call these functions to score and certify incumbents, so the
brute-force oracle and branch and bound agree on one definition of the model.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .model import Placement, SecurityToggles, SliceGuardError, Weights, canonical_sort

STABILITY_EPSILON = 1e-6
TOL = 1e-9

FAMILIES = (
    "coverage", "launch_bound", "launch_used", "single_node", "instance_capacity", "node_capacity", "flow", "bandwidth", "deadline",
    "traffic_limit", "exposure_flag", "exposure_isolation",
)


class Unstable(SliceGuardError):
    """Offered load reaches the service rate of an instance."""


class UnmappedVnf(SliceGuardError):
    pass


@dataclass(frozen=True)
class ConstraintViolation:
    family: str
    indices: tuple
    slack: float


@dataclass(frozen=True)
class ConstraintReport:
    violations: tuple[ConstraintViolation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def families(self) -> dict:
        out: dict = {}
        for v in self.violations:
            out.setdefault(v.family, []).append(v)
        return out

    def __add__(self, other: "ConstraintReport") -> "ConstraintReport":
        return ConstraintReport(self.violations + other.violations)


@dataclass(frozen=True)
class DerivedQuantities:
    traffic_capacity: dict
    total_capacity: dict
    instance_delay: dict
    procedure_delay: dict
    objective: float
    capacity_total: float = 0.0
    delay_total: float = 0.0
    weights: Weights = field(default_factory=Weights)


def _spec(placement, vnf_type):
    return placement.scenario.types[vnf_type]


def _lam(placement, s, p):
    return placement.scenario.procedure_map[(s, p)].packet_rate


def traffic_capacity(placement: Placement, node, vnf_type, index) -> float:
    """Load-proportional capacity of an instance; every traverse of a procedure costs lambda * mu."""
    spec = _spec(placement, vnf_type)
    total = 0.0
    for s, p in placement.users.get((node, vnf_type, index), ()):
        trav = placement.scenario.structures[(s, p)].traverse_count.get(vnf_type, 0)
        total += _lam(placement, s, p) * trav * spec.per_unit_capacity
    return total


def served_traffic(placement: Placement, node, vnf_type, index) -> float:
    """Per-procedure traffic (one lambda * mu per procedure) checked against the traffic limit."""
    spec = _spec(placement, vnf_type)
    return sum(
        _lam(placement, s, p) * spec.per_unit_capacity
        for s, p in placement.users.get((node, vnf_type, index), ())
    )


def total_capacity(placement: Placement, node, vnf_type, index) -> float:
    spec = _spec(placement, vnf_type)
    active = 1.0 if (node, vnf_type, index) in placement.beta else 0.0
    return spec.base_capacity * active + traffic_capacity(placement, node, vnf_type, index)


def instance_load(placement: Placement, node, vnf_type, index) -> float:
    return sum(_lam(placement, s, p) for s, p in placement.users.get((node, vnf_type, index), ()))


def mm1_delay(service_rate: float, load: float, epsilon: float = STABILITY_EPSILON) -> float:
    """Fixed service time plus M/M/1 sojourn: 1/w + 1/(w - load)."""
    if load >= service_rate - epsilon:
        raise Unstable(f"load {load} reaches service rate {service_rate}")
    return 1.0 / service_rate + 1.0 / (service_rate - load)


def instance_delay(placement: Placement, node, vnf_type, index, epsilon: float = STABILITY_EPSILON) -> float:
    spec = _spec(placement, vnf_type)
    if spec.is_pseudo:
        return 0.0
    return mm1_delay(spec.service_rate, instance_load(placement, node, vnf_type, index), epsilon)


def procedure_delay(placement: Placement, slice_id, proc_id, epsilon: float = STABILITY_EPSILON) -> float:
    """Processing delay per traverse of each mapped instance plus propagation over mapped links."""
    vs = placement.scenario.structures[(slice_id, proc_id)]
    total = 0.0
    for t in vs.type_order:
        mapped = placement.mapping.get((slice_id, proc_id, t))
        if not mapped:
            raise UnmappedVnf(f"{t} of {(slice_id, proc_id)} is not mapped")
        for n, i in mapped:
            total += vs.traverse_count[t] * instance_delay(placement, n, t, i, epsilon)
    links = placement.scenario.topology.link_map
    for (n, m), _, _, ((a, _), (b, _)) in placement.chi_by_procedure.get((slice_id, proc_id), ()):
        link = links.get((n, m))
        if link is not None:
            total += link.delay * vs.step_counts.get((a, b), 0)
    return total


def derive_quantities(placement: Placement, weights: Weights | None = None,
                      epsilon: float = STABILITY_EPSILON) -> DerivedQuantities:
    weights = weights or placement.scenario.weights
    traffic, total, delay = {}, {}, {}
    for key in placement.instances():
        traffic[key] = traffic_capacity(placement, *key)
        total[key] = total_capacity(placement, *key)
        delay[key] = instance_delay(placement, *key, epsilon=epsilon)
    proc_delay = {
        p.key: procedure_delay(placement, p.slice, p.id, epsilon)
        for p in placement.scenario.procedures
    }
    cap = sum(total.values())
    dly = sum(proc_delay.values())
    return DerivedQuantities(
        traffic_capacity=traffic,
        total_capacity=total,
        instance_delay=delay,
        procedure_delay=proc_delay,
        objective=weights.capacity * cap + weights.delay * dly,
        capacity_total=cap,
        delay_total=dly,
        weights=weights,
    )


def objective(placement: Placement, weights: Weights | None = None,
              epsilon: float = STABILITY_EPSILON) -> float:
    return derive_quantities(placement, weights, epsilon).objective


def node_load(placement: Placement, node) -> float:
    return sum(total_capacity(placement, *k) for k in placement.instances() if k[0] == node)


def node_load_literal(placement: Placement, node) -> float:
    """Node load in its original product form, sum of capacity * activation."""
    return sum(
        total_capacity(placement, *k) * (1.0 if k in placement.beta else 0.0)
        for k in placement.instances() if k[0] == node
    )


def check_assignment(placement: Placement, epsilon: float = STABILITY_EPSILON) -> ConstraintReport:
    sc = placement.scenario
    types, topo = sc.types, sc.topology
    out: list[ConstraintViolation] = []
    add = lambda fam, idx, slack: out.append(ConstraintViolation(fam, idx, slack))
    known_nodes = set(topo.node_ids)

    # value domain: indices must name existing nodes, types and budgets
    for n, t, i in canonical_sort(placement.beta):
        if n not in known_nodes or t not in types or not 0 <= i < types[t].instance_budget:
            add("domain", ("beta", n, t, i), -1.0)
    for n, t, i, s, p in canonical_sort(placement.gamma):
        if (n not in known_nodes or t not in types or (s, p) not in sc.procedure_map
                or not 0 <= i < types[t].instance_budget):
            add("domain", ("gamma", n, t, i, s, p), -1.0)
    if out:
        return ConstraintReport(tuple(out))

    # each procedure maps each type it traverses to exactly one instance
    unique = set()
    for proc in sc.procedures:
        vs = sc.structures[proc.key]
        clean = True
        for t in sc.types:
            got = len(placement.mapping.get(proc.key + (t,), ()))
            want = 1 if vs.traverse_count.get(t, 0) >= 1 else 0
            if got != want:
                clean = False
                add("coverage", proc.key + (t,), float(want - got))
        if clean:
            unique.add(proc.key)

    m_launch = sc.big_m.m_launch
    for key in placement.instances():
        used = len(placement.users.get(key, ()))
        active = 1 if key in placement.beta else 0
        if used > m_launch * active:
            add("launch_bound", key, float(m_launch * active - used))
        if active > used:
            add("launch_used", key, float(used - active))

    for (t, i), nodes in placement.instance_nodes.items():
        if len(nodes) > 1:
            add("single_node", (t, i), float(1 - len(nodes)))

    for key in placement.instances():
        zeta = total_capacity(placement, *key)
        limit = types[key[1]].max_capacity
        if zeta > limit + TOL:
            add("instance_capacity", key, limit - zeta)

    for node in topo.nodes:
        used = node_load(placement, node.id)
        if used > node.max_capacity + TOL:
            add("node_capacity", (node.id,), node.max_capacity - used)

    # chi must equal the product of the endpoint mappings on distinct nodes
    expected = set()
    for proc in sc.procedures:
        if proc.key not in unique:
            continue
        vs = sc.structures[proc.key]
        for a, b in vs.step_counts:
            (n, ia), = placement.mapping[proc.key + (a,)]
            (m, ib), = placement.mapping[proc.key + (b,)]
            if n == m:
                continue
            entry = ((n, m), proc.slice, proc.id, ((a, ia), (b, ib)))
            expected.add(entry)
            if (n, m) not in topo.link_map:
                add("flow", entry, -1.0)
            elif entry not in placement.chi:
                add("flow", entry, -1.0)
    for entry in canonical_sort(placement.chi):
        if entry in expected:
            continue
        key = (entry[1], entry[2])
        if key in unique or key not in sc.procedure_map or entry[0] not in topo.link_map:
            add("flow", entry, -1.0)

    usage: dict = {}
    for (nm, s, p, ((a, _), (b, _))) in placement.chi:
        if nm not in topo.link_map or (s, p) not in sc.procedure_map:
            continue
        count = sc.structures[(s, p)].step_counts.get((a, b), 0)
        usage[nm] = usage.get(nm, 0.0) + _lam(placement, s, p) * count
    for nm in canonical_sort(usage):
        bw = topo.link_map[nm].bandwidth
        if usage[nm] > bw + TOL:
            add("bandwidth", nm, bw - usage[nm])

    unstable = set()
    for key in placement.instances():
        spec = types[key[1]]
        if spec.is_pseudo:
            continue
        load = instance_load(placement, *key)
        if load >= spec.service_rate - epsilon:
            unstable.add(key)
            add("stability", key, spec.service_rate - epsilon - load)

    for proc in sc.procedures:
        if proc.key not in unique:
            continue
        touched = {(n, t, i) for t in sc.structures[proc.key].type_order
                   for n, i in placement.mapping[proc.key + (t,)]}
        if touched & unstable:
            continue
        d = procedure_delay(placement, proc.slice, proc.id, epsilon)
        if d > proc.max_delay:
            add("deadline", proc.key, proc.max_delay - d)
    return ConstraintReport(tuple(out))


def compute_exposure(placement: Placement) -> frozenset:
    """Instances hosting the first VNF of an externally sourced procedure, per slice."""
    sc = placement.scenario
    out = set()
    for n, t, i, s, p in placement.gamma:
        proc = sc.procedure_map.get((s, p))
        if proc is None or not proc.external:
            continue
        if sc.structures[proc.key].first_vnf == t:
            out.add((n, t, i, s))
    return frozenset(out)


def check_security(placement: Placement, toggles: SecurityToggles | None = None) -> ConstraintReport:
    sc = placement.scenario
    toggles = toggles or sc.toggles
    out: list[ConstraintViolation] = []
    add = lambda fam, idx, slack: out.append(ConstraintViolation(fam, idx, slack))

    if toggles.max_traffic:
        for key in placement.instances():
            spec = sc.types.get(key[1])
            if spec is None:
                continue
            served = served_traffic(placement, *key)
            if served > spec.max_traffic_capacity + TOL:
                add("traffic_limit", key, spec.max_traffic_capacity - served)

    if toggles.exposure:
        c_exp = sc.big_m.c_exposure
        source = {}
        for n, t, i, s, p in placement.gamma:
            proc = sc.procedure_map.get((s, p))
            if proc and proc.external and sc.structures[proc.key].first_vnf == t:
                source[(n, t, i, s)] = source.get((n, t, i, s), 0) + 1
        for key in canonical_sort(set(source) | set(placement.omega)):
            lhs = source.get(key, 0)
            flag = 1 if key in placement.omega else 0
            if lhs > c_exp * flag:
                add("exposure_flag", key, float(c_exp * flag - lhs))
            elif flag > lhs:
                add("exposure_flag", key, float(lhs - flag))

        exposed: dict = {}
        for n, t, i, s in placement.omega:
            exposed.setdefault((n, t, i), set()).add(s)
        for key in canonical_sort(exposed):
            slices = exposed[key]
            offenders = 0
            for s, p in placement.users.get(key, ()):
                proc = sc.procedure_map.get((s, p))
                if s not in slices or proc is None or not proc.external:
                    offenders += 1
            excess = len(slices) - 1
            if excess > 0 or offenders:
                add("exposure_isolation", key, -float(max(excess, 0) + offenders))
    return ConstraintReport(tuple(out))


def check_placement(placement: Placement, toggles: SecurityToggles | None = None,
                    epsilon: float = STABILITY_EPSILON) -> ConstraintReport:
    return check_assignment(placement, epsilon) + check_security(placement, toggles)
