"""Small hand-built scenarios and placements shared by the test modules."""
from __future__ import annotations

from slice_guard.model import (
    Placement,
    ProcedureSpec,
    Scenario,
    SecurityToggles,
    SliceRequest,
    Topology,
    VnfTypeSpec,
    Weights,
)

OFF = SecurityToggles(exposure=False, max_traffic=False)


def vnf(tid, base=1.0, mu=1.0, omega=1000.0, zmax=10.0, ztmax=10.0, budget=2, pseudo=False):
    if pseudo:
        return VnfTypeSpec(tid, 0.0, 0.0, 0.0, 0.0, 0.0, budget, True, tid)
    return VnfTypeSpec(tid, base, mu, omega, zmax, ztmax, budget, False, tid)


def proc(pid, seq, slice_id="s1", rate=1.0, deadline=1.0, external=False, kind=""):
    return ProcedureSpec(pid, slice_id, tuple(seq), rate, deadline, external, kind or pid)


def scenario(procs, types=None, caps=None, delay=0.005, bandwidth=40.0, toggles=OFF, weights=None):
    """Full-mesh scenario; procedures are grouped into slices in order of first appearance."""
    types = types or [vnf("A"), vnf("B")]
    caps = caps or {"n1": 30.0, "n2": 30.0}
    slices = {}
    for p in procs:
        slices.setdefault(p.slice, []).append(p)
    return Scenario(
        Topology.mesh(caps, delay, bandwidth),
        tuple(types),
        tuple(SliceRequest(s, tuple(ps)) for s, ps in slices.items()),
        toggles,
        weights or Weights(),
        None,
    )


def place(sc, instances, assignment, omega=None):
    """instances: {(type, index): node}; assignment: {(slice, proc, type): index}."""
    return Placement.from_assignment(sc, instances, assignment, omega)


def chain_t1(**kw):
    """Two nodes of capacity 10, chain A -> B at unit rate, security off."""
    kw.setdefault("caps", {"n1": 10.0, "n2": 10.0})
    return scenario([proc("p1", ("A", "B"), deadline=kw.pop("deadline", 1.0),
                          external=kw.pop("external", False))], **kw)
