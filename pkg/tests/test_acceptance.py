"""Acceptance suite. Each test prints one PASS/FAIL line for its criterion.

Run alone with ``pytest tests/test_acceptance.py -v``. Full-scale solves use a
fixed node budget so results are deterministic and each point stays well under
a minute.
"""
from __future__ import annotations

import functools
import time

import pytest

from slice_guard.catalog import build_base_scenario, random_tiny_scenario, set_external_count, set_max_traffic
from slice_guard.cli import main
from slice_guard.evaluate import (
    FAMILIES,
    check_placement,
    instance_delay,
    mm1_delay,
    objective,
    procedure_delay,
    total_capacity,
    traffic_capacity,
)
from slice_guard.metrics import compute_metrics, delay_metrics
from slice_guard.model import Placement, SecurityToggles
from slice_guard.solver import Infeasible, SolverConfig, solve, solve_bruteforce

from support import chain_t1, place, proc, scenario, vnf

NODE_LIMIT = 200_000
POINT_BUDGET = 60.0
D1 = 1 / 1000 + 1 / 999


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok
    return emit


@functools.lru_cache(maxsize=None)
def base_point(exposure: bool, max_traffic: bool, external: int, limit: float = 2.0):
    """Solve one variant of the reference scenario; returns (report, metrics, seconds)."""
    sc = build_base_scenario(42, toggles=SecurityToggles(exposure, max_traffic))
    sc = set_max_traffic(set_external_count(sc, external), limit)
    t0 = time.monotonic()
    report = solve(sc, SolverConfig(node_limit=NODE_LIMIT, time_limit=POINT_BUDGET))
    elapsed = time.monotonic() - t0
    return report, compute_metrics(report.best_placement, report.objective), elapsed


def test_criterion_01_exposure_contract(verdict):
    firsts, slowest = [], 0.0
    for k in range(5):
        report, m, secs = base_point(True, False, k)
        assert check_placement(report.best_placement).ok
        firsts.append(m.exposed_procedures_first_vnf)
        slowest = max(slowest, secs)
    ok = firsts == [0] * 5 and slowest <= POINT_BUDGET
    assert verdict(1, ok, f"exposed_first_vnf for 0..4 external = {firsts}, slowest point {slowest:.1f}s")


def test_criterion_02_exposure_off_monotone(verdict):
    firsts = [base_point(False, False, k)[1].exposed_procedures_first_vnf for k in range(5)]
    ok = all(a <= b for a, b in zip(firsts, firsts[1:]))
    assert verdict(2, ok, f"exposed_first_vnf with constraint off for 0..4 external = {firsts}")


def test_criterion_03_traffic_limit_isolation(verdict):
    _, tight, t1 = base_point(False, True, 1, 1.0)
    # six procedures in total, so a limit of 6 can never bind
    _, loose, t6 = base_point(False, True, 1, 6.0)
    _, off, _ = base_point(False, False, 1)
    ok = (tight.exposed_procedures_any_shared == 0
          and loose.exposed_procedures_any_shared == off.exposed_procedures_any_shared
          and max(t1, t6) <= POINT_BUDGET)
    assert verdict(3, ok, f"any_shared: limit 1 -> {tight.exposed_procedures_any_shared}, "
                          f"limit 6 -> {loose.exposed_procedures_any_shared}, "
                          f"constraint off -> {off.exposed_procedures_any_shared}")


def test_criterion_04_activation_ordering(verdict):
    _, tight, _ = base_point(False, True, 1, 1.0)
    _, off, _ = base_point(False, False, 1)
    a, b = tight.activated_instances, off.activated_instances
    near = f"limit 1: {a} (reference 27, {'within' if abs(a - 27) <= 0.2 * 27 else 'outside'} 20%); " \
           f"off: {b} (reference 15, {'within' if abs(b - 15) <= 0.2 * 15 else 'outside'} 20%)"
    assert verdict(4, a > b, f"activated instances {a} > {b}; {near}")


BASE_GRID = (
    [(True, False, k) for k in range(5)] + [(False, False, k) for k in range(5)]
    + [(False, True, 1, 1.0), (False, True, 1, 6.0), (True, True, 1), (False, True, 1)]
)


def test_criterion_05_node_capacity(verdict):
    # every paper-scale solve of this suite; node-capacity study = limit on, one external
    fractions = [f for key in BASE_GRID for f in base_point(*key)[1].node_capacity_used.values()]
    ok = all(f <= 1.0 for f in fractions)
    on, off = base_point(True, True, 1)[1], base_point(False, True, 1)[1]
    assert verdict(5, ok, f"max node fraction over {len(BASE_GRID)} solves = {max(fractions):.4f}; "
                          f"node n3 with exposure on/off = {on.node_capacity_used['n3']:.2f}/"
                          f"{off.node_capacity_used['n3']:.2f} (reference 1.00/0.97)")


def test_criterion_06_oracle_equivalence(verdict):
    t0 = time.monotonic()
    compared = infeasible = 0
    mismatches = []
    for seed in range(40):
        for tg in (SecurityToggles(a, b) for a in (False, True) for b in (False, True)):
            sc = random_tiny_scenario(seed, tg)
            try:
                oracle = solve_bruteforce(sc)
            except Infeasible:
                try:
                    solve(sc)
                    mismatches.append((seed, tg, "bnb feasible"))
                except Infeasible:
                    infeasible += 1
                continue
            r = solve(sc)
            compared += 1
            if abs(r.objective - oracle.objective) > 1e-9 * max(1.0, abs(oracle.objective)):
                mismatches.append((seed, tg, r.objective, oracle.objective))
    secs = time.monotonic() - t0
    ok = not mismatches and compared >= 50 and secs <= 600
    assert verdict(6, ok, f"{compared} feasible instances equal, {infeasible} jointly infeasible, "
                          f"{len(mismatches)} mismatches, {secs:.1f}s")


def test_criterion_07_formulas(verdict):
    one = scenario([proc("p1", ("A",), rate=2.0), proc("p2", ("A",), rate=3.0)], types=[vnf("A")])
    pl = place(one, {("A", 0): "n1"}, {("s1", "p1", "A"): 0, ("s1", "p2", "A"): 0})
    twice = scenario([proc("p1", ("A", "B", "A"))])
    pl2 = place(twice, {("A", 0): "n1", ("B", 0): "n1"}, {("s1", "p1", "A"): 0, ("s1", "p1", "B"): 0})
    five = scenario([proc("p1", ("A",), rate=5.0)], types=[vnf("A")])
    pl5 = place(five, {("A", 0): "n1"}, {("s1", "p1", "A"): 0})
    t1 = chain_t1()
    co = place(t1, {("A", 0): "n1", ("B", 0): "n1"}, {("s1", "p1", "A"): 0, ("s1", "p1", "B"): 0})
    split = place(t1, {("A", 0): "n1", ("B", 0): "n2"}, {("s1", "p1", "A"): 0, ("s1", "p1", "B"): 0})
    single = scenario([proc("p1", ("A",))], types=[vnf("A")])
    pls = place(single, {("A", 0): "n1"}, {("s1", "p1", "A"): 0})
    checks = {
        "traffic 2+3": traffic_capacity(pl, "n1", "A", 0) == 5.0,
        "traffic 2 traverses": traffic_capacity(pl2, "n1", "A", 0) == 2.0,
        "total base+5": total_capacity(pl5, "n1", "A", 0) == 6.0,
        "total idle": total_capacity(Placement(five, beta=frozenset({("n1", "A", 0)})), "n1", "A", 0) == 1.0,
        "delay 1 pkt": abs(instance_delay(co, "n1", "A", 0) - D1) <= 1e-12,
        "delay empty": abs(mm1_delay(1000.0, 0.0) - 0.002) <= 1e-12,
        "chain co-located": abs(procedure_delay(co, "s1", "p1") - 2 * D1) <= 1e-12,
        "chain split": abs(procedure_delay(split, "s1", "p1") - (2 * D1 + 0.005)) <= 1e-12,
        "objective single": abs(objective(pls) - (2.0 + D1)) <= 1e-12,
        "objective empty": objective(Placement(scenario([]))) == 0.0,
    }
    failed = [k for k, v in checks.items() if not v]
    assert verdict(7, not failed, f"{len(checks) - len(failed)}/{len(checks)} hand-derived values"
                                  + (f"; failed: {failed}" if failed else ""))


def test_criterion_08_delay_decomposition(verdict):
    report, m, _ = base_point(True, True, 1)
    pl = report.best_placement
    sc = pl.scenario
    auth = delay_metrics(pl)["authentication"]
    links = sc.topology.link_map
    hop_ok = all(links[entry[0]].delay == 0.005 for entry in pl.chi)
    for p in sc.procedures:
        vs = sc.structures[p.key]
        processing = sum(
            vs.traverse_count[t] * instance_delay(pl, n, t, i)
            for t in vs.type_order for n, i in pl.mapping[p.key + (t,)]
        )
        crossings = sum(vs.step_counts[(a, b)] for _, _, _, ((a, _), (b, _)) in pl.chi_by_procedure.get(p.key, ()))
        hop_ok &= abs(procedure_delay(pl, p.slice, p.id) - processing - 0.005 * crossings) <= 1e-12
    ok = 0.002 <= auth <= 0.020 and hop_ok
    assert verdict(8, ok, f"authentication delay {auth * 1000:.2f} ms (reference about 7 ms); "
                          f"5 ms per hop exact: {hop_ok}")


def test_criterion_09_byte_identical_sweeps(verdict, tmp_path):
    args = ["--node-limit", "3000"]
    for run in ("a", "b"):
        for name in ("paper-exposure-sweep", "paper-maxtraffic-sweep"):
            assert main(["sweep", "--preset", name, *args, "--out", str(tmp_path / run / name)]) == 0
    files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*.csv"))
    same = all((tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes() for f in files)
    assert verdict(9, same and len(files) > 0, f"{len(files)} CSV files compared across two runs")


def _violating_placements():
    """One placement per family that breaks exactly that family."""
    on = SecurityToggles(True, True)
    ab = {("s1", "p1", "A"): 0, ("s1", "p1", "B"): 0}
    t1 = chain_t1()
    out = {}
    out["coverage"] = place(t1, {("A", 0): "n1"}, {("s1", "p1", "A"): 0})
    co = place(t1, {("A", 0): "n1", ("B", 0): "n1"}, ab)
    out["launch_bound"] = Placement(t1, gamma=co.gamma, beta=frozenset({("n1", "B", 0)}))
    out["launch_used"] = Placement(t1, gamma=co.gamma, beta=co.beta | {("n2", "A", 1)})
    two = scenario([proc("p1", ("A", "B")), proc("p2", ("A", "B"))])
    out["single_node"] = Placement(
        two,
        gamma=frozenset({("n1", "A", 0, "s1", "p1"), ("n2", "A", 0, "s1", "p2"),
                         ("n1", "B", 0, "s1", "p1"), ("n1", "B", 0, "s1", "p2")}),
        chi=frozenset({(("n2", "n1"), "s1", "p2", (("A", 0), ("B", 0)))}),
        beta=frozenset({("n1", "A", 0), ("n2", "A", 0), ("n1", "B", 0)}),
    )
    heavy = scenario([proc("p1", ("A",), rate=10.0)], types=[vnf("A")])
    out["instance_capacity"] = place(heavy, {("A", 0): "n1"}, {("s1", "p1", "A"): 0})
    big = scenario([proc("p1", ("A",), rate=30.0)], types=[vnf("A", zmax=40.0, ztmax=40.0)])
    out["node_capacity"] = place(big, {("A", 0): "n1"}, {("s1", "p1", "A"): 0})
    split = place(t1, {("A", 0): "n1", ("B", 0): "n2"}, ab)
    out["flow"] = Placement(t1, gamma=split.gamma, beta=split.beta)
    narrow = chain_t1(bandwidth=0.5)
    out["bandwidth"] = place(narrow, {("A", 0): "n1", ("B", 0): "n2"}, ab)
    out["deadline"] = place(chain_t1(deadline=0.003), {("A", 0): "n1", ("B", 0): "n1"}, ab)
    three = scenario([proc(f"p{k}", ("A",)) for k in range(3)], types=[vnf("A", ztmax=2.0)], toggles=on)
    out["traffic_limit"] = place(three, {("A", 0): "n1"}, {("s1", f"p{k}", "A"): 0 for k in range(3)})
    ext = scenario([proc("p1", ("A",), external=True)], types=[vnf("A")], toggles=on)
    out["exposure_flag"] = place(ext, {("A", 0): "n1"}, {("s1", "p1", "A"): 0}, omega=())
    shared = scenario([proc("p1", ("A",), external=True), proc("p2", ("A",), slice_id="s2", external=True)],
                      types=[vnf("A")], toggles=on)
    out["exposure_isolation"] = place(shared, {("A", 0): "n1"}, {("s1", "p1", "A"): 0, ("s2", "p2", "A"): 0})
    return out


def test_criterion_10_report_completeness(verdict):
    cases = _violating_placements()
    wrong = {}
    for family in FAMILIES:
        found = [v.family for v in check_placement(cases[family]).violations]
        if found != [family]:
            wrong[family] = found
    ok = not wrong and set(cases) == set(FAMILIES)
    assert verdict(10, ok, f"{len(FAMILIES) - len(wrong)}/{len(FAMILIES)} families isolated"
                           + (f"; wrong: {wrong}" if wrong else ""))
