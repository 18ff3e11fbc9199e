import csv

import pytest
from hypothesis import given, settings, strategies as st

from slice_guard.catalog import random_tiny_scenario
from slice_guard.metrics import (
    activation_metrics,
    compute_metrics,
    delay_metrics,
    exposure_metrics,
    write_metrics,
)
from slice_guard.model import Placement, SecurityToggles
from slice_guard.solver import Infeasible, solve

from support import chain_t1, place, proc, scenario, vnf

D1 = 1 / 1000 + 1 / 999


def shared_setup():
    # p1 external (first VNF A); p2 shares A0; p3 shares only B0 with p1; p4 is alone
    procs = [
        proc("p1", ("A", "B"), external=True),
        proc("p2", ("A",)),
        proc("p3", ("B",)),
        proc("p4", ("A",), slice_id="s2"),
    ]
    sc = scenario(procs)
    assign = {("s1", "p1", "A"): 0, ("s1", "p1", "B"): 0, ("s1", "p2", "A"): 0,
              ("s1", "p3", "B"): 0, ("s2", "p4", "A"): 1}
    return place(sc, {("A", 0): "n1", ("B", 0): "n1", ("A", 1): "n2"}, assign)


def test_exposure_counts():
    assert exposure_metrics(shared_setup()) == (1, 2)


def test_no_external_procedures():
    pl = place(chain_t1(), {("A", 0): "n1", ("B", 0): "n1"}, {("s1", "p1", "A"): 0, ("s1", "p1", "B"): 0})
    assert exposure_metrics(pl) == (0, 0)


def test_pseudo_instances_are_ignored():
    sc = scenario([proc("p1", ("A", "UE"), external=True), proc("p2", ("B", "UE"))],
                  types=[vnf("A"), vnf("B"), vnf("UE", pseudo=True)])
    pl = place(sc, {("A", 0): "n1", ("B", 0): "n1", ("UE", 0): "n1"},
               {("s1", "p1", "A"): 0, ("s1", "p1", "UE"): 0, ("s1", "p2", "B"): 0, ("s1", "p2", "UE"): 0})
    assert exposure_metrics(pl) == (0, 0)
    assert activation_metrics(pl).activated_instances == 2


def test_instance_fraction_excludes_base():
    sc = scenario([proc("p1", ("A",), rate=5.0)], caps={"n1": 30.0})
    m = activation_metrics(place(sc, {("A", 0): "n1"}, {("s1", "p1", "A"): 0}))
    assert m.instance_capacity_fraction == {("A", 0): 0.5}
    assert m.node_capacity_used == {"n1": 0.2}
    assert m.per_vnf_node_capacity == {("A", "n1"): 6.0}
    assert m.vnf_utilization == {"A": 0.5}


def test_empty_placement():
    m = compute_metrics(Placement(chain_t1()))
    assert m.activated_instances == 0
    assert set(m.node_capacity_used.values()) == {0.0}
    assert m.instance_capacity_fraction == {} and m.vnf_utilization == {}


def test_delay_average_over_slices():
    sc = scenario([proc("p1", ("A", "B"), kind="chain"), proc("p2", ("A", "B"), slice_id="s2", kind="chain")])
    assign = {("s1", "p1", "A"): 0, ("s1", "p1", "B"): 0, ("s2", "p2", "A"): 1, ("s2", "p2", "B"): 1}
    pl = place(sc, {("A", 0): "n1", ("B", 0): "n1", ("A", 1): "n1", ("B", 1): "n2"}, assign)
    assert delay_metrics(pl) == {"chain": pytest.approx(2 * D1 + 0.005 / 2, abs=1e-12)}


def test_csv_schemas(tmp_path):
    write_metrics(compute_metrics(shared_setup(), 1.5), tmp_path, "x")
    heads = {}
    for stem in ("exposure", "capacity", "vnf_capacity", "utilization", "delays"):
        with open(tmp_path / f"{stem}.csv") as fh:
            heads[stem] = next(csv.reader(fh))
        assert (tmp_path / f"{stem}.json").exists()
    assert heads == {
        "exposure": ["sweep_value", "exposed_first_vnf", "exposed_any_shared", "activated_instances", "objective"],
        "capacity": ["node_id", "capacity_used", "capacity_fraction"],
        "vnf_capacity": ["vnf_type", "node_id", "capacity_units"],
        "utilization": ["vnf_type", "instance_index", "node_id", "traffic_capacity", "fraction"],
        "delays": ["procedure_kind", "mean_delay_seconds"],
    }
    assert (tmp_path / "exposure.csv").read_text().splitlines()[1] == "x,1,2,3,1.5"


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 500), st.booleans(), st.booleans())
def test_metric_invariants_on_solved_placements(seed, exposure, limit):
    sc = random_tiny_scenario(seed, SecurityToggles(exposure, limit))
    try:
        r = solve(sc)
    except Infeasible:
        return
    m = compute_metrics(r.best_placement)
    assert m.exposed_procedures_any_shared >= m.exposed_procedures_first_vnf >= 0
    if exposure:
        assert m.exposed_procedures_first_vnf == 0
    assert all(0.0 <= f <= 1.0 for f in m.node_capacity_used.values())
    assert all(0.0 <= f <= 1.0 for f in m.instance_capacity_fraction.values())
