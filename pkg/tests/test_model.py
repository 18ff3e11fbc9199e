from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from slice_guard.catalog import PROCEDURES, build_catalog, builtin_procedure
from slice_guard.model import EmptyAfterStrip, Topology, derive_virtual_structure, validate_scenario

from support import chain_t1, place, proc, scenario, vnf

CATALOG = {v.id: v for v in build_catalog(42)}


def structure(seq):
    return derive_virtual_structure(proc("p", seq), CATALOG)


def test_strips_leading_pseudo_entities():
    vs = structure(("UE", "RAN", "AMF", "SMF", "AMF"))
    assert vs.first_vnf == "AMF"
    assert vs.virtual_links == (("AMF", "SMF"), ("SMF", "AMF"))
    assert dict(vs.traverse_count) == {"AMF": 2, "SMF": 1}


def test_single_element_chain():
    vs = structure(("AMF",))
    assert vs.first_vnf == "AMF" and vs.virtual_links == () and dict(vs.traverse_count) == {"AMF": 1}


def test_only_pseudo_entities_is_rejected():
    with pytest.raises(EmptyAfterStrip):
        structure(("UE", "RAN"))


@pytest.mark.parametrize("kind, first, counts", [
    ("handover", "AMF", {"AMF": 2, "SMF": 3, "UPF": 1, "SourceRAN": 2, "TargetRAN": 2}),
    ("authentication", "ARPF", {"ARPF": 1, "UDM": 1, "AUSF": 2, "SEAF": 3, "UE": 2}),
    ("registration_amf_reallocation", "InitialAMF",
     {"InitialAMF": 6, "UDM": 1, "NSSF": 1, "OldAMF": 1, "NRF": 1, "RAN": 1, "TargetAMF": 1}),
    ("general_registration", "NewAMF",
     {"NewAMF": 9, "OldAMF": 1, "AUSF": 1, "UDM": 2, "SDM": 2, "PCF": 1, "SMF": 1, "UE": 1}),
])
def test_builtin_procedure_structures(kind, first, counts):
    vs = derive_virtual_structure(builtin_procedure(kind), CATALOG)
    assert vs.first_vnf == first
    assert dict(vs.traverse_count) == counts


@given(st.lists(st.sampled_from(["UE", "RAN", "AMF", "SMF", "UDM"]), min_size=1, max_size=12))
def test_structure_counts_are_consistent(seq):
    stripped = list(seq)
    while stripped and CATALOG[stripped[0]].is_pseudo:
        stripped.pop(0)
    if not stripped:
        with pytest.raises(EmptyAfterStrip):
            structure(seq)
        return
    vs = structure(seq)
    assert sum(vs.traverse_count.values()) == len(stripped)
    assert len(vs.virtual_links) == len(stripped) - 1
    assert vs.type_order[0] == vs.first_vnf
    assert set(vs.type_order) == set(vs.traverse_count)


def test_base_scenario_is_valid_and_big_m(base):
    assert validate_scenario(base) == []
    assert base.big_m.m_launch == base.big_m.c_exposure == 7


def _kinds(sc):
    return [v.kind for v in validate_scenario(sc)]


def test_unknown_type_and_nonpositive_rate():
    assert _kinds(scenario([proc("p1", ("A", "XYZ"))])) == ["UnknownVnfType"]
    assert _kinds(scenario([proc("p1", ("A", "B"), rate=0.0)])) == ["NonPositiveRate"]


@pytest.mark.parametrize("mutate, kind", [
    (lambda sc: sc.replace(topology=Topology.mesh({"n1": 0.0, "n2": 30.0}, 0.005, 40.0)), "NonPositiveCapacity"),
    (lambda sc: sc.replace(topology=Topology.mesh({"n1": 30.0, "n2": 30.0}, -1.0, 40.0)), "NegativeLinkDelay"),
    (lambda sc: sc.replace(topology=Topology.mesh({"n1": 30.0, "n2": 30.0}, 0.005, 0.0)), "NonPositiveBandwidth"),
    (lambda sc: sc.replace(catalog=(vnf("A", ztmax=20.0), vnf("B"))), "TrafficLimitAboveMax"),
    (lambda sc: sc.replace(catalog=(vnf("A", budget=0), vnf("B"))), "NonPositiveBudget"),
    (lambda sc: sc.replace(catalog=(vnf("A", omega=0.0), vnf("B"))), "NonPositiveServiceRate"),
    (lambda sc: sc.replace(catalog=(vnf("A"), vnf("A"), vnf("B"))), "DuplicateId"),
    (lambda sc: sc.with_procedures(lambda k, p: replace(p, max_delay=0.0)),
     "NonPositiveDelay"),
    (lambda sc: sc.with_procedures(lambda k, p: replace(p, max_delay=0.0005)),
     "DeadlineBelowProcessing"),
])
def test_invariant_violations(mutate, kind):
    assert kind in _kinds(mutate(chain_t1()))


def test_from_assignment_derives_chi_and_beta():
    sc = chain_t1()
    pl = place(sc, {("A", 0): "n1", ("B", 0): "n2"}, {("s1", "p1", "A"): 0, ("s1", "p1", "B"): 0})
    assert pl.chi == {(("n1", "n2"), "s1", "p1", (("A", 0), ("B", 0)))}
    assert pl.beta == {("n1", "A", 0), ("n2", "B", 0)}
    assert pl.omega == frozenset()


def test_procedure_sequences_are_unstripped():
    assert PROCEDURES["authentication"] == ("ARPF", "UDM", "AUSF", "SEAF", "UE", "SEAF", "AUSF", "SEAF", "UE")
    assert PROCEDURES["general_registration"][:3] == ("UE", "RAN", "NewAMF")
    assert PROCEDURES["registration_amf_reallocation"][-2:] == ("InitialAMF", "TargetAMF")
