import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from helpers import capability_names, rebuilt_set, twin

from capakb import RetractionError, assert_all, retract_all
from capakb.fixtures import RandomKbSpec, random_fact_pool, random_kb


def fact(kb, s, p, o):
    return kb.triple(s, p, o, create=True)


def support_shape(kb):
    return {f: sorted((s.rule, s.premises) for s in sups) for f, sups in kb.provenance.supports_of.items()}


def test_assert_holding_gives_screwing(pepper_raw):
    kb = twin(pepper_raw)
    holding = fact(kb, "ex:pepper_hand", "ex:isHolding", "ex:screwdriver")
    kb.store.erase(holding)
    kb.rebuild()
    assert "ScrewingCapability" not in capability_names(kb)
    delta = kb.assert_fact(holding)
    assert fact(kb, "ex:pepper_capa", "a", "ex:ScrewingCapability") in delta.added
    assert set(kb.store) == rebuilt_set(kb)


def test_assert_present_fact_is_empty(pepper):
    delta = pepper.assert_fact(fact(pepper, "ex:pepper", "ex:hasComponent", "ex:artrack"))
    assert delta.empty and delta.added == []


def test_assert_isolated_fact(pepper):
    t = fact(pepper, "ex:rock", "ex:weighs", "ex:lots")
    delta = pepper.assert_fact(t)
    assert delta.added == [t]
    assert pepper.store.is_asserted(t)


def test_assert_upgrades_derived_fact(pepper):
    t = fact(pepper, "ex:pepper", "ex:hasComponent", "ex:realsense")
    assert not pepper.store.is_asserted(t)
    delta = pepper.assert_fact(t)
    assert delta.empty
    assert pepper.store.is_asserted(t)
    # still derivable, so retracting the assertion leaves it as a derived fact
    delta = pepper.retract_fact(t)
    assert t in pepper.store and not pepper.store.is_asserted(t)
    assert t in delta.rederived
    assert set(pepper.store) == rebuilt_set(pepper)


def test_retract_artrack_cascades(pepper):
    t = fact(pepper, "ex:pepper", "ex:hasComponent", "ex:artrack")
    delta = pepper.retract_fact(t)
    removed = {pepper.format_triple(x) for x in delta.removed}
    assert "ex:pepper_capa a ex:ObjectLocalisationCapa" in removed
    assert "ex:pepper_capa a ex:HandPointingCapa" in removed
    assert fact(pepper, "ex:pepper", "ex:hasGraspingAffordance", "ex:cube") in pepper.store
    assert set(pepper.store) == rebuilt_set(pepper)
    assert capability_names(pepper) == {"ScrewingCapability"}


def test_retract_then_reassert_restores_state(pepper):
    before = set(pepper.store)
    flags = {t: pepper.store.is_asserted(t) for t in pepper.store}
    shape = support_shape(pepper)
    t = fact(pepper, "ex:pepper", "ex:hasComponent", "ex:artrack")
    pepper.retract_fact(t)
    pepper.assert_fact(t)
    assert set(pepper.store) == before
    assert {t: pepper.store.is_asserted(t) for t in pepper.store} == flags
    assert support_shape(pepper) == shape


def test_assert_then_retract_restores_provenance(pepper):
    before = set(pepper.store)
    shape = support_shape(pepper)
    count = len(pepper.provenance)
    t = fact(pepper, "ex:pepper", "ex:hasComponent", "ex:gripper")
    pepper.assert_fact(t)
    assert len(pepper.provenance) > count
    pepper.retract_fact(t)
    assert set(pepper.store) == before
    assert len(pepper.provenance) == count
    assert support_shape(pepper) == shape
    assert pepper.provenance.audit(pepper.store) == []


def test_redundant_camera_keeps_capability(pepper):
    pepper.assert_fact(fact(pepper, "ex:pepper_head", "ex:hasComponent", "ex:spare_cam"))
    pepper.assert_fact(fact(pepper, "ex:spare_cam", "a", "ex:Camera"))
    delta = pepper.retract_fact(fact(pepper, "ex:pepper_head", "ex:hasComponent", "ex:realsense"))
    olc = fact(pepper, "ex:pepper_capa", "a", "ex:ObjectLocalisationCapa")
    assert olc in delta.rederived
    assert olc not in delta.removed
    assert set(pepper.store) == rebuilt_set(pepper)


def test_retract_derived_fact_is_refused(pepper):
    with pytest.raises(RetractionError, match="cannot retract derived fact; retract its asserted supports"):
        pepper.retract_fact(fact(pepper, "ex:pepper", "ex:hasComponent", "ex:realsense"))


def test_retract_absent_fact_is_noop(pepper):
    before = set(pepper.store)
    delta = pepper.retract_fact(fact(pepper, "ex:pepper", "ex:hasComponent", "ex:nothing"))
    assert delta.empty and delta.rederived == []
    assert set(pepper.store) == before


def test_batch_operations(pepper):
    edges = [
        fact(pepper, "ex:pepper", "ex:hasComponent", "ex:artrack"),
        fact(pepper, "ex:pepper_hand", "ex:isHolding", "ex:screwdriver"),
    ]
    retract_all(pepper, edges)
    assert capability_names(pepper) == set()
    assert set(pepper.store) == rebuilt_set(pepper)
    assert_all(pepper, edges)
    assert capability_names(pepper) == {"ObjectLocalisationCapa", "HandPointingCapa", "ScrewingCapability"}
    assert set(pepper.store) == rebuilt_set(pepper)


def test_rebuild_of_fresh_kb_equals_materialize(pepper_raw):
    a, b = twin(pepper_raw), twin(pepper_raw)
    assert a.rebuild().derived_count == b.materialize().derived_count
    assert set(a.store) == set(b.store)


def test_rebuild_twice_is_stable(pepper):
    assert pepper.rebuild().derived_count == pepper.rebuild().derived_count


def run_sequence(seed, steps):
    spec = RandomKbSpec.sample(seed)
    kb = random_kb(spec)
    kb.rebuild()
    rng = random.Random(seed)
    pool = random_fact_pool(spec)
    for _ in range(steps):
        if rng.random() < 0.5:
            kb.assert_fact(kb.intern_triple(rng.choice(pool)))
        else:
            asserted = sorted(kb.store.asserted())
            if asserted:
                kb.retract_fact(rng.choice(asserted))
        assert set(kb.store) == rebuilt_set(kb)
        assert kb.provenance.audit(kb.store) == []


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10_000))
def test_maintenance_law_property(seed):
    run_sequence(seed, 20)
