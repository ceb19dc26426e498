import pytest
from helpers import capability_names

from capakb import KnowledgeBase
from capakb.fixtures import (
    FIXTURE_DIR,
    PEPPER_DEFINED_CAPABILITIES,
    PEPPER_RULES,
    PEPPER_TTL,
    RandomKbSpec,
    bfs_closure_oracle,
    component_forest,
    generate_random,
    golden_materialization,
    pepper_kb,
    random_kb,
    write_fixture_files,
)
from capakb.parsing import parse_rules, parse_turtle


def test_committed_files_match_builder(tmp_path):
    write_fixture_files(tmp_path)
    for name in ("pepper.ttl", "pepper.rules", "golden/pepper_materialized.ttl"):
        assert (tmp_path / name).read_bytes() == (FIXTURE_DIR / name).read_bytes(), name


def test_golden_is_reproducible():
    assert golden_materialization() == (FIXTURE_DIR / "golden" / "pepper_materialized.ttl").read_text()


def test_fixture_loads_without_diagnostics():
    doc = parse_turtle(PEPPER_TTL)
    rules = parse_rules(PEPPER_RULES)
    assert doc.diagnostics == [] and rules.diagnostics == []
    kb = pepper_kb()
    assert kb.validate() == []


def test_fixture_classification(pepper):
    assert capability_names(pepper) == PEPPER_DEFINED_CAPABILITIES


def test_after_tracker_removal(pepper):
    pepper.retract_fact(pepper.triple("ex:pepper", "ex:hasComponent", "ex:artrack"))
    assert capability_names(pepper) == {"ScrewingCapability"}


def test_after_putting_down_screwdriver(pepper):
    pepper.retract_fact(pepper.triple("ex:pepper_hand", "ex:isHolding", "ex:screwdriver"))
    assert capability_names(pepper) == {"ObjectLocalisationCapa", "HandPointingCapa"}


def test_random_generation_is_deterministic():
    spec = RandomKbSpec.sample(11)
    a, b = generate_random(spec), generate_random(spec)
    assert a.triples == b.triples and a.axioms == b.axioms and a.rules == b.rules


def test_random_seeds_differ():
    assert generate_random(RandomKbSpec(seed=1)).facts != generate_random(RandomKbSpec(seed=2)).facts


def test_no_axioms_no_rules_derives_nothing():
    spec = RandomKbSpec(seed=5, axiom_counts={}, rule_count=0)
    kb = random_kb(spec)
    stats = kb.rebuild()
    # only the built-in type and subclass rules remain, and there is no schema
    assert stats.derived_count == 0


def test_zero_density_has_no_property_edges():
    spec = RandomKbSpec(seed=3, edge_density=0.0)
    doc = generate_random(spec)
    type_iri = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"
    assert all(p.lexical == type_iri for _, p, _ in doc.facts)


def test_spec_caps_are_enforced():
    with pytest.raises(ValueError):
        RandomKbSpec(individual_count=31)
    with pytest.raises(ValueError):
        RandomKbSpec(class_count=11)
    with pytest.raises(ValueError):
        RandomKbSpec(axiom_counts={"subclass": 9})
    with pytest.raises(ValueError):
        RandomKbSpec(rule_count=4)


def test_sampled_specs_respect_caps():
    for seed in range(200):
        spec = RandomKbSpec.sample(seed)
        assert spec.individual_count <= 30 and spec.class_count <= 10
        assert sum(spec.axiom_counts.values()) <= 8 and spec.rule_count <= 3


def test_bfs_oracle_chain():
    assert bfs_closure_oracle([(0, 1), (1, 2), (2, 3)]) == {(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)}


def test_bfs_oracle_cycle_has_self_loops():
    assert bfs_closure_oracle([(0, 1), (1, 0)]) == {(0, 1), (1, 0), (0, 0), (1, 1)}
    assert bfs_closure_oracle([]) == set()


def test_component_forest_shape():
    doc = component_forest(edge_count=2_000, max_depth=4, equivalences=5, seed=1)
    hc = "http://ex.org/hasComponent"
    edges = [(s, o) for s, p, o in doc.facts if p.lexical == hc]
    assert len(edges) == 2_000
    parent = {o: s for s, o in edges}

    def depth(n):
        d = 0
        while n in parent:
            n, d = parent[n], d + 1
        return d

    assert max(depth(o) for _, o in edges) <= 4
    kb = KnowledgeBase.from_documents(doc)
    assert kb.validate() == []
